"""Single-point exchange: bring in a point of larger deviation, evict one.

The entering point joins the side whose deviation sign it shares. With old
Radon weights ``w`` and fresh interior weights ``w~`` for the enlarged
configuration, the evicted point minimizes ``w~_i / w_i``; subtracting that
multiple of the old dependence zeroes its weight and leaves the rest
non-negative.
"""

from dataclasses import dataclass

import numpy as np

from .core import DeviationProfile, Problem
from .errors import (ContractViolation, DegenerateExchange, NoProgress,
                     VerificationFailure)
from .geometry import JoinWeights, OptimalityCertificate, hulls_intersect, interior_join_weights
from .interpolation import (Interpolant, SignedBasis, basis_weights,
                            chebyshev_interpolant)

ENTERING_WEIGHT_TOL = 1e-10
PROGRESS_RTOL = 1e-12
HULL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ExchangeRecord:
    entering_index: int
    entering_sign: int
    leaving_index: int
    leaving_side: str  # "pos" (Y) or "neg" (Z) of the basis before the step
    gamma: float
    old_sigma: float
    ratios: tuple
    ratio_indices: tuple
    new_sigma: float | None = None
    new_basis: SignedBasis | None = None
    interpolant: Interpolant | None = None

    def as_dict(self):
        return {
            "entering": self.entering_index,
            "entering_sign": self.entering_sign,
            "leaving": self.leaving_index,
            "leaving_side": self.leaving_side,
            "gamma": self.gamma,
            "old_sigma": self.old_sigma,
            "sigma": self.new_sigma,
        }


def select_entering(profile: DeviationProfile, sigma: float, tol: float = 1e-9):
    """(index, sign) of the largest deviation if it beats sigma, else None."""
    if sigma < 0:
        raise ContractViolation("sigma must be non-negative")
    if profile.max_abs > sigma * (1.0 + tol) + tol:
        k = profile.argmax_index
        return k, (1 if profile.residuals[k] > 0 else -1)
    return None


def select_leaving(old_join, old_other, joined: JoinWeights, join_indices, other_indices,
                   entering_index, entering_sign, old_sigma) -> ExchangeRecord:
    """Apply the minimum-ratio rule.

    ``old_join``/``old_other`` are the old Radon weights of the side being
    joined and of the opposite side, aligned with ``join_indices`` and
    ``other_indices``; ``joined`` carries the new weights in the same order.
    """
    if joined.entering_weight <= ENTERING_WEIGHT_TOL:
        raise DegenerateExchange(
            f"entering point {entering_index} has weight {joined.entering_weight:.3e}")
    old = np.concatenate([np.asarray(old_join, float), np.asarray(old_other, float)])
    new = np.concatenate([joined.pos_weights, joined.neg_weights])
    idx = tuple(int(k) for k in join_indices) + tuple(int(k) for k in other_indices)
    if old.shape != new.shape or len(idx) != old.shape[0]:
        raise ContractViolation("weight vectors and index lists do not line up")
    # a zero old weight means the point is not needed: evict it first
    ratios = np.where(old > 0, new / np.where(old > 0, old, 1.0), 0.0)
    gamma = float(ratios.min())
    leaving = min(k for k, r in zip(idx, ratios) if r == gamma)
    in_join = leaving in idx[:len(join_indices)]
    join_side = "pos" if entering_sign > 0 else "neg"
    other_side = "neg" if entering_sign > 0 else "pos"
    return ExchangeRecord(
        entering_index=int(entering_index),
        entering_sign=int(entering_sign),
        leaving_index=leaving,
        leaving_side=join_side if in_join else other_side,
        gamma=gamma,
        old_sigma=float(old_sigma),
        ratios=tuple(float(r) for r in ratios),
        ratio_indices=idx,
    )


def closed_form_weights(old_join, old_other, joined: JoinWeights, gamma):
    """Weights after the exchange from the old and joined weights alone.

    Returns (entering weight, join-side weights, other-side weights) where the
    evicted point carries weight zero. Both sides sum to one.
    """
    scale = 1.0 - gamma
    ent = joined.entering_weight / scale
    wj = (joined.pos_weights - gamma * np.asarray(old_join, float)) / scale
    wo = (joined.neg_weights - gamma * np.asarray(old_other, float)) / scale
    return ent, wj, wo


def exchange_step(basis: SignedBasis, interp: Interpolant, profile: DeviationProfile,
                  problem: Problem, tol: float = 1e-9, entering=None):
    """One exchange. Returns (new basis, record).

    ``interp`` must be sign-normalized so that Y carries residual +sigma.
    ``entering`` overrides the default choice (largest deviation).
    """
    if {basis.pos, basis.neg} != {interp.basis.pos, interp.basis.neg}:
        raise ContractViolation("interpolant was computed for a different basis")
    basis = interp.basis
    if entering is None:
        entering = select_entering(profile, interp.sigma, tol)
        if entering is None:
            raise ContractViolation("no point deviates more than the basis level")
    k, sign = int(entering[0]), int(entering[1])
    if k in basis.indices:
        raise ContractViolation(f"entering point {k} already in the basis")

    old = basis_weights(basis, problem)
    if sign > 0:
        join, other = basis.pos, basis.neg
        w_join, w_other = old.weights_pos, old.weights_neg
    else:
        join, other = basis.neg, basis.pos
        w_join, w_other = old.weights_neg, old.weights_pos

    g = problem.g
    joined = interior_join_weights(g[[k, *join]], g[list(other)], entering=0)
    record = select_leaving(w_join, w_other, joined, join, other, k, sign, interp.sigma)

    leaving = record.leaving_index
    new_join = tuple(i for i in (k, *join) if i != leaving)
    new_other = tuple(i for i in other if i != leaving)
    new_basis = SignedBasis(new_join, new_other) if sign > 0 else SignedBasis(new_other, new_join)

    cert = hulls_intersect(g[list(new_basis.pos)], g[list(new_basis.neg)], HULL_TOL)
    if not isinstance(cert, OptimalityCertificate):
        raise VerificationFailure(f"exchanged basis lost hull intersection: {cert.reason}")

    new_interp = chebyshev_interpolant(new_basis, problem)
    margin = PROGRESS_RTOL * (1.0 + interp.sigma)
    if new_interp.sigma <= interp.sigma + margin:
        raise NoProgress(
            f"sigma {new_interp.sigma!r} does not exceed previous {interp.sigma!r}")
    record = ExchangeRecord(**{**record.__dict__, "new_sigma": new_interp.sigma,
                               "new_basis": new_interp.basis, "interpolant": new_interp})
    return new_interp.basis, record
