"""Equal-deviation (Chebyshev) interpolation on a signed basis.

For a basis of n+2 points split into a positive side Y and a negative side Z
the coefficients A and the level sigma solve

    a0 + sum_i a_i g_i(x_k) + s_k sigma = f(x_k),   s_k = +1 on Y, -1 on Z,

so that f - L equals +sigma on Y and -sigma on Z.
"""

from dataclasses import dataclass, replace
from itertools import chain

import numpy as np

from .core import Problem
from .errors import (ContractViolation, SingularBasis, SingularConfiguration,
                     SingularMatrix, VerificationFailure)
from .geometry import RadonDecomposition, radon_partition
from .numerics import leave_one_out_independent, solve_dense

EQUAL_DEVIATION_TOL = 1e-9
ZERO_SIGMA = 1e-12


@dataclass(frozen=True)
class SignedBasis:
    pos: tuple
    neg: tuple

    def __post_init__(self):
        pos = tuple(sorted(int(k) for k in self.pos))
        neg = tuple(sorted(int(k) for k in self.neg))
        if not pos or not neg:
            raise ContractViolation("both sides of a basis must be non-empty")
        if len(set(pos)) != len(pos) or len(set(neg)) != len(neg) or set(pos) & set(neg):
            raise ContractViolation("basis indices must be distinct")
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "neg", neg)

    def __len__(self):
        return len(self.pos) + len(self.neg)

    @property
    def indices(self):
        """Row order of the interpolation system: Y ascending, then Z ascending."""
        return self.pos + self.neg

    @property
    def signs(self):
        return np.array([1.0] * len(self.pos) + [-1.0] * len(self.neg))

    def swapped(self):
        return SignedBasis(self.neg, self.pos)

    def sign_of(self, k):
        if k in self.pos:
            return 1
        if k in self.neg:
            return -1
        raise KeyError(k)

    def as_dict(self):
        return {"pos": list(self.pos), "neg": list(self.neg)}


def _check_indices(basis, problem):
    if len(basis) != problem.n + 2:
        raise ContractViolation(
            f"basis has {len(basis)} points, model needs n+2 = {problem.n + 2}")
    if min(basis.indices) < 0 or max(basis.indices) >= problem.m:
        raise ContractViolation("basis index outside the domain")


def basis_weights(basis: SignedBasis, problem: Problem) -> RadonDecomposition:
    """Radon weights of the basis, oriented to its own Y/Z labelling.

    Indices in the result are domain indices. Raises SingularBasis unless the
    lifted Y and Z hulls meet in their relative interiors with exactly this
    split.
    """
    _check_indices(basis, problem)
    idx = basis.indices
    try:
        rd = radon_partition(problem.g[list(idx)])
    except SingularConfiguration as exc:
        raise SingularBasis(f"basis {basis.as_dict()} is singular: {exc}") from exc
    pos = tuple(idx[i] for i in rd.positive_indices)
    neg = tuple(idx[i] for i in rd.negative_indices)
    wp, wn = rd.weights_pos, rd.weights_neg
    if set(pos) == set(basis.neg):
        pos, neg, wp, wn = neg, pos, wn, wp
    if set(pos) != set(basis.pos):
        raise SingularBasis(
            f"lifted hulls of {basis.as_dict()} do not intersect for this split")
    op = np.argsort(pos)
    on = np.argsort(neg)
    return RadonDecomposition(tuple(np.asarray(pos)[op].tolist()),
                              tuple(np.asarray(neg)[on].tolist()),
                              wp[op], wn[on], rd.radon_point)


def check_nonsingular(basis: SignedBasis, problem: Problem) -> RadonDecomposition:
    """Full non-singularity test; returns the oriented Radon weights."""
    rd = basis_weights(basis, problem)
    ok = leave_one_out_independent(problem.g[list(basis.indices)])
    if not ok.all():
        leave = int(np.flatnonzero(~ok)[0])
        raise SingularBasis(
            f"dropping basis point {basis.indices[leave]} leaves an affinely "
            f"dependent set")
    return rd


def is_nonsingular(basis, problem):
    try:
        check_nonsingular(basis, problem)
    except SingularBasis:
        return False
    return True


def build_system(basis: SignedBasis, problem: Problem):
    _check_indices(basis, problem)
    idx = list(basis.indices)
    M = np.hstack([np.ones((len(idx), 1)), problem.g[idx], basis.signs[:, None]])
    return M, problem.values[idx].copy()


@dataclass(frozen=True, eq=False)
class Interpolant:
    A: np.ndarray
    sigma: float
    basis: SignedBasis
    degenerate: bool = False


def normalize_sign(raw: Interpolant) -> Interpolant:
    """Make sigma non-negative by swapping the basis sides if needed."""
    if abs(raw.sigma) <= ZERO_SIGMA:
        return replace(raw, degenerate=True)
    if raw.sigma < 0:
        return replace(raw, sigma=-raw.sigma, basis=raw.basis.swapped())
    return raw


def chebyshev_interpolant(basis: SignedBasis, problem: Problem, check=True) -> Interpolant:
    if check:
        check_nonsingular(basis, problem)
    M, b = build_system(basis, problem)
    try:
        sol = solve_dense(M, b)
    except SingularMatrix as exc:
        raise SingularBasis(f"interpolation system is singular: {exc}",
                            pivot=exc.pivot) from exc
    raw = Interpolant(sol[:-1].copy(), float(sol[-1]), basis)
    out = normalize_sign(raw)
    err = equal_deviation_error(out, problem)
    if err > EQUAL_DEVIATION_TOL * (1.0 + abs(out.sigma) + np.max(np.abs(b))):
        raise VerificationFailure(f"basis residuals miss +-sigma by {err:.3e}")
    return out


def equal_deviation_error(interp: Interpolant, problem: Problem) -> float:
    """max over basis points of |(f - L) - s_k sigma|."""
    idx = list(interp.basis.indices)
    r = problem.values[idx] - (interp.A[0] + problem.g[idx] @ interp.A[1:])
    return float(np.max(np.abs(r - interp.basis.signs * interp.sigma)))


def basis_points_sorted(basis, problem):
    """Basis indices sorted by the first coordinate (univariate use)."""
    idx = list(chain(basis.pos, basis.neg))
    return sorted(idx, key=lambda k: tuple(problem.domain.points[k]))
