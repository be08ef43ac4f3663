"""The exchange iteration and its optimality certificate.

Loop: interpolate on the basis, scan the domain, bring in the worst point,
repeat until no point deviates more than the levelled deviation sigma. Each
successful exchange strictly increases sigma, so on a finite domain no basis
can repeat and the loop terminates. The final coefficients are then checked
directly: they are optimal exactly when the lifted hulls of the maximal
positive and maximal negative deviation points intersect.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import Problem, deviation_profile, extreme_sets
from .errors import (ContractViolation, DegenerateExchange, EmptyIntersection,
                     InsufficientPoints, NoProgress, SingularBasis,
                     SingularConfiguration, VerificationFailure)
from .exchange import ExchangeRecord, exchange_step, select_entering
from .geometry import OptimalityCertificate, Refusal, hulls_intersect, radon_partition
from .interpolation import SignedBasis, check_nonsingular, chebyshev_interpolant

OPTIMAL = "optimal-certified"
ITERATION_LIMIT = "iteration-limit"
SINGULAR = "singular-basis"
UNCERTIFIED = "uncertified"

POLICIES = ("fail", "retry")

# failures that make one exchange attempt unusable
_STEP_FAILURES = (SingularBasis, SingularConfiguration, DegenerateExchange, NoProgress,
                  EmptyIntersection, VerificationFailure)


@dataclass
class SolveOptions:
    max_iterations: int = 500
    termination_tol: float = 1e-9
    singular_policy: str = "retry"
    retries: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ContractViolation("max_iterations must be positive")
        if not self.termination_tol > 0:
            raise ContractViolation("termination_tol must be positive")
        if self.singular_policy not in POLICIES:
            raise ContractViolation(f"singular_policy must be one of {POLICIES}")
        if self.retries < 0:
            raise ContractViolation("retries must be non-negative")


@dataclass(eq=False)
class SolveResult:
    A: np.ndarray | None
    sigma: float | None
    status: str
    iterations: list = field(default_factory=list)
    certificate: OptimalityCertificate | None = None
    basis: SignedBasis | None = None
    initial_sigma: float | None = None
    message: str = ""

    @property
    def sigmas(self):
        """Levelled deviation after each iteration, starting with the initial basis."""
        if self.initial_sigma is None:
            return []
        return [self.initial_sigma] + [r.new_sigma for r in self.iterations]

    @property
    def certified(self):
        return self.status == OPTIMAL


def _greedy_volume(V, count):
    """Row indices chosen by pivoted Gram-Schmidt (largest remaining norm first)."""
    R = V / np.maximum(np.max(np.abs(V), axis=0), 1e-300)
    chosen = []
    for _ in range(count):
        norms = np.einsum("ij,ij->i", R, R)
        norms[chosen] = -1.0
        k = int(np.argmax(norms))
        if norms[k] <= 0.0:
            break
        chosen.append(k)
        q = R[k] / np.sqrt(norms[k])
        R = R - np.outer(R @ q, q)
    return chosen


def _best_completion(V, chosen):
    """Extra row maximizing the smallest normalized affine-dependence weight."""
    coeffs = np.linalg.solve(V[chosen].T, V.T).T  # row l = c @ V[chosen]
    lam_abs = np.hstack([np.abs(coeffs), np.ones((V.shape[0], 1))])
    score = lam_abs.min(axis=1) / lam_abs.sum(axis=1)
    score[chosen] = -1.0
    return int(np.argmax(score))


def _partition(problem, idx):
    rd = radon_partition(problem.g[idx])
    return SignedBasis([idx[i] for i in rd.positive_indices],
                       [idx[i] for i in rd.negative_indices])


def initial_basis(problem: Problem, opts: SolveOptions | None = None) -> SignedBasis:
    """n+2 well spread points split into their Radon partition.

    Greedy volume maximization picks n+1 points of ``(1, g(x))``; the last
    point is the one whose affine dependence with them is most balanced.
    """
    opts = opts or SolveOptions()
    n, m = problem.n, problem.m
    if m < n + 2:
        raise InsufficientPoints(f"{m} points cannot hold a basis of {n + 2}")
    V = np.hstack([np.ones((m, 1)), problem.g])
    chosen = _greedy_volume(V, n + 1)
    error = None
    spare = [k for k in range(m) if k not in chosen]
    idx = chosen + spare[:n + 2 - len(chosen)]
    if len(chosen) == n + 1:
        try:
            idx = chosen + [_best_completion(V, chosen)]
            basis = _partition(problem, idx)
            check_nonsingular(basis, problem)
            return basis
        except (SingularConfiguration, SingularBasis, np.linalg.LinAlgError) as exc:
            error = exc
    else:
        error = SingularBasis("lifted points span fewer than n+1 dimensions")
    if opts.singular_policy == "fail":
        raise SingularBasis(f"initial basis is singular: {error}")

    rng = np.random.default_rng(opts.seed)
    idx = list(idx)
    for _ in range(opts.retries):
        outside = np.setdiff1d(np.arange(m), idx)
        if outside.size == 0:
            break
        idx[int(rng.integers(len(idx)))] = int(rng.choice(outside))
        try:
            basis = _partition(problem, idx)
            check_nonsingular(basis, problem)
            return basis
        except (SingularConfiguration, SingularBasis) as exc:
            error = exc
    raise SingularBasis(f"no non-singular initial basis after {opts.retries} retries: {error}")


def certify_optimality(A, problem: Problem, tol=None, hull_tol=1e-9):
    """Optimality certificate for ``A`` or a Refusal.

    ``tol`` is the extreme-set tolerance (default ``1e-9 * max(1, max_abs)``).
    The certificate's weights are indexed by the domain indices in
    ``E_plus_indices`` and ``E_minus_indices``.
    """
    profile = deviation_profile(A, problem)
    e_plus, e_minus = extreme_sets(profile, tol)
    if not e_plus or not e_minus:
        side = "E+" if not e_plus else "E-"
        return Refusal(f"{side} is empty", "empty-extreme-set")
    g = problem.g
    scale = 1.0 + float(np.max(np.abs(g[e_plus + e_minus])))
    cert = hulls_intersect(g[e_plus], g[e_minus], hull_tol * scale)
    if isinstance(cert, Refusal):
        return cert
    return OptimalityCertificate(tuple(e_plus), tuple(e_minus), cert.u, cert.v,
                                 cert.common_point, cert.residual)


def certify_tolerance(opts, max_abs):
    # basis points sit at sigma >= max_abs - tol * (1 + sigma); keep them extreme
    return 4.0 * opts.termination_tol * max(1.0, max_abs)


def solve_minimax(problem: Problem, opts: SolveOptions | None = None) -> SolveResult:
    opts = opts or SolveOptions()
    try:
        basis = initial_basis(problem, opts)
        interp = chebyshev_interpolant(basis, problem)
    except (SingularBasis, VerificationFailure) as exc:
        return SolveResult(None, None, SINGULAR, message=str(exc))

    records: list[ExchangeRecord] = []
    initial_sigma = interp.sigma
    tol = opts.termination_tol

    def result(status, message="", certificate=None):
        return SolveResult(interp.A, interp.sigma, status, records, certificate,
                           interp.basis, initial_sigma, message)

    for _ in range(opts.max_iterations):
        profile = deviation_profile(interp.A, problem)
        entering = select_entering(profile, interp.sigma, tol)
        if entering is None:
            cert = certify_optimality(interp.A, problem,
                                      certify_tolerance(opts, profile.max_abs))
            if isinstance(cert, Refusal):
                return result(UNCERTIFIED, cert.reason)
            return result(OPTIMAL, certificate=cert)
        try:
            _, record = exchange_step(interp.basis, interp, profile, problem, tol, entering)
        except _STEP_FAILURES as exc:
            record = None
            failure = exc
            if opts.singular_policy == "retry":
                record = _retry_exchange(interp, profile, problem, opts, entering[0])
            if record is None:
                return result(SINGULAR, f"exchange failed: {failure}")
        records.append(record)
        interp = record.interpolant
    return result(ITERATION_LIMIT, f"stopped after {opts.max_iterations} exchanges")


def _retry_exchange(interp, profile, problem, opts, tried):
    """Try the next worst points in turn; any of them raises sigma if it succeeds."""
    r = profile.residuals
    level = interp.sigma * (1.0 + opts.termination_tol) + opts.termination_tol
    order = np.argsort(-np.abs(r), kind="stable")
    attempts = 0
    for k in order:
        if abs(r[k]) <= level or attempts >= opts.retries:
            break
        if k == tried or k in interp.basis.indices:
            continue
        attempts += 1
        try:
            _, record = exchange_step(interp.basis, interp, profile, problem,
                                      opts.termination_tol, (int(k), 1 if r[k] > 0 else -1))
            return record
        except _STEP_FAILURES:
            continue
    return None
