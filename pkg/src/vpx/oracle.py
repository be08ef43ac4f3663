"""Reference solution of the discrete minimax problem by linear programming.

Primal form::

    min s  subject to  -s <= f_k - a0 - sum_i a_i g_i(x_k) <= s,  s >= 0, A free

The default route solves the dual instead,

    max sum_k f_k (u_k - v_k)  s.t.  sum_k (u_k - v_k) (1, g(x_k)) = 0,
                                     sum_k (u_k + v_k) = 1,  u, v >= 0,

whose tableau has n+2 rows rather than 2m. Its simplex multipliers are
exactly (A, s), so the primal solution comes for free.
"""

import numpy as np

from .core import Problem, deviation_profile
from .errors import VerificationFailure
from .numerics import EQ, GE, LpProblem, simplex_solve

MAX_DENSE_POINTS = 20_000


def lp_minimax(problem: Problem, formulation="dual"):
    """Return ``(A, sigma)`` minimizing the maximum absolute residual."""
    if problem.m > MAX_DENSE_POINTS:
        raise ValueError(f"dense LP oracle is capped at {MAX_DENSE_POINTS} points")
    if formulation == "dual":
        return _dual_route(problem)
    if formulation == "primal":
        return _primal_route(problem)
    raise ValueError(f"unknown formulation {formulation!r}")


def _lifted(problem):
    return np.hstack([np.ones((problem.m, 1)), problem.g])


def _dual_route(problem):
    V = _lifted(problem)
    f = problem.values
    m, p = V.shape
    A = np.zeros((p + 1, 2 * m))
    A[:p, :m] = V.T
    A[:p, m:] = -V.T
    A[p, :] = 1.0
    b = np.zeros(p + 1)
    b[p] = 1.0
    c = np.concatenate([f, -f])
    sol = simplex_solve(LpProblem(c, A, [EQ] * (p + 1), b, sense="max"))
    if not sol.optimal:
        raise VerificationFailure(f"oracle LP ended {sol.status}")
    coeffs = sol.duals[:p].copy()
    sigma = float(sol.objective_value)
    achieved = deviation_profile(coeffs, problem).max_abs
    if abs(achieved - sigma) > 1e-9 * (1.0 + abs(sigma)):
        raise VerificationFailure(
            f"oracle multipliers reach {achieved!r}, LP value is {sigma!r}")
    return coeffs, sigma


def _primal_route(problem):
    V = _lifted(problem)
    f = problem.values
    m, p = V.shape
    # variables: a (p, free), s (>= 0)
    A = np.zeros((2 * m, p + 1))
    A[:m, :p] = V
    A[:m, p] = 1.0    # a.V + s >= f
    A[m:, :p] = -V
    A[m:, p] = 1.0    # -a.V + s >= -f
    b = np.concatenate([f, -f])
    c = np.zeros(p + 1)
    c[p] = 1.0
    lower = [-np.inf] * p + [0.0]
    sol = simplex_solve(LpProblem(c, A, [GE] * (2 * m), b, lower=lower))
    if not sol.optimal:
        raise VerificationFailure(f"oracle LP ended {sol.status}")
    return sol.x[:p].copy(), float(sol.x[p])
