"""Convex geometry in the lifted space of basis values.

A domain point ``x`` is represented by ``(g_1(x), ..., g_n(x))``. The leading
one of ``(1, g(x))`` is dropped: it is shared by every point, so two hulls of
such vectors meet exactly when the hulls of the g-parts meet.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (ContractViolation, EmptyIntersection, NullSpaceDimensionError,
                     SingularConfiguration)
from .numerics import EQ, LpProblem, affine_dependence, simplex_solve

WEIGHT_TOL = 1e-10
AGREEMENT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LiftedPoint:
    source_index: int
    vector: np.ndarray


def lifted_points(problem, indices):
    return [LiftedPoint(int(k), problem.g[k]) for k in indices]


def as_matrix(points):
    """Stack LiftedPoints or raw vectors into a (k, n) array."""
    rows = [p.vector if isinstance(p, LiftedPoint) else p for p in points]
    P = np.asarray(rows, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    return P


@dataclass(frozen=True, eq=False)
class RadonDecomposition:
    positive_indices: tuple
    negative_indices: tuple
    weights_pos: np.ndarray
    weights_neg: np.ndarray
    radon_point: np.ndarray


def radon_partition(points) -> RadonDecomposition:
    """Split n+2 points of R^n by the sign of their affine dependence.

    Indices refer to positions in ``points``; point 0 is always placed on
    the positive side.
    """
    P = as_matrix(points)
    k, n = P.shape
    if k != n + 2:
        raise ContractViolation(f"radon_partition needs {n + 2} points in R^{n}, got {k}")
    try:
        lam = affine_dependence(P)
    except NullSpaceDimensionError as exc:
        raise SingularConfiguration(str(exc)) from exc
    if lam[0] < 0:
        lam = -lam
        lam = lam / lam[lam > 0].sum()
    small = np.flatnonzero(np.abs(lam) < WEIGHT_TOL)
    if small.size:
        raise SingularConfiguration(
            f"zero dependence coefficient at positions {small.tolist()}")
    pos = np.flatnonzero(lam > 0)
    neg = np.flatnonzero(lam < 0)
    wp = lam[pos]
    wn = -lam[neg] / (-lam[neg]).sum()
    point = wp @ P[pos]
    return RadonDecomposition(tuple(pos.tolist()), tuple(neg.tolist()), wp, wn, point)


@dataclass(frozen=True, eq=False)
class JoinWeights:
    """Interior witness for (old positive side + entering point) vs negative side.

    ``pos_weights`` excludes the entering point and keeps the input order.
    """

    entering_weight: float
    pos_weights: np.ndarray
    neg_weights: np.ndarray
    min_weight: float


def interior_join_weights(pos_points, neg_points, entering: int) -> JoinWeights:
    """Max-min convex weights with ``sum w_p p = sum w_q q``.

    ``entering`` is the position of the new point inside ``pos_points``.
    Each weight is written ``t + s_i`` with ``s_i >= 0`` and the LP maximizes
    ``t``, so a positive optimum lands in both relative interiors.
    """
    P = as_matrix(pos_points)
    Q = as_matrix(neg_points)
    kp, n = P.shape
    kq = Q.shape[0]
    if Q.shape[1] != n:
        raise ContractViolation("point sets live in different dimensions")
    if kq == 0:
        raise ContractViolation("negative side is empty")
    if not 0 <= entering < kp:
        raise ContractViolation("entering position out of range")

    # columns: s_pos (kp), s_neg (kq), t
    A = np.zeros((n + 2, kp + kq + 1))
    A[:n, :kp] = P.T
    A[:n, kp:kp + kq] = -Q.T
    A[:n, -1] = P.sum(axis=0) - Q.sum(axis=0)
    A[n, :kp] = 1.0
    A[n, -1] = kp
    A[n + 1, kp:kp + kq] = 1.0
    A[n + 1, -1] = kq
    b = np.zeros(n + 2)
    b[n:] = 1.0
    c = np.zeros(kp + kq + 1)
    c[-1] = 1.0
    sol = simplex_solve(LpProblem(c, A, [EQ] * (n + 2), b, sense="max"))
    if not sol.optimal:
        raise EmptyIntersection(f"hulls do not meet (LP {sol.status})")
    t = sol.x[-1]
    w = sol.x[:-1] + t
    wp, wq = w[:kp], w[kp:]
    alpha = float(wp[entering])
    if t <= WEIGHT_TOL and alpha <= WEIGHT_TOL:
        raise EmptyIntersection(
            f"relative interiors do not meet (max-min weight {t:.3e})")
    gap = np.max(np.abs(wp @ P - wq @ Q))
    if gap > AGREEMENT_TOL * (1.0 + np.max(np.abs(P), initial=0.0)):
        raise EmptyIntersection(f"weighted sums disagree by {gap:.3e}")
    return JoinWeights(alpha, np.delete(wp, entering), wq, float(t))


@dataclass(frozen=True, eq=False)
class OptimalityCertificate:
    """Convex weights u, v with sum u_i G+_i = sum v_j G-_j.

    ``E_plus_indices``/``E_minus_indices`` index the points the weights
    belong to (domain indices when issued by the solver).
    """

    E_plus_indices: tuple
    E_minus_indices: tuple
    u: np.ndarray
    v: np.ndarray
    common_point: np.ndarray
    residual: float


@dataclass(frozen=True)
class Refusal:
    reason: str
    status: str = "infeasible"

    def __bool__(self):
        return False


def hulls_intersect(G_plus, G_minus, tol=1e-9):
    """Certificate that conv(G_plus) and conv(G_minus) meet, else a Refusal."""
    P = as_matrix(G_plus)
    Q = as_matrix(G_minus)
    if P.shape[0] == 0 or Q.shape[0] == 0:
        raise ContractViolation("both point sets must be non-empty")
    if P.shape[1] != Q.shape[1]:
        raise ContractViolation("point sets live in different dimensions")
    kp, n = P.shape
    kq = Q.shape[0]
    A = np.zeros((n + 2, kp + kq))
    A[:n, :kp] = P.T
    A[:n, kp:] = -Q.T
    A[n, :kp] = 1.0
    A[n + 1, kp:] = 1.0
    b = np.zeros(n + 2)
    b[n:] = 1.0
    sol = simplex_solve(LpProblem(np.zeros(kp + kq), A, [EQ] * (n + 2), b))
    if not sol.optimal:
        return Refusal("convex hulls are disjoint", sol.status)
    u = sol.x[:kp]
    v = sol.x[kp:]
    u = u / u.sum()
    v = v / v.sum()
    common = u @ P
    residual = float(np.max(np.abs(common - v @ Q), initial=0.0))
    if residual > tol:
        return Refusal(f"hull weights leave residual {residual:.3e}", "tolerance")
    return OptimalityCertificate(tuple(range(kp)), tuple(range(kq)), u, v, common, residual)


def point_in_hull(point, vertices, tol=1e-9):
    return hulls_intersect([np.asarray(point, dtype=float)], vertices, tol)

