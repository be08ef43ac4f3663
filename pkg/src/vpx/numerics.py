"""Dense linear algebra and a small two-phase simplex solver.

Matrices are plain 2-D numpy arrays. Everything here is written out by hand
(no LAPACK solve, no external LP code) so that the pivoting rules and
singularity thresholds are explicit and testable.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (ContractViolation, IterationLimit, NullSpaceDimensionError,
                     SingularMatrix)

SINGULAR_RTOL = 1e-12
INDEPENDENCE_RTOL = 1e-10
FEAS_TOL = 1e-9
COST_TOL = 1e-9
PIVOT_TOL = 1e-11


def solve_dense(M, b, refine=True):
    """Solve ``M x = b`` by Gaussian elimination with row pivoting.

    Raises SingularMatrix when a pivot drops below ``1e-12`` times the largest
    magnitude found in that column of the original matrix.
    """
    M = np.array(M, dtype=float)
    b = np.array(b, dtype=float).ravel()
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractViolation(f"matrix must be square, got shape {M.shape}")
    if b.shape[0] != M.shape[0]:
        raise ContractViolation("right hand side length does not match matrix")
    size = M.shape[0]
    col_scale = np.max(np.abs(M), axis=0) if size else np.zeros(0)

    lu = M.copy()
    perm = np.arange(size)
    for k in range(size):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = lu[p, k]
        if col_scale[k] == 0.0 or abs(pivot) < SINGULAR_RTOL * col_scale[k]:
            raise SingularMatrix(
                f"pivot {pivot:.3e} in column {k} below threshold "
                f"{SINGULAR_RTOL * col_scale[k]:.3e}", pivot=float(pivot), column=k)
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= pivot
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])

    def lu_solve(rhs):
        y = rhs[perm].copy()
        for i in range(1, size):
            y[i] -= lu[i, :i] @ y[:i]
        for i in range(size - 1, -1, -1):
            y[i] = (y[i] - lu[i, i + 1:] @ y[i + 1:]) / lu[i, i]
        return y

    x = lu_solve(b)
    if refine:
        x = x + lu_solve(b - M @ x)
    return x


def _gauss_jordan_full_pivot(K, rtol):
    """Reduce K in place to [I F; 0 0] form under row/column permutations.

    Returns (reduced, rank, column_order).
    """
    K = np.array(K, dtype=float)
    rows, cols = K.shape
    order = np.arange(cols)
    scale = np.max(np.abs(K)) if K.size else 0.0
    if scale == 0.0:
        return K, 0, order
    rank = 0
    for k in range(min(rows, cols)):
        sub = np.abs(K[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[i, j] <= rtol * scale:
            break
        i += k
        j += k
        if i != k:
            K[[k, i]] = K[[i, k]]
        if j != k:
            K[:, [k, j]] = K[:, [j, k]]
            order[[k, j]] = order[[j, k]]
        K[k] /= K[k, k]
        others = np.arange(rows) != k
        K[others] -= np.outer(K[others, k], K[k])
        rank += 1
    return K, rank, order


def affine_dependence(points):
    """Nonzero weights with sum zero whose weighted sum of points vanishes.

    ``points`` holds ``p + 2`` vectors in R^p. The result is normalized so
    the positive entries sum to one.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    m, p = P.shape
    if m != p + 2:
        raise ContractViolation(f"need exactly {p + 2} points in R^{p}, got {m}")
    K = np.vstack([P.T, np.ones((1, m))])
    R, rank, order = _gauss_jordan_full_pivot(K, SINGULAR_RTOL)
    if rank < p + 1:
        raise NullSpaceDimensionError(
            f"affine dependence space has dimension {m - rank} (numerical rank {rank})",
            rank=rank)
    lam_perm = np.empty(m)
    lam_perm[:rank] = -R[:rank, rank]
    lam_perm[rank] = 1.0
    lam = np.empty(m)
    lam[order] = lam_perm
    pos = lam[lam > 0].sum()
    if pos <= 0.0:
        lam = -lam
        pos = lam[lam > 0].sum()
    return lam / pos


def _batched_rank(K, rtol):
    """Numerical rank of each matrix in a (B, r, c) stack, full pivoting."""
    K = np.array(K, dtype=float)
    B, r, c = K.shape
    scale = np.max(np.abs(K).reshape(B, -1), axis=1) if K.size else np.zeros(B)
    rank = np.zeros(B, dtype=int)
    active = scale > 0
    bi = np.arange(B)
    for k in range(min(r, c)):
        sub = np.abs(K[:, k:, k:]).reshape(B, -1)
        flat = np.argmax(sub, axis=1)
        i, j = np.divmod(flat, c - k)
        i += k
        j += k
        active &= sub[bi, flat] > rtol * scale
        rank += active
        if not active.any():
            break
        row = K[bi, k, :].copy()
        K[bi, k, :] = K[bi, i, :]
        K[bi, i, :] = row
        col = K[bi, :, k].copy()
        K[bi, :, k] = K[bi, :, j]
        K[bi, :, j] = col
        piv = np.where(active, K[:, k, k], 1.0)
        factor = K[:, k + 1:, k] / piv[:, None]
        K[:, k + 1:, :] -= factor[:, :, None] * K[:, k:k + 1, :]
    return rank


def affine_independent(points, rtol=INDEPENDENCE_RTOL):
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] <= 1:
        return True
    D = P[1:] - P[0]
    if D.shape[0] > D.shape[1]:
        return False
    return bool(_batched_rank(D[None], rtol)[0] == D.shape[0])


def leave_one_out_independent(points, rtol=INDEPENDENCE_RTOL):
    """For each i, whether the points other than i are affinely independent.

    Same test as ``affine_independent`` applied to every subset, vectorized.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    m, p = P.shape
    if m <= 2:
        return np.ones(m, dtype=bool)
    if m - 2 > p:
        return np.zeros(m, dtype=bool)
    keep = ~np.eye(m, dtype=bool)
    subsets = np.stack([P[keep[i]] for i in range(m)])  # (m, m-1, p)
    D = subsets[:, 1:, :] - subsets[:, :1, :]
    return _batched_rank(D, rtol) == m - 2


# --------------------------------------------------------------------------
# linear programming

LE, EQ, GE = "<=", "=", ">="


@dataclass(eq=False)
class LpProblem:
    """``sense`` c.x subject to A x (relations) b and lower <= x <= upper.

    Bounds default to ``x >= 0``; use ``-inf``/``inf`` (or None) for free sides.
    """

    c: np.ndarray
    A: np.ndarray
    relations: Sequence[str]
    b: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    sense: str = "min"

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        nvar = self.c.shape[0]
        self.A = np.asarray(self.A, dtype=float).reshape(-1, nvar)
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.relations = tuple(self.relations)
        nrow = self.A.shape[0]
        if self.b.shape[0] != nrow or len(self.relations) != nrow:
            raise ContractViolation("rows of A, b and relations disagree")
        bad = set(self.relations) - {LE, EQ, GE}
        if bad:
            raise ContractViolation(f"unknown relations {sorted(bad)}")
        self.lower = _bounds(self.lower, nvar, 0.0)
        self.upper = _bounds(self.upper, nvar, np.inf)
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise ContractViolation("bounds must leave room for a finite value")
        if self.sense not in ("min", "max"):
            raise ContractViolation("sense must be 'min' or 'max'")

    @property
    def shape(self):
        return self.A.shape


def _bounds(v, nvar, default):
    if v is None:
        return np.full(nvar, default)
    out = np.array([default if x is None else x for x in np.ravel(v).tolist()]
                   if np.ndim(v) else [v] * nvar, dtype=float)
    if out.shape[0] != nvar:
        raise ContractViolation("bounds length does not match the number of variables")
    return out


@dataclass(eq=False)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective_value: float | None = None
    duals: np.ndarray | None = None  # simplex multipliers of the original rows
    pivots: int = 0
    basis: list = field(default_factory=list)

    @property
    def optimal(self):
        return self.status == "optimal"


def simplex_solve(lp: LpProblem, max_pivots=None, bland_after=None) -> LpSolution:
    """Two-phase dense tableau simplex.

    Dantzig pricing is used until ``bland_after`` pivots (default
    ``2 * (rows + cols)``), after which Bland's rule guarantees termination.
    ``IterationLimit`` is raised after ``max_pivots`` (default
    ``50 * (rows + cols)``).

    ``duals`` satisfy ``c_j - duals . A[:, j] = 0`` on basic structural
    columns, so for a maximization the reduced costs of the optimum are <= 0.
    """
    nrow, nvar = lp.A.shape
    if max_pivots is None:
        max_pivots = 50 * (nrow + nvar)
    if bland_after is None:
        bland_after = 2 * (nrow + nvar)

    # --- substitute variables so that every working variable is >= 0
    cols = []  # (orig var, multiplier)
    shift = np.zeros(nvar)
    extra_rows = []  # (working column, upper bound) for boxed variables
    for j in range(nvar):
        lo, hi = lp.lower[j], lp.upper[j]
        if np.isfinite(lo):
            shift[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                if hi < lo:
                    return LpSolution("infeasible")
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            shift[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    nwork = len(cols)
    W = np.zeros((nrow + len(extra_rows), nwork))
    cw = np.zeros(nwork)
    for k, (j, s) in enumerate(cols):
        W[:nrow, k] = s * lp.A[:, j]
        cw[k] = s * lp.c[j]
    rhs = np.concatenate([lp.b - lp.A @ shift, [u for _, u in extra_rows]])
    rels = list(lp.relations) + [LE] * len(extra_rows)
    for r, (k, _) in enumerate(extra_rows):
        W[nrow + r, k] = 1.0
    if lp.sense == "max":
        cw = -cw
    R = W.shape[0]

    # --- slack/surplus columns, row flips, artificials
    slack = []
    for i, rel in enumerate(rels):
        if rel == LE:
            slack.append((i, 1.0))
        elif rel == GE:
            slack.append((i, -1.0))
    flip = np.where(rhs < 0, -1.0, 1.0)
    nslack = len(slack)
    S = np.zeros((R, nslack))
    for k, (i, s) in enumerate(slack):
        S[i, k] = s
    body = np.hstack([W, S]) * flip[:, None]
    b = rhs * flip

    init_basis = [-1] * R
    for k, (i, _) in enumerate(slack):
        if body[i, nwork + k] > 0:
            init_basis[i] = nwork + k
    need_art = [i for i in range(R) if init_basis[i] < 0]
    nart = len(need_art)
    A_art = np.zeros((R, nart))
    for k, i in enumerate(need_art):
        A_art[i, k] = 1.0
        init_basis[i] = nwork + nslack + k
    ncol = nwork + nslack + nart
    first_art = nwork + nslack

    T = np.zeros((R + 1, ncol + 1))
    T[:R, :nwork + nslack] = body
    T[:R, first_art:ncol] = A_art
    T[:R, -1] = b
    basis = list(init_basis)
    eligible = np.ones(ncol, dtype=bool)
    pivots = 0

    def run(eligible):
        nonlocal pivots
        while True:
            d = T[R, :ncol]
            candidates = np.flatnonzero((d < -COST_TOL) & eligible)
            if candidates.size == 0:
                return "optimal"
            if pivots >= max_pivots:
                raise IterationLimit(f"simplex stopped after {pivots} pivots")
            use_bland = pivots >= bland_after
            if use_bland:
                j = int(candidates[0])
            else:
                j = int(candidates[np.argmin(d[candidates])])
            colj = T[:R, j]
            rows = np.flatnonzero(colj > PIVOT_TOL)
            if rows.size == 0:
                return "unbounded"
            ratios = T[rows, -1] / colj[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
            if use_bland:
                r = int(min(ties, key=lambda i: basis[i]))
            else:
                r = int(ties[np.argmax(colj[ties])])
            _pivot(T, r, j)
            basis[r] = j
            pivots += 1

    if nart:
        T[R, :] = 0.0
        T[R, first_art:ncol] = 1.0
        for i in need_art:
            T[R] -= T[i]
        run(eligible)
        infeas = -T[R, -1]
        if infeas > FEAS_TOL * (1.0 + np.max(np.abs(b), initial=0.0)):
            return LpSolution("infeasible", pivots=pivots)
        # drive artificials out of the basis where possible
        for i in range(R):
            if basis[i] >= first_art:
                row = np.abs(T[i, :first_art])
                k = int(np.argmax(row)) if first_art else 0
                if first_art and row[k] > 1e-9:
                    _pivot(T, i, k)
                    basis[i] = k
                    pivots += 1
        eligible[first_art:] = False

    cost = np.zeros(ncol)
    cost[:nwork] = cw
    T[R, :] = 0.0
    T[R, :ncol] = cost
    for i in range(R):
        if cost[basis[i]] != 0.0:
            T[R] -= cost[basis[i]] * T[i]
    status = run(eligible)
    if status == "unbounded":
        return LpSolution("unbounded", pivots=pivots)

    xw = np.zeros(ncol)
    for i in range(R):
        xw[basis[i]] = T[i, -1]
    xw = np.maximum(xw, 0.0)
    x = shift.copy()
    for k, (j, s) in enumerate(cols):
        x[j] += s * xw[k]

    # multipliers: y = c_B B^{-1}; B^{-1} sits under the initial basis columns
    Binv = T[:R, init_basis]
    y = (cost[basis] @ Binv) * flip
    if lp.sense == "max":
        y = -y
    obj = float(lp.c @ x)
    return LpSolution("optimal", x=x, objective_value=obj, duals=y[:nrow],
                      pivots=pivots, basis=list(basis))


def _pivot(T, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
