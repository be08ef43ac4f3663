"""Problem representation, model evaluation and residual bookkeeping.

The model is ``L(A, x) = a0 + sum_i a_i g_i(x)`` and the residual convention is
``r = f - L`` everywhere.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ContractViolation

# A basis function maps an (m, d) array of points to an (m,) array of values.
BasisFunction = Callable[[np.ndarray], np.ndarray]


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class DiscreteDomain:
    """Finite point set with sampled target values, index aligned."""

    def __init__(self, points, values):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ContractViolation("points must be a non-empty (m, d) array")
        vals = np.asarray(values, dtype=float).ravel()
        if vals.shape[0] != pts.shape[0]:
            raise ContractViolation(
                f"{vals.shape[0]} values for {pts.shape[0]} points")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(vals))):
            raise ContractViolation("points and values must be finite")
        if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
            raise ContractViolation("domain points must be pairwise distinct")
        self.points = _frozen(pts)
        self.values = _frozen(vals)

    @classmethod
    def from_function(cls, points, f):
        """Sample ``f`` (taking an (m, d) array) on ``points``."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        return cls(pts, f(pts))

    @property
    def dimension(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"DiscreteDomain(m={len(self)}, d={self.dimension})"


class BasisFamily:
    """The functions g_1..g_n. The constant term is never a member."""

    def __init__(self, dimension: int, functions: Sequence[BasisFunction],
                 labels: Sequence[str] | None = None):
        if dimension < 1:
            raise ContractViolation("dimension must be positive")
        if len(functions) < 1:
            raise ContractViolation("a basis family needs at least one function")
        if labels is None:
            labels = [f"g{i + 1}" for i in range(len(functions))]
        if len(labels) != len(functions):
            raise ContractViolation("one label per function required")
        self.dimension = int(dimension)
        self.functions = tuple(functions)
        self.labels = tuple(labels)

    @property
    def n(self):
        return len(self.functions)

    def __len__(self):
        return self.n

    def evaluate(self, points) -> np.ndarray:
        """Return the (m, n) matrix of g_i at each point (no leading one)."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1) if pts.shape[0] == self.dimension else pts[:, None]
        if pts.shape[1] != self.dimension:
            raise ContractViolation(
                f"points have dimension {pts.shape[1]}, family expects {self.dimension}")
        out = np.empty((pts.shape[0], self.n))
        for i, g in enumerate(self.functions):
            out[:, i] = np.broadcast_to(g(pts), (pts.shape[0],))
        return out

    def lift(self, points) -> np.ndarray:
        """(1, g_1(x), ..., g_n(x)) per row."""
        g = self.evaluate(points)
        return np.hstack([np.ones((g.shape[0], 1)), g])

    def __repr__(self):
        return f"BasisFamily(d={self.dimension}, labels={list(self.labels)})"


@dataclass(eq=False)
class Problem:
    """A domain paired with a basis family; caches the lifted design matrix."""

    domain: DiscreteDomain
    family: BasisFamily
    _g: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.domain.dimension != self.family.dimension:
            raise ContractViolation(
                f"domain dimension {self.domain.dimension} != "
                f"family dimension {self.family.dimension}")
        self._g = _frozen(self.family.evaluate(self.domain.points))

    @property
    def n(self):
        return self.family.n

    @property
    def m(self):
        return len(self.domain)

    @property
    def g(self) -> np.ndarray:
        """(m, n) basis values at the domain points."""
        return self._g

    @property
    def values(self):
        return self.domain.values

    def model_values(self, A) -> np.ndarray:
        A = as_coefficients(A, self.n)
        return A[0] + self._g @ A[1:]


def as_coefficients(A, n) -> np.ndarray:
    a = np.asarray(A, dtype=float).ravel()
    if a.shape[0] != n + 1:
        raise ContractViolation(f"expected {n + 1} coefficients, got {a.shape[0]}")
    return a


def evaluate_model(A, family: BasisFamily, x) -> float:
    A = as_coefficients(A, family.n)
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != family.dimension:
        raise ContractViolation(
            f"point has dimension {x.shape[0]}, family expects {family.dimension}")
    g = family.evaluate(x.reshape(1, -1))[0]
    return float(A[0] + g @ A[1:])


@dataclass(frozen=True, eq=False)
class DeviationProfile:
    residuals: np.ndarray
    max_abs: float
    argmax_index: int

    @classmethod
    def from_residuals(cls, residuals):
        r = _frozen(residuals)
        k = int(np.argmax(np.abs(r)))  # first occurrence on ties
        return cls(r, float(abs(r[k])), k)


def deviation_profile(A, problem: Problem) -> DeviationProfile:
    return DeviationProfile.from_residuals(problem.values - problem.model_values(A))


def default_extreme_tol(max_abs):
    return 1e-9 * max(1.0, max_abs)


def extreme_sets(profile: DeviationProfile, tol=None):
    """Indices of maximal positive and maximal negative deviation.

    ``tol`` defaults to ``1e-9 * max(1, max_abs)``.
    """
    if tol is None:
        tol = default_extreme_tol(profile.max_abs)
    if tol < 0:
        raise ContractViolation("tol must be non-negative")
    r = profile.residuals
    level = profile.max_abs - tol
    e_plus = np.flatnonzero(r >= level).tolist()
    e_minus = np.flatnonzero(r <= -level).tolist()
    return e_plus, e_minus
