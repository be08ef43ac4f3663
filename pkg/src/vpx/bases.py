"""Constructors for standard basis families.

Monomials are ordered graded-lexicographically: by total degree, then by
exponent tuple in descending lexicographic order, so for two variables the
degree-two block reads ``x^2, x*y, y^2``.
"""

from itertools import combinations_with_replacement
from math import comb

import numpy as np

from .core import BasisFamily, DiscreteDomain
from .errors import ContractViolation, TableShapeMismatch, UnknownFunction

MAX_FAMILY_SIZE = 10_000

_AXIS_NAMES = "xyz"


def axis_name(i, dim):
    return _AXIS_NAMES[i] if dim <= 3 else f"x{i + 1}"


def grlex_exponents(dim, total_degree):
    """Exponent tuples with 1 <= |alpha| <= total_degree in grlex order."""
    out = []
    for deg in range(1, total_degree + 1):
        block = []
        for axes in combinations_with_replacement(range(dim), deg):
            alpha = [0] * dim
            for a in axes:
                alpha[a] += 1
            block.append(tuple(alpha))
        block.sort(reverse=True)
        out.extend(block)
    return out


def _monomial(alpha):
    def g(pts):
        v = np.ones(pts.shape[0])
        for axis, power in enumerate(alpha):
            for _ in range(power):
                v = v * pts[:, axis]
        return v
    return g


def _monomial_label(alpha):
    dim = len(alpha)
    parts = []
    for axis, power in enumerate(alpha):
        if power == 1:
            parts.append(axis_name(axis, dim))
        elif power > 1:
            parts.append(f"{axis_name(axis, dim)}^{power}")
    return "*".join(parts)


def monomials(dim: int, total_degree: int) -> BasisFamily:
    if dim < 1 or total_degree < 1:
        raise ContractViolation("dim and total_degree must be >= 1")
    count = comb(dim + total_degree, dim) - 1
    if count > MAX_FAMILY_SIZE:
        raise ContractViolation(
            f"{count} monomials exceeds the limit of {MAX_FAMILY_SIZE}")
    exps = grlex_exponents(dim, total_degree)
    return BasisFamily(dim, [_monomial(a) for a in exps],
                       [_monomial_label(a) for a in exps])


def _trig(fn, axis, k):
    def g(pts):
        return fn(k * pts[:, axis])
    return g


def _gaussian(center, c):
    center = np.asarray(center, dtype=float)

    def g(pts):
        diff = pts - center
        return np.exp(-c * np.sum(diff * diff, axis=1))
    return g


def sin_term(dim, axis, k=1.0):
    _check_axis(dim, axis)
    return _trig(np.sin, axis, k), f"sin({_fmt(k)}*{axis_name(axis, dim)})"


def cos_term(dim, axis, k=1.0):
    _check_axis(dim, axis)
    return _trig(np.cos, axis, k), f"cos({_fmt(k)}*{axis_name(axis, dim)})"


def gaussian_term(dim, center, c=1.0):
    center = np.asarray(center, dtype=float).ravel()
    if center.shape[0] != dim:
        raise ContractViolation(f"gaussian center must have {dim} coordinates")
    if c <= 0:
        raise ContractViolation("gaussian width parameter c must be positive")
    label = "gauss(" + ",".join(_fmt(v) for v in center) + f";{_fmt(c)})"
    return _gaussian(center, c), label


def _fmt(v):
    return repr(float(v)).removesuffix(".0")


def _check_axis(dim, axis):
    if not 0 <= axis < dim:
        raise ContractViolation(f"axis {axis} out of range for dimension {dim}")


def trig(dim: int, order: int) -> BasisFamily:
    """sin(k x_i), cos(k x_i) for k = 1..order on every axis."""
    if order < 1:
        raise ContractViolation("order must be >= 1")
    terms = []
    for k in range(1, order + 1):
        for axis in range(dim):
            terms.append(sin_term(dim, axis, k))
            terms.append(cos_term(dim, axis, k))
    return BasisFamily(dim, [t[0] for t in terms], [t[1] for t in terms])


def gaussians(dim: int, centers, c=1.0) -> BasisFamily:
    terms = [gaussian_term(dim, mu, c) for mu in centers]
    return BasisFamily(dim, [t[0] for t in terms], [t[1] for t in terms])


def _term_from_entry(dim, entry):
    name = entry.get("name")
    if name == "sin":
        return sin_term(dim, int(entry.get("axis", 0)), float(entry.get("k", 1.0)))
    if name == "cos":
        return cos_term(dim, int(entry.get("axis", 0)), float(entry.get("k", 1.0)))
    if name == "gaussian":
        return gaussian_term(dim, entry["center"], float(entry.get("c", 1.0)))
    if name == "monomial":
        alpha = tuple(int(p) for p in entry["exponents"])
        if len(alpha) != dim or min(alpha) < 0 or sum(alpha) < 1:
            raise ContractViolation(f"bad monomial exponents {alpha}")
        return _monomial(alpha), _monomial_label(alpha)
    raise UnknownFunction(f"unknown basis function {name!r}")


def tabulated(domain: DiscreteDomain, table, labels=None) -> BasisFamily:
    """Family defined by values at each domain point.

    ``table`` is (m, n): one row per domain point. Evaluation anywhere else
    raises ``KeyError``.
    """
    tab = np.asarray(table, dtype=float)
    if tab.ndim == 1:
        tab = tab[:, None]
    if tab.ndim != 2 or tab.shape[0] != len(domain):
        raise TableShapeMismatch(
            f"table has {tab.shape[0] if tab.ndim else 0} rows, "
            f"domain has {len(domain)} points")
    row_of = {tuple(p): k for k, p in enumerate(domain.points.tolist())}

    def make(col):
        column = tab[:, col].copy()

        def g(pts):
            try:
                rows = [row_of[tuple(p)] for p in pts.tolist()]
            except KeyError as exc:
                raise KeyError(f"point {exc.args[0]} not in tabulated domain") from None
            return column[rows]
        return g

    if labels is None:
        labels = [f"t{i + 1}" for i in range(tab.shape[1])]
    return BasisFamily(domain.dimension, [make(i) for i in range(tab.shape[1])], labels)


def custom(dim: int, entries=None, *, domain=None, table=None, labels=None) -> BasisFamily:
    """Build a family from named expressions or from a table of values.

    ``entries`` is a list of dicts such as ``{"name": "sin", "axis": 0, "k": 2}``,
    ``{"name": "gaussian", "center": [0, 0], "c": 1.0}`` or
    ``{"name": "monomial", "exponents": [1, 2]}``. Alternatively pass
    ``domain`` and ``table`` for a tabulated family.
    """
    if table is not None:
        if domain is None:
            raise ContractViolation("a tabulated family needs its domain")
        if domain.dimension != dim:
            raise ContractViolation("domain dimension does not match")
        return tabulated(domain, table, labels)
    if not entries:
        raise ContractViolation("no basis functions given")
    terms = [_term_from_entry(dim, s) for s in entries]
    names = labels if labels is not None else [t[1] for t in terms]
    return BasisFamily(dim, [t[0] for t in terms], names)
