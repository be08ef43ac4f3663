"""Problem files and reports.

A problem file is UTF-8 JSON::

    {
      "dimension": 2,
      "grid": {"cartesian": [{"min": -1, "max": 1, "count": 21},
                             {"min": -1, "max": 1, "count": 21}]},
      "function": {"builtin": "product"},
      "basis": {"type": "monomials", "degree": 1},
      "options": {"tol": 1e-9, "max_iter": 500, "seed": 0,
                  "singular_policy": "retry", "retries": 8}
    }

``grid`` is either ``cartesian`` (per axis ``min``, ``max``, ``count``,
expanded with ``numpy.linspace``) or ``explicit`` (a list of points).
Cartesian points are enumerated row-major over the axes in declaration
order: the last axis varies fastest, so point ``k`` of a 2-D grid with
``c1`` points on axis 1 is ``(x0[k // c1], x1[k % c1])``.

``function`` is ``{"builtin": name}`` with name in ``BUILTINS`` or
``{"values": [...]}`` aligned with the grid order.

``basis`` types: ``monomials`` (``degree``), ``trig`` (``order``),
``gaussian`` (``centers``, optional ``c``), ``custom`` (``functions``, a list
of ``{"name": "sin"|"cos"|"gaussian"|"monomial", ...}``) and ``tabulated``
(``values``: one row of n numbers per grid point, optional ``labels``).
"""

import itertools
import json
import re

import numpy as np

from . import bases
from .core import DiscreteDomain, Problem
from .errors import ContractViolation, ProblemFormatError, TableShapeMismatch, UnknownFunction
from .solver import SolveOptions


def _exp(X):
    return np.exp(X.sum(axis=1))


def _runge(X):
    return 1.0 / (1.0 + 25.0 * np.sum(X * X, axis=1))


def _product(X):
    return np.prod(X, axis=1)


def _abs_sum(X):
    return np.sum(np.abs(X), axis=1)


BUILTINS = {
    "exp": _exp,          # exp(x1 + ... + xd)
    "runge": _runge,      # 1 / (1 + 25 |x|^2)
    "product": _product,  # x1 * ... * xd
    "abs-sum": _abs_sum,  # |x1| + ... + |xd|
}

OPTION_KEYS = {"tol", "max_iter", "seed", "singular_policy", "retries"}


class _Source:
    """Raw text kept around to point diagnostics at a line."""

    def __init__(self, text, name):
        self.text = text
        self.name = name

    def fail(self, path, message):
        key = path.split(".")[-1].split("[")[0]
        line = self._line_of(key)
        where = f"{self.name}:{line}: " if line else f"{self.name}: "
        raise ProblemFormatError(f"{where}{path}: {message}")

    def _line_of(self, key):
        m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        if not m:
            return None
        return self.text.count("\n", 0, m.start()) + 1


def _parse_json(text, name):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(
            f"{name}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ProblemFormatError(f"{path}: cannot read: {exc.strerror}") from None


def _require(src, obj, key, path=""):
    if not isinstance(obj, dict):
        src.fail(path or "<root>", "expected an object")
    if key not in obj:
        src.fail(f"{path}.{key}" if path else key, f"missing key '{key}'")
    return obj[key]


def _number(src, value, path, integer=False, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        src.fail(path, "expected a number")
    if integer and int(value) != value:
        src.fail(path, "expected an integer")
    if positive and value <= 0:
        src.fail(path, "must be positive")
    return int(value) if integer else float(value)


def _grid(src, node, dim):
    if not isinstance(node, dict) or len(node) != 1:
        src.fail("grid", "expected exactly one of 'cartesian' or 'explicit'")
    if "cartesian" in node:
        axes = node["cartesian"]
        if not isinstance(axes, list) or len(axes) != dim:
            src.fail("grid.cartesian", f"expected a list of {dim} axis objects")
        coords = []
        for i, ax in enumerate(axes):
            path = f"grid.cartesian[{i}]"
            lo = _number(src, _require(src, ax, "min", path), f"{path}.min")
            hi = _number(src, _require(src, ax, "max", path), f"{path}.max")
            count = _number(src, _require(src, ax, "count", path), f"{path}.count",
                            integer=True, positive=True)
            if count > 1 and not hi > lo:
                src.fail(f"{path}.max", "must exceed min")
            coords.append(np.linspace(lo, hi, count))
        return np.array(list(itertools.product(*coords)), dtype=float).reshape(-1, dim)
    if "explicit" in node:
        pts = node["explicit"]
        try:
            arr = np.array(pts, dtype=float)
        except (TypeError, ValueError):
            src.fail("grid.explicit", "expected a list of numeric points")
        if dim == 1 and arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[1] != dim or arr.shape[0] == 0:
            src.fail("grid.explicit", f"expected a non-empty list of {dim}-dimensional points")
        return arr
    src.fail("grid", "expected 'cartesian' or 'explicit'")


def _values(src, node, points):
    if not isinstance(node, dict):
        src.fail("function", "expected an object")
    if "builtin" in node:
        name = node["builtin"]
        if name not in BUILTINS:
            src.fail("function.builtin",
                     f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
        return BUILTINS[name](points)
    if "values" in node:
        try:
            vals = np.array(node["values"], dtype=float).ravel()
        except (TypeError, ValueError):
            src.fail("function.values", "expected a list of numbers")
        if vals.shape[0] != points.shape[0]:
            src.fail("function.values",
                     f"{vals.shape[0]} values for {points.shape[0]} grid points")
        return vals
    src.fail("function", "expected 'builtin' or 'values'")


def _family(src, node, dim, domain):
    kind = _require(src, node, "type", "basis")
    try:
        if kind == "monomials":
            deg = _number(src, _require(src, node, "degree", "basis"), "basis.degree",
                          integer=True, positive=True)
            return bases.monomials(dim, deg)
        if kind == "trig":
            order = _number(src, _require(src, node, "order", "basis"), "basis.order",
                            integer=True, positive=True)
            return bases.trig(dim, order)
        if kind == "gaussian":
            centers = _require(src, node, "centers", "basis")
            return bases.gaussians(dim, centers, float(node.get("c", 1.0)))
        if kind == "custom":
            fns = _require(src, node, "functions", "basis")
            if not isinstance(fns, list):
                src.fail("basis.functions", "expected a list")
            return bases.custom(dim, fns, labels=node.get("labels"))
        if kind == "tabulated":
            table = _require(src, node, "values", "basis")
            return bases.custom(dim, domain=domain, table=table, labels=node.get("labels"))
    except (UnknownFunction, TableShapeMismatch, ContractViolation,
            KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ProblemFormatError):
            raise
        msg = exc.args[0] if exc.args else type(exc).__name__
        src.fail("basis", f"{type(exc).__name__}: {msg}")
    src.fail("basis.type", f"unknown basis type {kind!r}")


def _options(src, node):
    if node is None:
        return {}
    if not isinstance(node, dict):
        src.fail("options", "expected an object")
    unknown = set(node) - OPTION_KEYS
    if unknown:
        src.fail("options", f"unknown keys {sorted(unknown)}")
    return dict(node)


def parse_problem(text, name="<problem>"):
    """Return ``(Problem, options dict)`` from problem-file text."""
    src = _Source(text, name)
    raw = _parse_json(text, name)
    if not isinstance(raw, dict):
        src.fail("<root>", "expected a JSON object")
    dim = _number(src, _require(src, raw, "dimension"), "dimension",
                  integer=True, positive=True)
    points = _grid(src, _require(src, raw, "grid"), dim)
    values = _values(src, _require(src, raw, "function"), points)
    try:
        domain = DiscreteDomain(points, values)
    except ContractViolation as exc:
        src.fail("grid", str(exc))
    family = _family(src, _require(src, raw, "basis"), dim, domain)
    options = _options(src, raw.get("options"))
    return Problem(domain, family), options


def load_problem(path):
    return parse_problem(read_text(path), str(path))


def solve_options(file_options, tol=None, max_iter=None, seed=None, policy=None,
                  retries=None):
    """Merge file options with command-line overrides."""
    merged = {
        "termination_tol": file_options.get("tol", 1e-9),
        "max_iterations": file_options.get("max_iter", 500),
        "seed": file_options.get("seed", 0),
        "singular_policy": file_options.get("singular_policy", "retry"),
        "retries": file_options.get("retries", 8),
    }
    for key, val in (("termination_tol", tol), ("max_iterations", max_iter),
                     ("seed", seed), ("singular_policy", policy), ("retries", retries)):
        if val is not None:
            merged[key] = val
    try:
        return SolveOptions(**merged)
    except (ContractViolation, TypeError) as exc:
        raise ProblemFormatError(f"options: {exc}") from None


def load_coefficients(path, n):
    """Coefficients from a JSON list or from a report's ``coefficients`` block."""
    text = read_text(path)
    raw = _parse_json(text, str(path))
    if isinstance(raw, dict):
        if "coefficients" not in raw:
            raise ProblemFormatError(f"{path}: coefficients: missing key 'coefficients'")
        raw = raw["coefficients"]
    if not isinstance(raw, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        raise ProblemFormatError(f"{path}: coefficients: expected a list of numbers")
    if len(raw) != n + 1:
        raise ProblemFormatError(
            f"{path}: coefficients: expected {n + 1} values, got {len(raw)}")
    return np.array(raw, dtype=float)


# --------------------------------------------------------------------------
# reports

def _num(x):
    return None if x is None else float(x)


def _nums(a):
    return None if a is None else [float(v) for v in np.ravel(a)]


def certificate_dict(cert):
    from .geometry import Refusal
    if cert is None:
        return None
    if isinstance(cert, Refusal):
        return {"certified": False, "reason": cert.reason, "lp_status": cert.status}
    return {
        "certified": True,
        "E_plus": [int(k) for k in cert.E_plus_indices],
        "E_minus": [int(k) for k in cert.E_minus_indices],
        "u": _nums(cert.u),
        "v": _nums(cert.v),
        "common_point": _nums(cert.common_point),
        "residual": float(cert.residual),
    }


def solve_report(result, problem):
    return {
        "command": "solve",
        "status": result.status,
        "sigma": _num(result.sigma),
        "coefficients": _nums(result.A),
        "labels": ["1", *problem.family.labels],
        "basis": result.basis.as_dict() if result.basis is not None else None,
        "initial_sigma": _num(result.initial_sigma),
        "iterations": [dict(iteration=i + 1, **r.as_dict())
                       for i, r in enumerate(result.iterations)],
        "certificate": certificate_dict(result.certificate),
        "message": result.message,
    }


def dumps(report):
    # json writes floats with repr, the shortest string that round-trips
    return json.dumps(report, indent=2, allow_nan=False) + "\n"
