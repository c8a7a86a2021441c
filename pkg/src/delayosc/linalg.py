"""Dense linear algebra and quadrature primitives.

Everything here works on small dense real matrices (``n`` up to a few
hundred at most).  Matrix-valued results are plain ``numpy`` arrays; the
:class:`Operator` wrapper exists to carry the lazily computed norm and
inverse of the one matrix that parametrises a problem.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
import scipy.linalg

from .errors import InvalidInterval, NonFiniteInput, NonFiniteValue, SingularOperator

__all__ = [
    "Operator",
    "QuadratureRule",
    "operator_norm",
    "inverse",
    "matrix_exp",
    "integrate",
    "quadrature_nodes",
]

# Truncation degree of the Taylor series used by matrix_exp once the argument
# has been scaled below SCALE_TARGET in norm.
SERIES_TERMS = 13
SCALE_TARGET = 0.5
PIVOT_RTOL = 1e-12


class Operator:
    """A dense real square matrix with cached spectral norm and inverse.

    The caches are filled on first access; concurrent first accesses compute
    the same value, so the write is idempotent.
    """

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator entries must be square, got shape {a.shape}")
        a.setflags(write=False)
        self.entries = a

    @classmethod
    def identity(cls, n: int) -> "Operator":
        return cls(np.eye(n))

    @classmethod
    def zero(cls, n: int) -> "Operator":
        return cls(np.zeros((n, n)))

    @classmethod
    def diag(cls, values) -> "Operator":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @functools.cached_property
    def norm(self) -> float:
        if self.dim == 0:
            return 0.0
        if not self.is_finite():
            raise NonFiniteInput("operator has non-finite entries")
        return float(np.linalg.svd(self.entries, compute_uv=False)[0])

    @functools.cached_property
    def inverse(self) -> "Operator":
        return Operator(_invert(self.entries, self.norm))

    @functools.cached_property
    def square(self) -> np.ndarray:
        return self.entries @ self.entries

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.entries)))

    def __neg__(self) -> "Operator":
        return Operator(-self.entries)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.entries @ other.entries)
        return self.entries @ other

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    __hash__ = None

    def __repr__(self):
        return f"Operator({self.entries.tolist()!r})"


def as_operator(a) -> Operator:
    return a if isinstance(a, Operator) else Operator(a)


def operator_norm(a) -> float:
    """Induced Euclidean norm (largest singular value)."""
    return as_operator(a).norm


def _invert(a: np.ndarray, norm: float) -> np.ndarray:
    n = a.shape[0]
    if n == 0:
        return a.copy()
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput("cannot invert a matrix with non-finite entries")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularOperator
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if norm == 0.0 or pivots.min() < PIVOT_RTOL * norm:
        raise SingularOperator(
            f"smallest pivot {pivots.min():.3e} below {PIVOT_RTOL:g}*||A|| = {PIVOT_RTOL * norm:.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), np.eye(n), check_finite=False)


def inverse(a) -> Operator:
    """Inverse of ``a``; cached on the operator.  Raises SingularOperator."""
    return as_operator(a).inverse


def matrix_exp(a, t=1.0) -> np.ndarray:
    """``exp(t * A)`` by scaling and squaring a truncated Taylor series.

    ``t`` may be a scalar or an array of times; the result has shape
    ``t.shape + (n, n)``.
    """
    m = a.entries if isinstance(a, Operator) else np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix_exp needs a square matrix")
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)) or not np.all(np.isfinite(m)):
        raise NonFiniteInput("matrix_exp received a non-finite time or entry")
    n = m.shape[0]
    x = t[..., None, None] * m
    size = np.linalg.norm(m, "fro") * (np.abs(t).max() if t.size else 0.0)
    squarings = max(0, math.ceil(math.log2(size / SCALE_TARGET))) if size > SCALE_TARGET else 0
    x = x / 2.0**squarings

    eye = np.broadcast_to(np.eye(n), x.shape)
    result = eye.copy()
    term = eye.copy()
    for k in range(1, SERIES_TERMS + 1):
        term = term @ x / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


@dataclass(frozen=True)
class QuadratureRule:
    nodes_per_cell: int = 8
    scheme: str = "gauss-legendre"

    def __post_init__(self):
        if not 2 <= self.nodes_per_cell <= 64:
            raise ValueError("nodes_per_cell must lie in [2, 64]")
        if self.scheme not in ("gauss-legendre", "simpson"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")

    @functools.cached_property
    def reference(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on [0, 1]."""
        if self.scheme == "gauss-legendre":
            x, w = np.polynomial.legendre.leggauss(self.nodes_per_cell)
            return (x + 1.0) / 2.0, w / 2.0
        npts = self.nodes_per_cell | 1  # Simpson needs an odd point count
        x = np.linspace(0.0, 1.0, npts)
        w = np.ones(npts)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return x, w / (3.0 * (npts - 1))


DEFAULT_RULE = QuadratureRule()


def _breakpoints(a: float, b: float, knots: Iterable[float], max_width: float | None) -> np.ndarray:
    pts = [a]
    pts.extend(k for k in sorted(knots) if a < k < b)
    pts.append(b)
    if max_width is None:
        return np.array(pts)
    out = [a]
    for lo, hi in zip(pts[:-1], pts[1:]):
        ncell = max(1, math.ceil((hi - lo) / max_width - 1e-12))
        out.extend(np.linspace(lo, hi, ncell + 1)[1:])
    out[-1] = b
    return np.array(out)


def quadrature_nodes(
    a: float,
    b: float,
    knots: Iterable[float] = (),
    rule: QuadratureRule = DEFAULT_RULE,
    max_width: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Composite nodes and weights for [a, b], split at every interior knot.

    Zero-length cells produced by coincident knots are dropped.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidInterval(f"non-finite interval [{a}, {b}]")
    if a > b:
        raise InvalidInterval(f"lower limit {a} exceeds upper limit {b}")
    edges = _breakpoints(a, b, knots, max_width)
    widths = np.diff(edges)
    keep = widths > 0
    lo, widths = edges[:-1][keep], widths[keep]
    x, w = rule.reference
    nodes = (lo[:, None] + widths[:, None] * x[None, :]).ravel()
    weights = (widths[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate(
    g: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    knots: Iterable[float] = (),
    rule: QuadratureRule = DEFAULT_RULE,
    max_width: float | None = None,
):
    """Integrate ``g`` over [a, b] without letting any cell straddle a knot.

    ``g`` is called once with the 1-D array of all quadrature nodes and must
    return either one value per node or an array whose leading axis runs over
    the nodes (vector- or matrix-valued integrands).
    """
    nodes, weights = quadrature_nodes(a, b, knots, rule, max_width)
    if nodes.size == 0:
        probe = np.asarray(g(np.array([a])))
        return np.zeros(probe.shape[1:])
    values = np.asarray(g(nodes), dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue("integrand returned a non-finite sample")
    return np.tensordot(weights, values, axes=(0, 0))
