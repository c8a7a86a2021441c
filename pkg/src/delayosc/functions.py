"""Initial-history and forcing functions.

Both are vector valued and vectorised: called with a scalar time they
return an ``(d,)`` array, called with a 1-D array of ``m`` times they
return ``(m, d)``.  Each object remembers the analytic family and
parameters it was built from (``family``), which is what config
round-tripping and equality compare.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, SmoothnessError

__all__ = ["HistoryFunction", "ForcingFunction", "family_functions"]

_EDGE_RTOL = 1e-12


def _freeze(x):
    if isinstance(x, np.ndarray):
        return _freeze(x.tolist())
    if isinstance(x, (list, tuple)):
        return tuple(_freeze(v) for v in x)
    if isinstance(x, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in x.items()))
    return x


def _as_rows(coeffs, name: str) -> np.ndarray:
    arr = np.array(coeffs, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be a non-empty vector or a list of per-component lists")
    return arr


def _vector(x, d) -> np.ndarray:
    v = np.broadcast_to(np.asarray(x, dtype=float), (d,)).copy()
    return v


def family_functions(kind: str, params: dict) -> tuple[int, list[Callable]]:
    """Value and first two derivatives for one of the closed analytic families.

    ``polynomial``: ``coefficients[i][k]`` multiplies ``t**k`` in component i.
    ``trig``: ``offset + amplitude * sin(frequency * t + phase)`` per component.
    ``constant``: ``value``.
    ``zero``: needs ``dim``.
    """
    if kind == "zero":
        d = int(params["dim"])
        return d, [_const(np.zeros(d))] * 3
    if kind == "constant":
        v = np.atleast_1d(np.array(params["value"], dtype=float))
        return v.size, [_const(v), _const(np.zeros(v.size)), _const(np.zeros(v.size))]
    if kind == "polynomial":
        c = _as_rows(params["coefficients"], "coefficients")
        # columns of cs are the components; rows are ascending powers
        cs = [c.T]
        for _ in range(2):
            prev = cs[-1]
            cs.append(np.polynomial.polynomial.polyder(prev, axis=0) if prev.shape[0] > 1
                      else np.zeros_like(prev))
        return c.shape[0], [_poly(ci) for ci in cs]
    if kind == "trig":
        amp = np.atleast_1d(np.array(params["amplitude"], dtype=float))
        d = amp.size
        freq = _vector(params.get("frequency", 1.0), d)
        phase = _vector(params.get("phase", 0.0), d)
        offset = _vector(params.get("offset", 0.0), d)

        def value(t):
            return offset + amp * np.sin(freq * t[..., None] + phase)

        def d1(t):
            return amp * freq * np.cos(freq * t[..., None] + phase)

        def d2(t):
            return -amp * freq**2 * np.sin(freq * t[..., None] + phase)

        return d, [value, d1, d2]
    raise ValueError(f"unknown function family {kind!r}")


def _const(v: np.ndarray) -> Callable:
    def f(t):
        return np.broadcast_to(v, t.shape + v.shape).copy()
    return f


def _poly(c: np.ndarray) -> Callable:
    def f(t):
        return np.moveaxis(np.polynomial.polynomial.polyval(t, c), -1, 0) if t.ndim else \
            np.polynomial.polynomial.polyval(t, c)
    return f


def _call(fn: Callable, t, d: int) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    out = np.asarray(fn(np.atleast_1d(arr)), dtype=float).reshape(arr.size, d)
    return out[0] if arr.ndim == 0 else out.reshape(arr.shape + (d,))


class HistoryFunction:
    """Initial data on [-2 tau, 0] together with its derivatives.

    ``kind`` is ``"analytic"`` (closed-form callables) or ``"sampled"``
    (cubic Hermite interpolation of value/derivative pairs on a uniform
    grid).  ``deriv2`` is only available for ``smoothness == "C2"``.
    """

    def __init__(self, tau: float, dim: int, value: Callable, deriv1: Callable,
                 deriv2: Callable | None = None, *, kind: str = "analytic",
                 family: tuple | None = None, knots: Sequence[float] = ()):
        if not (math.isfinite(tau) and tau > 0):
            raise DomainError(f"tau must be positive, got {tau}")
        self.tau = float(tau)
        self.dim = int(dim)
        self.kind = kind
        self.smoothness = "C2" if deriv2 is not None else "C1"
        self._fns = (value, deriv1, deriv2)
        self.family = family
        self.knots = tuple(float(k) for k in knots)

    # -- construction ---------------------------------------------------------

    @classmethod
    def analytic(cls, tau: float, kind: str, **params) -> "HistoryFunction":
        d, (v, d1, d2) = family_functions(kind, params)
        return cls(tau, d, v, d1, d2, family=(kind, _freeze(params)))

    @classmethod
    def linear(cls, tau: float, x0, x1) -> "HistoryFunction":
        """``phi(t) = x0 + t * x1``."""
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        x1 = np.atleast_1d(np.asarray(x1, dtype=float))
        return cls.analytic(tau, "polynomial", coefficients=np.stack([x0, x1], axis=1).tolist())

    @classmethod
    def from_callables(cls, tau: float, dim: int, value, deriv1, deriv2=None) -> "HistoryFunction":
        """Wrap vectorised user callables (no family, so no config round-trip)."""
        return cls(tau, dim, value, deriv1, deriv2)

    @classmethod
    def sampled(cls, tau: float, times, values, derivs, *, smoothness: str = "C1") -> "HistoryFunction":
        """Cubic Hermite history from ``(value, derivative)`` samples.

        The grid must be uniform, cover exactly [-2 tau, 0], have at least
        five points and spacing at most tau/2.  With ``smoothness="C2"`` the
        second derivative of the interpolant (piecewise linear, jumping at
        grid points) is exposed as ``deriv2``.
        """
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        derivs = np.asarray(derivs, dtype=float)
        if values.ndim == 1:
            values, derivs = values[:, None], derivs[:, None]
        if times.size < 5:
            raise ValueError("sampled history needs at least 5 grid points")
        spacing = np.diff(times)
        if not np.allclose(spacing, spacing[0], rtol=1e-9, atol=0):
            raise ValueError("sampled history grid must be uniform")
        if spacing[0] > tau / 2 * (1 + 1e-12):
            raise ValueError("sampled history spacing must not exceed tau/2")
        if abs(times[0] + 2 * tau) > 1e-12 * tau or abs(times[-1]) > 1e-12 * tau:
            raise ValueError("sampled history grid must span exactly [-2*tau, 0]")
        if values.shape != derivs.shape or values.shape[0] != times.size:
            raise ValueError("values and derivs must have one row per grid point")
        spline = CubicHermiteSpline(times, values, derivs, axis=0)
        d1 = spline.derivative(1)
        d2 = spline.derivative(2) if smoothness == "C2" else None
        family = ("samples", _freeze({"times": times, "values": values, "derivs": derivs,
                                      "smoothness": smoothness}))
        return cls(tau, values.shape[1], spline, d1, d2, kind="sampled", family=family,
                   knots=times[1:-1])

    def resample(self, npoints: int, *, smoothness: str = "C1") -> "HistoryFunction":
        """Sampled copy of this history on ``npoints`` uniform grid points."""
        ts = np.linspace(-2 * self.tau, 0.0, npoints)
        return HistoryFunction.sampled(self.tau, ts, self.value(ts), self.deriv1(ts), smoothness=smoothness)

    # -- evaluation -------------------------------------------------------------

    def _check(self, t):
        arr = np.asarray(t, dtype=float)
        eps = _EDGE_RTOL * self.tau
        if arr.size and (arr.min() < -2 * self.tau - eps or arr.max() > eps):
            raise DomainError(f"history queried outside [-2*tau, 0] = [{-2 * self.tau:g}, 0]")
        return np.clip(arr, -2 * self.tau, 0.0)

    def value(self, t):
        return _call(self._fns[0], self._check(t), self.dim)

    __call__ = value

    def deriv1(self, t):
        return _call(self._fns[1], self._check(t), self.dim)

    def deriv2(self, t):
        if self._fns[2] is None:
            raise SmoothnessError("history has no second derivative (smoothness C1)")
        return _call(self._fns[2], self._check(t), self.dim)

    def c1_norm(self, npoints: int = 1025) -> float:
        """Grid sup of max(|phi|, |phi'|) over [-2 tau, 0], plus the grid knots."""
        ts = np.union1d(np.linspace(-2 * self.tau, 0.0, npoints), self.knots)
        return float(max(np.linalg.norm(self.value(ts), axis=-1).max(),
                         np.linalg.norm(self.deriv1(ts), axis=-1).max()))

    def __eq__(self, other):
        if not isinstance(other, HistoryFunction):
            return NotImplemented
        if self.family is None or other.family is None:
            return self is other
        return (self.tau, self.dim, self.family) == (other.tau, other.dim, other.family)

    __hash__ = None

    def __repr__(self):
        name = self.family[0] if self.family else "callable"
        return f"HistoryFunction(tau={self.tau}, dim={self.dim}, family={name!r})"


class ForcingFunction:
    """Right-hand side ``f`` on [0, T] with its known non-smooth points."""

    def __init__(self, dim: int, fn: Callable, kink_times: Sequence[float] = (), *,
                 continuity: str = "C0", family: tuple | None = None, is_zero: bool = False):
        if continuity not in ("C0", "L1"):
            raise ValueError("continuity must be 'C0' or 'L1'")
        self.dim = int(dim)
        self._fn = fn
        self.kink_times = tuple(sorted(float(k) for k in kink_times))
        self.continuity = continuity
        self.family = family
        self.is_zero = is_zero

    @classmethod
    def zero(cls, dim: int) -> "ForcingFunction":
        return cls.analytic("zero", dim=dim)

    @classmethod
    def analytic(cls, kind: str, kinks: Sequence[float] = (), **params) -> "ForcingFunction":
        d, (v, _, _) = family_functions(kind, params)
        return cls(d, v, kinks, family=(kind, _freeze(params)), is_zero=(kind == "zero"))

    @classmethod
    def from_callable(cls, dim: int, fn: Callable, kink_times: Sequence[float] = (),
                      continuity: str = "C0") -> "ForcingFunction":
        return cls(dim, fn, kink_times, continuity=continuity)

    def __call__(self, t):
        return _call(self._fn, t, self.dim)

    def kinks_in(self, lo: float, hi: float) -> list[float]:
        return [k for k in self.kink_times if lo < k < hi]

    def check_horizon(self, horizon: float):
        if any(k < 0 or k > horizon for k in self.kink_times):
            raise DomainError("forcing kink times must lie within [0, T]")

    def __eq__(self, other):
        if not isinstance(other, ForcingFunction):
            return NotImplemented
        if self.family is None or other.family is None:
            return self is other
        return (self.dim, self.family, self.kink_times, self.continuity) == \
            (other.dim, other.family, other.kink_times, other.continuity)

    __hash__ = None

    def __repr__(self):
        name = self.family[0] if self.family else "callable"
        return f"ForcingFunction(dim={self.dim}, family={name!r}, kinks={list(self.kink_times)})"
