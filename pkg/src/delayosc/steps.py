"""Method-of-steps integrator for the delay oscillator.

Works on segments of length 2 tau: segment ``n`` is ``x(2 n tau + s)`` for
``s`` in [-2 tau, 0], so segment 0 is the history and consecutive segments
share an endpoint.  On segment ``n`` the delayed term is the already known
segment ``n - 1``, so

    x_n''(s) = omega^2 x_{n-1}(s) + f(2 n tau + s)

is integrated twice with cumulative Simpson quadrature on a uniform grid,
starting from ``x_{n-1}(0)`` and ``x_{n-1}'(0)``.  Nothing here touches the
delayed exponential; the module is an independent check on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, GridMismatch
from .linalg import integrate
from .solver import DelayProblem

__all__ = [
    "SegmentSolution",
    "AprioriReport",
    "StepTrajectory",
    "integrate_segments",
    "apriori_check",
    "kappa",
    "default_step",
]

GRID_PER_SEGMENT = 512


@dataclass(frozen=True)
class SegmentSolution:
    index: int
    s: np.ndarray
    x: np.ndarray
    dx: np.ndarray

    @property
    def h(self) -> float:
        return float(self.s[1] - self.s[0])

    def times(self, tau: float) -> np.ndarray:
        return 2 * self.index * tau + self.s

    def c1_norm(self) -> float:
        return float(max(np.linalg.norm(self.x, axis=1).max(), np.linalg.norm(self.dx, axis=1).max()))


@dataclass(frozen=True)
class AprioriReport:
    kappa: float
    per_segment: tuple[tuple[int, float, float], ...]
    all_satisfied: bool


def default_step(tau: float) -> float:
    return 2 * tau / GRID_PER_SEGMENT


def kappa(omega_norm: float, tau: float) -> float:
    return 1.0 + (1.0 + 2.0 * tau) * (1.0 + omega_norm**2)


def _grid_count(tau: float, h: float) -> int:
    ratio = 2 * tau / h
    count = round(ratio)
    if count < 2 or abs(ratio - count) > 1e-9 * ratio:
        raise GridMismatch(f"step {h:g} does not divide the segment length 2*tau = {2 * tau:g}")
    return count


def integrate_segments(p: DelayProblem, n_segments: int, h: float | None = None) -> list[SegmentSolution]:
    """Segments 0..n_segments of the mild solution (segment 0 is the history)."""
    tau = p.tau
    if h is None:
        h = default_step(tau)
    count = _grid_count(tau, h)
    if n_segments < 1:
        raise ValueError("n_segments must be positive")
    if n_segments * 2 * tau > p.horizon * (1 + 1e-12):
        raise DomainError(f"{n_segments} segments of length 2*tau overrun the horizon {p.horizon:g}")
    s = np.linspace(-2 * tau, 0.0, count + 1)
    h = float(s[1] - s[0])
    omega2 = p.omega.square
    prev = SegmentSolution(0, s, p.history.value(s), p.history.deriv1(s))
    out = [prev]
    for n in range(1, n_segments + 1):
        accel = prev.x @ omega2.T
        if not p.forcing.is_zero:
            accel = accel + p.forcing(np.clip(2 * n * tau + s, 0.0, None))
        dx = prev.dx[-1] + cumulative_simpson(accel, dx=h, axis=0, initial=0.0)
        x = prev.x[-1] + cumulative_simpson(dx, dx=h, axis=0, initial=0.0)
        # pin the matching conditions exactly
        dx[0], x[0] = prev.dx[-1], prev.x[-1]
        prev = SegmentSolution(n, s, x, dx)
        out.append(prev)
    return out


class StepTrajectory:
    """Segments stitched into one path; off-grid queries use cubic Hermite interpolation."""

    def __init__(self, problem: DelayProblem, segments: list[SegmentSolution]):
        self.problem = problem
        self.segments = segments
        tau = problem.tau
        ts = [segments[0].times(tau)] + [seg.times(tau)[1:] for seg in segments[1:]]
        xs = [segments[0].x] + [seg.x[1:] for seg in segments[1:]]
        dxs = [segments[0].dx] + [seg.dx[1:] for seg in segments[1:]]
        self.times = np.concatenate(ts)
        self.x = np.concatenate(xs)
        self.dx = np.concatenate(dxs)
        self._spline = CubicHermiteSpline(self.times, self.x, self.dx, axis=0)
        self._dspline = self._spline.derivative()

    @classmethod
    def run(cls, problem: DelayProblem, h: float | None = None) -> "StepTrajectory":
        n = max(1, math.ceil(problem.horizon / (2 * problem.tau) - 1e-9))
        # the last segment may run past the horizon; extend it so the grid covers T
        extended = problem.with_(horizon=max(problem.horizon, 2 * n * problem.tau))
        return cls(problem, integrate_segments(extended, n, h))

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if t.size and (t.min() < self.times[0] - 1e-12 or t.max() > self.times[-1] + 1e-12):
            raise DomainError("query outside the integrated range")
        return t

    def value(self, t) -> np.ndarray:
        return self._spline(self._check(t))

    __call__ = value

    def deriv(self, t) -> np.ndarray:
        return self._dspline(self._check(t))


def apriori_check(p: DelayProblem, segments: list[SegmentSolution]) -> AprioriReport:
    """Compare segment C1 norms with ``kappa^n (|phi|_C1 + |f|_L1(0, 2 tau n))``."""
    if not segments:
        raise ValueError("segments must be non-empty")
    tau = p.tau
    k = kappa(p.omega.norm, tau)
    phi_norm = segments[0].c1_norm()
    rows = []
    ok = True
    for seg in segments[1:]:
        n = seg.index
        f_l1 = _forcing_l1(p, 2 * tau * n)
        bound = k**n * (phi_norm + f_l1)
        observed = seg.c1_norm()
        rows.append((n, observed, bound))
        ok = ok and observed <= bound
    return AprioriReport(k, tuple(rows), ok)


def _forcing_l1(p: DelayProblem, upper: float) -> float:
    if p.forcing.is_zero or upper <= 0:
        return 0.0
    return float(integrate(lambda s: np.linalg.norm(p.forcing(s), axis=-1), 0.0, upper,
                           p.forcing.kinks_in(0.0, upper), p.rule, max_width=p.tau))
