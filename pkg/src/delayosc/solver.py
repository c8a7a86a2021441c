"""Closed-form solution of x''(t) - omega^2 x(t - 2 tau) = f(t), x = phi on [-2 tau, 0].

The classical representation for ``phi`` in C^2 is

    x(t) = x1(t + tau) phi(-2 tau) + x2(t + 2 tau) phi'(-2 tau)
           + int_{-2 tau}^0 x2(t - s) phi''(s) ds
           + [t >= 0] int_0^t x2(t - s) f(s) ds.

Integrating the ``phi''`` term by parts gives the mild representation that
only needs ``phi`` in C^1:

    x(t) = x1(t + tau) phi(-2 tau) + x2(t) phi'(0)
           + int_{-2 tau}^0 x2'(t - s) phi'(s) ds + [t >= 0] (forced term).

A second mild variant with ``x2(t + 2 tau)`` and a minus sign in front of
the integral is kept behind ``variant="paper"``; it does not reproduce the
step integrator (see ``tests/test_mild_adjudication.py``) and is only
offered for comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .dexp import MAX_HORIZON_FACTOR, DelayedExpEvaluator
from .errors import DomainError, SmoothnessError
from .functions import ForcingFunction, HistoryFunction
from .linalg import DEFAULT_RULE, Operator, QuadratureRule, as_operator, integrate

__all__ = [
    "DelayProblem",
    "Trajectory",
    "MILD_VARIANTS",
    "solve_homogeneous",
    "solve_forced_zero_ic",
    "solve_classical",
    "solve_mild",
    "solve",
]

MILD_VARIANTS = ("derived", "paper")
DEFAULT_MILD_VARIANT = "derived"


@dataclass(eq=False)
class DelayProblem:
    omega: Operator
    tau: float
    history: HistoryFunction
    forcing: ForcingFunction
    horizon: float
    rule: QuadratureRule = field(default=DEFAULT_RULE)

    def __post_init__(self):
        self.omega = as_operator(self.omega)
        self.tau = float(self.tau)
        self.horizon = float(self.horizon)
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise DomainError(f"tau must be positive, got {self.tau}")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if self.history.tau != self.tau:
            raise DomainError(f"history tau {self.history.tau} differs from problem tau {self.tau}")
        n = self.omega.dim
        if self.history.dim != n or self.forcing.dim != n:
            raise DomainError(
                f"dimension mismatch: omega {n}, history {self.history.dim}, forcing {self.forcing.dim}"
            )
        if self.horizon + 2 * self.tau > MAX_HORIZON_FACTOR * self.tau:
            raise DomainError(
                f"horizon {self.horizon:g} exceeds {MAX_HORIZON_FACTOR - 2}*tau; use a larger tau or shorter horizon"
            )
        self.forcing.check_horizon(self.horizon)

    @cached_property
    def evaluator(self) -> DelayedExpEvaluator:
        return DelayedExpEvaluator(self.omega, self.tau)

    @property
    def dim(self) -> int:
        return self.omega.dim

    def check_time(self, t: float) -> float:
        t = float(t)
        eps = 1e-12 * max(self.horizon, self.tau)
        if not (-2 * self.tau - eps <= t <= self.horizon + eps):
            raise DomainError(f"t = {t} outside [-2*tau, T] = [{-2 * self.tau:g}, {self.horizon:g}]")
        return min(max(t, -2 * self.tau), self.horizon)

    def shift_knots(self, t: float, lo: float, hi: float) -> list[float]:
        """Points ``s`` in (lo, hi) where ``t - s`` is a multiple of tau."""
        tau = self.tau
        k_lo = math.ceil((t - hi) / tau - 1e-12)
        k_hi = math.floor((t - lo) / tau + 1e-12)
        return [t - k * tau for k in range(k_lo, k_hi + 1) if lo < t - k * tau < hi]

    def with_(self, **changes) -> "DelayProblem":
        fields = dict(omega=self.omega, tau=self.tau, history=self.history, forcing=self.forcing,
                      horizon=self.horizon, rule=self.rule)
        fields.update(changes)
        return DelayProblem(**fields)

    def __eq__(self, other):
        if not isinstance(other, DelayProblem):
            return NotImplemented
        return (self.omega == other.omega and self.tau == other.tau and self.history == other.history
                and self.forcing == other.forcing and self.horizon == other.horizon
                and self.rule == other.rule)

    __hash__ = None


# -- integral pieces -----------------------------------------------------------

def _history_integral(p: DelayProblem, t: float, kernel, weight) -> np.ndarray:
    """``int_{-2 tau}^0 kernel(t - s) weight(s) ds``."""
    lo, hi = -2 * p.tau, 0.0
    knots = sorted(set(p.shift_knots(t, lo, hi)) | set(p.history.knots))

    def g(s):
        return np.einsum("mab,mb->ma", kernel(t - s), weight(s))

    return integrate(g, lo, hi, knots, p.rule)


def _forced_integral(p: DelayProblem, t: float, kernel) -> np.ndarray:
    """``int_0^t kernel(t - s) f(s) ds``, zero for ``t <= 0``."""
    if t <= 0.0 or p.forcing.is_zero:
        return np.zeros(p.dim)
    knots = sorted(set(p.shift_knots(t, 0.0, t)) | set(p.forcing.kinks_in(0.0, t)))

    def g(s):
        return np.einsum("mab,mb->ma", kernel(t - s), p.forcing(s))

    return integrate(g, 0.0, t, knots, p.rule, max_width=p.tau)


def _require_c2(p: DelayProblem):
    if p.history.smoothness != "C2":
        raise SmoothnessError("classical representation needs a C2 history (phi'' unavailable)")


# -- representations ------------------------------------------------------------

def solve_homogeneous(p: DelayProblem, t: float) -> np.ndarray:
    """Response to the history alone (forcing ignored)."""
    _require_c2(p)
    t = p.check_time(t)
    ev, tau, h = p.evaluator, p.tau, p.history
    return (ev.x1(t + tau) @ h.value(-2 * tau)
            + ev.x2(t + 2 * tau) @ h.deriv1(-2 * tau)
            + _history_integral(p, t, ev.x2, h.deriv2))


def solve_forced_zero_ic(p: DelayProblem, t: float) -> np.ndarray:
    """Response to the forcing with zero history; zero for ``t < 0``."""
    t = p.check_time(t)
    return _forced_integral(p, t, p.evaluator.x2)


def solve_classical(p: DelayProblem, t: float) -> np.ndarray:
    return solve_homogeneous(p, t) + solve_forced_zero_ic(p, t)


def solve_mild(p: DelayProblem, t: float, variant: str = DEFAULT_MILD_VARIANT) -> np.ndarray:
    if variant not in MILD_VARIANTS:
        raise ValueError(f"unknown mild variant {variant!r}; expected one of {MILD_VARIANTS}")
    t = p.check_time(t)
    ev, tau, h = p.evaluator, p.tau, p.history
    x2_prime = lambda u: ev.x2(u, order=1)  # noqa: E731
    if variant == "derived":
        head = ev.x2(t) @ h.deriv1(0.0)
        integral = _history_integral(p, t, x2_prime, h.deriv1)
    else:
        head = ev.x2(t + 2 * tau) @ h.deriv1(0.0)
        integral = -_history_integral(p, t, x2_prime, h.deriv1)
    return ev.x1(t + tau) @ h.value(-2 * tau) + head + integral + _forced_integral(p, t, ev.x2)


# -- derivatives ------------------------------------------------------------------

def _classical_velocity(p: DelayProblem, t: float) -> np.ndarray:
    _require_c2(p)
    ev, tau, h = p.evaluator, p.tau, p.history
    if t < 0.0:
        return h.deriv1(t)
    x2_prime = lambda u: ev.x2(u, order=1)  # noqa: E731
    return (ev.x1(t + tau, order=1) @ h.value(-2 * tau)
            + x2_prime(t + 2 * tau) @ h.deriv1(-2 * tau)
            + _history_integral(p, t, x2_prime, h.deriv2)
            + _forced_integral(p, t, x2_prime))


def _mild_velocity(p: DelayProblem, t: float, variant: str) -> np.ndarray:
    ev, tau, h = p.evaluator, p.tau, p.history
    if t < 0.0:
        return h.deriv1(t)
    x2_prime = lambda u: ev.x2(u, order=1)  # noqa: E731
    x2_second = lambda u: ev.x2(u, order=2)  # noqa: E731
    if variant == "derived":
        head = x2_prime(t) @ h.deriv1(0.0)
        integral = _history_integral(p, t, x2_second, h.deriv1)
    else:
        head = x2_prime(t + 2 * tau) @ h.deriv1(0.0)
        integral = -_history_integral(p, t, x2_second, h.deriv1)
    return (ev.x1(t + tau, order=1) @ h.value(-2 * tau) + head + integral
            + _forced_integral(p, t, x2_prime))


# -- trajectories -------------------------------------------------------------------

class Trajectory:
    """Solution path on [-2 tau, T] with value and derivative queries.

    ``form`` selects the representation: ``"classical"`` (needs a C2
    history) or ``"mild"``.  Values on [-2 tau, 0) come from the
    representation itself, not from the history, so the initial condition
    is reproduced rather than imposed.
    """

    def __init__(self, problem: DelayProblem, form: str = "mild", variant: str = DEFAULT_MILD_VARIANT):
        if form not in ("classical", "mild"):
            raise ValueError(f"unknown form {form!r}")
        if form == "classical":
            _require_c2(problem)
        self.problem = problem
        self.form = form
        self.variant = variant

    @property
    def segment_knots(self) -> np.ndarray:
        p = self.problem
        return p.evaluator.knots(-2 * p.tau, p.horizon)

    def value(self, t: float) -> np.ndarray:
        if self.form == "classical":
            return solve_classical(self.problem, t)
        return solve_mild(self.problem, t, self.variant)

    __call__ = value

    def deriv(self, t: float) -> np.ndarray:
        t = self.problem.check_time(t)
        if self.form == "classical":
            return _classical_velocity(self.problem, t)
        return _mild_velocity(self.problem, t, self.variant)

    def sample(self, ts) -> tuple[np.ndarray, np.ndarray]:
        ts = np.asarray(ts, dtype=float)
        xs = np.array([self.value(t) for t in ts]).reshape(ts.size, self.problem.dim)
        dxs = np.array([self.deriv(t) for t in ts]).reshape(ts.size, self.problem.dim)
        return xs, dxs


def solve(problem: DelayProblem, form: str = "mild", variant: str = DEFAULT_MILD_VARIANT) -> Trajectory:
    return Trajectory(problem, form, variant)
