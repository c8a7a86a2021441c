"""Quantitative checks of the small-delay estimates.

Compares the delayed exponential with ``e^{omega t}`` and delay solutions
with the no-delay oscillator, next to the a priori constants

    alpha    = 1 + |omega| e^{tau0 |omega|}
    beta(T)  = 2 (1 + |omega|)(1 + |omega^-1|) e^{alpha (T + 2 tau) |omega|}
    delta(T) = |omega|^2 (2 + |omega^-1| + |omega^-1| T) e^{|omega| T}
    kappa    = 1 + (1 + 2 tau)(1 + |omega|^2)

All sup norms are grid sups over [0, T] (uniform grid plus every multiple
of tau in range).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .classical import ClassicalProblem
from .dexp import DelayedExpEvaluator
from .errors import DomainError, SingularOperator, SlopeUndefined
from .functions import HistoryFunction
from .linalg import Operator, as_operator, integrate, matrix_exp
from .solver import DelayProblem, Trajectory
from .steps import kappa as kappa_constant

__all__ = [
    "BoundsConstants",
    "CheckRow",
    "ConvergenceRow",
    "ConvergenceTable",
    "bounds_constants",
    "lemma_check",
    "corollary_check",
    "solution_convergence_study",
    "fit_slope",
    "ZERO_ERROR",
]

ZERO_ERROR = 1e-13
MIN_GRID = 512


@dataclass(frozen=True)
class BoundsConstants:
    alpha: float
    beta: float
    delta: float
    kappa: float
    tau0: float
    T: float
    tau: float


def _inverse_norm(omega: Operator, allow_singular: bool) -> float:
    try:
        return omega.inverse.norm
    except SingularOperator:
        if allow_singular:
            return math.inf
        raise


def bounds_constants(omega, tau: float, tau0: float, T: float, *, allow_singular: bool = False) -> BoundsConstants:
    """All four constants for one ``(tau, T)`` pair.

    ``beta`` and ``delta`` need ``|omega^-1|``; a singular ``omega`` raises
    SingularOperator unless ``allow_singular``, in which case they are
    reported as infinite (a zero ``omega`` gives ``delta = 0``).
    """
    omega = as_operator(omega)
    w = omega.norm
    alpha = 1.0 + w * math.exp(tau0 * w)
    inv = _inverse_norm(omega, allow_singular)
    beta = 2.0 * (1.0 + w) * (1.0 + inv) * math.exp(alpha * (T + 2.0 * tau) * w)
    delta = 0.0 if w == 0.0 else w**2 * (2.0 + inv + inv * T) * math.exp(w * T)
    return BoundsConstants(alpha, beta, delta, kappa_constant(w, tau), tau0, T, tau)


def _grid(T: float, n: int, tau: float, shift: float = 0.0) -> np.ndarray:
    """Uniform grid on [0, T] plus the points where ``t + shift`` is a multiple of tau."""
    k0 = math.ceil(shift / tau - 1e-12)
    k1 = math.floor((T + shift) / tau + 1e-12)
    knots = tau * np.arange(k0, k1 + 1) - shift
    knots = knots[(knots >= 0) & (knots <= T)]
    return np.union1d(np.linspace(0.0, T, n), knots)


def _spectral(m: np.ndarray) -> np.ndarray:
    return np.linalg.norm(m, ord=2, axis=(-2, -1))


@dataclass(frozen=True)
class CheckRow:
    tau: float
    observed: float
    bound: float
    satisfied: bool
    alpha: float
    gamma: float | None = None


def _check_args(tau, tau0, T, grid):
    if not (tau > 0 and tau0 > 0 and T > 0):
        raise DomainError("tau, tau0 and T must be positive")
    if tau > tau0:
        raise DomainError(f"tau = {tau} exceeds tau0 = {tau0}")
    if grid < 16:
        raise DomainError("grid must have at least 16 points")


def lemma_check(omega, tau: float, tau0: float, T: float, grid: int = MIN_GRID) -> CheckRow:
    """max_t |exp_tau(t - tau) - e^{omega t}| against ``tau e^{alpha T |omega|}``."""
    _check_args(tau, tau0, T, grid)
    omega = as_operator(omega)
    w = omega.norm
    alpha = 1.0 + w * math.exp(tau0 * w)
    ts = _grid(T, grid, tau, shift=-tau)
    ev = DelayedExpEvaluator(omega, tau)
    observed = float(_spectral(ev.exp(ts - tau) - matrix_exp(omega, ts)).max())
    bound = tau * math.exp(alpha * T * w)
    return CheckRow(tau, observed, bound, observed <= bound, alpha)


def corollary_check(omega, tau: float, tau0: float, gamma: float, T: float, grid: int = MIN_GRID) -> CheckRow:
    """max_t |exp_tau(t + gamma) - e^{omega t}| against the shifted bound."""
    _check_args(tau, tau0, T, grid)
    if gamma < 0:
        raise DomainError("gamma must be non-negative")
    omega = as_operator(omega)
    w = omega.norm
    alpha = 1.0 + w * math.exp(tau0 * w)
    ts = _grid(T, grid, tau, shift=gamma)
    ev = DelayedExpEvaluator(omega, tau)
    observed = float(_spectral(ev.exp(ts + gamma) - matrix_exp(omega, ts)).max())
    bound = (gamma + tau) * (1.0 + w) * math.exp(alpha * (T + gamma + tau) * w)
    return CheckRow(tau, observed, bound, observed <= bound, alpha, gamma)


@dataclass(frozen=True)
class ConvergenceRow:
    tau: float
    sup_error_c0: float
    sup_error_c1: float
    lemma_bound: float
    theorem_bound: float
    corollary_bound: float
    satisfied: bool


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple[ConvergenceRow, ...]
    fitted_slope: float | None
    exact_agreement: bool
    constants: tuple[BoundsConstants, ...]


def fit_slope(taus: Sequence[float], errors: Sequence[float]) -> tuple[float | None, bool]:
    """Least-squares slope of log(error) against log(tau).

    Rows with error below ZERO_ERROR are dropped.  Returns ``(None, True)``
    when every row is numerically zero.
    """
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if taus.size < 3:
        raise SlopeUndefined("need >= 3 tau values for slope")
    keep = errors >= ZERO_ERROR
    if not keep.any():
        return None, True
    if keep.sum() < 2:
        raise SlopeUndefined("fewer than two non-zero errors; slope undefined")
    slope, _ = np.polyfit(np.log(taus[keep]), np.log(errors[keep]), 1)
    return float(slope), False


def linear_history(x0, x1) -> Callable[[float], HistoryFunction]:
    """History family ``phi(t; tau) = x0 + t x1`` (exact initial slope)."""
    return lambda tau: HistoryFunction.linear(tau, x0, x1)


def _l1(base: ClassicalProblem) -> float:
    f = base.forcing
    if f.is_zero:
        return 0.0
    return float(integrate(lambda s: np.linalg.norm(f(s), axis=-1), 0.0, base.horizon,
                           f.kinks_in(0.0, base.horizon), base.rule, max_width=0.25))


def solution_convergence_study(
    base: ClassicalProblem,
    taus: Sequence[float],
    tau0: float | None = None,
    history_builder: Callable[[float], HistoryFunction] | None = None,
    grid: int = MIN_GRID,
    form: str = "mild",
) -> ConvergenceTable:
    """Distance between delay solutions and the no-delay solution as tau shrinks."""
    taus = sorted((float(t) for t in taus), reverse=True)
    if len(taus) < 3:
        raise SlopeUndefined("need >= 3 tau values for slope")
    if tau0 is None:
        tau0 = taus[0]
    if grid < MIN_GRID:
        raise DomainError(f"grid must have at least {MIN_GRID} points")
    if history_builder is None:
        history_builder = linear_history(base.x0, base.x1)
    omega, T = base.omega, base.horizon
    w = omega.norm
    f_l1 = _l1(base)

    rows, consts = [], []
    for tau in taus:
        if tau > tau0:
            raise DomainError(f"tau = {tau} exceeds tau0 = {tau0}")
        hist = history_builder(tau)
        problem = DelayProblem(omega, tau, hist, base.forcing, T, base.rule)
        traj = Trajectory(problem, form)
        ts = _grid(T, grid, tau)
        err0 = err1 = 0.0
        for t in ts:
            dx = np.linalg.norm(traj.value(t) - base.solution(t))
            dv = np.linalg.norm(traj.deriv(t) - base.velocity(t))
            err0 = max(err0, dx)
            err1 = max(err1, dx, dv)

        c = bounds_constants(omega, tau, tau0, T, allow_singular=True)
        consts.append(c)
        mismatch = (np.linalg.norm(hist.value(-2 * tau) - base.x0)
                    + np.linalg.norm(hist.deriv1(0.0) - base.x1))
        phi_c1 = hist.c1_norm()
        c0_bound = _finite_product(3.0 * c.beta, mismatch + tau * (phi_c1 + f_l1))
        c1_bound = _finite_product(
            3.0 * (1.0 + c.beta) * (1.0 + c.delta) * (1.0 + T),
            mismatch + tau * (phi_c1 + f_l1 + np.linalg.norm(base.x0) + np.linalg.norm(base.x1)),
        )
        lemma = tau * math.exp(c.alpha * T * w)
        rows.append(ConvergenceRow(tau, float(err0), float(err1), lemma, c0_bound, c1_bound,
                                   bool(err0 <= c0_bound and err1 <= c1_bound)))

    slope, exact = fit_slope([r.tau for r in rows], [r.sup_error_c0 for r in rows])
    return ConvergenceTable(tuple(rows), slope, exact, tuple(consts))


def _finite_product(a: float, b: float) -> float:
    # inf * 0 would be nan; an infinite constant with zero data gives no bound at all
    if math.isinf(a):
        return math.inf
    return float(a * b)

