"""Delayed matrix exponential and the two fundamental solutions.

All three functions are finite sums of truncated powers

    sum_j  P_j * (t - c_j)_+^{d_j} / d_j!

with matrix coefficients ``P_j`` drawn from the powers of ``omega``:

* ``exp_tau(t)``: ``P_j = omega^j``, ``c_j = (j - 1) tau``, ``d_j = j``
* ``x1(t)``:      ``P_m = omega^(2m)``, ``c_m = (2m - 1) tau``, ``d_m = 2m``
* ``x2(t)``:      ``P_m = omega^(2m)``, ``c_m = 2m tau``, ``d_m = 2m + 1``

so the r-th time derivative just lowers every degree by r and drops the
terms whose degree goes negative.  A term with degree zero is the
indicator of ``t >= c_j``, i.e. every evaluator returns right limits at
knots.  ``x2`` is evaluated from its even-power expansion, so no inverse
of ``omega`` is ever formed here.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ExcessiveHorizon, NonFiniteInput
from .linalg import Operator, as_operator

__all__ = [
    "DelayedExpEvaluator",
    "FundamentalPair",
    "MAX_HORIZON_FACTOR",
    "delayed_exp",
    "delayed_exp_derivative",
    "fundamental_x1",
    "fundamental_x2",
]

MAX_HORIZON_FACTOR = 256


class DelayedExpEvaluator:
    """Evaluates ``exp_tau(.; ±omega)``, ``x1``, ``x2`` and their derivatives.

    Every query accepts a scalar time (result shape ``(n, n)``) or an array
    of times (result shape ``t.shape + (n, n)``).
    """

    def __init__(self, omega, tau: float):
        self.omega = as_operator(omega)
        tau = float(tau)
        if not math.isfinite(tau) or tau <= 0.0:
            raise DomainError(f"tau must be a positive finite number, got {tau}")
        self.tau = tau
        n = self.omega.dim
        self._powers = [np.eye(n)]
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self.omega.dim

    def powers(self, k: int) -> np.ndarray:
        """Stack of ``omega^0 .. omega^k``, shape ``(k + 1, n, n)``."""
        if len(self._powers) <= k:
            with self._lock:
                while len(self._powers) <= k:
                    self._powers.append(self._powers[-1] @ self.omega.entries)
        return np.stack(self._powers[: k + 1])

    @property
    def power_cache(self) -> list[np.ndarray]:
        return list(self._powers)

    # -- core series -------------------------------------------------------

    def _times(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(t)):
            raise NonFiniteInput("time argument must be finite")
        if t.size and t.max() > MAX_HORIZON_FACTOR * self.tau * (1 + 1e-12):
            raise ExcessiveHorizon(
                f"t = {t.max():g} exceeds {MAX_HORIZON_FACTOR}*tau = {MAX_HORIZON_FACTOR * self.tau:g}"
            )
        return t

    def _series(self, t, power_step: int, center: Callable[[int], float], degree: Callable[[int], int],
                order: int, sign: int = 1, factor_power: int = 0) -> np.ndarray:
        """Sum ``omega^(power_step*j + factor_power) (t - c_j)_+^(d_j - order) / (d_j - order)!``."""
        t = self._times(t)
        tmax = float(t.max()) if t.size else 0.0
        nterms = 0
        while center(nterms) <= tmax:
            nterms += 1
        n = self.dim
        if nterms == 0:
            return np.zeros(t.shape + (n, n))
        idx = np.arange(nterms)
        pw = power_step * idx + factor_power
        stack = self.powers(int(pw.max()))[pw]
        if sign < 0:
            stack = stack * np.where(pw % 2 == 1, -1.0, 1.0)[:, None, None]

        centers = np.array([center(j) for j in range(nterms)])
        degs = np.array([degree(j) for j in range(nterms)]) - order
        u = t[..., None] - centers
        active = (u >= 0.0) & (degs >= 0)
        safe_degs = np.maximum(degs, 0)
        fact = np.array([math.factorial(d) for d in safe_degs], dtype=float)
        weights = np.where(active, np.power(np.where(active, u, 0.0), safe_degs) / fact, 0.0)
        return np.einsum("...j,jab->...ab", weights, stack)

    # -- public evaluators ---------------------------------------------------

    def exp(self, t, sign: int = 1) -> np.ndarray:
        """``exp_tau(t; sign*omega)``; zero for ``t < -tau``."""
        _check_sign(sign)
        tau = self.tau
        return self._series(t, 1, lambda j: (j - 1) * tau, lambda j: j, 0, sign)

    def exp_derivative(self, t, sign: int = 1, order: int = 1) -> np.ndarray:
        """``(sign*omega)^order exp_tau(t - order*tau; sign*omega)``, right limit at knots."""
        _check_sign(sign)
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        tau = self.tau
        return self._series(t, 1, lambda j: (j + order - 1) * tau, lambda j: j + order, order, sign,
                            factor_power=order)

    def x1(self, t, order: int = 0) -> np.ndarray:
        tau = self.tau
        return self._series(t, 2, lambda m: (2 * m - 1) * tau, lambda m: 2 * m, order)

    def x2(self, t, order: int = 0) -> np.ndarray:
        tau = self.tau
        return self._series(t, 2, lambda m: 2 * m * tau, lambda m: 2 * m + 1, order)

    def fundamental_pair(self) -> "FundamentalPair":
        return FundamentalPair(self.x1, self.x2)

    def knots(self, lo: float, hi: float) -> np.ndarray:
        """Multiples of tau inside [lo, hi]."""
        k0 = math.ceil(lo / self.tau - 1e-12)
        k1 = math.floor(hi / self.tau + 1e-12)
        return self.tau * np.arange(k0, k1 + 1)


@dataclass(frozen=True)
class FundamentalPair:
    x1_eval: Callable
    x2_eval: Callable


def _check_sign(sign: int):
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")


def delayed_exp(ev: DelayedExpEvaluator, t, sign: int = 1) -> np.ndarray:
    return ev.exp(t, sign)


def delayed_exp_derivative(ev: DelayedExpEvaluator, t, sign: int = 1, order: int = 1) -> np.ndarray:
    return ev.exp_derivative(t, sign, order)


def fundamental_x1(ev: DelayedExpEvaluator, t) -> np.ndarray:
    return ev.x1(t)


def fundamental_x2(ev: DelayedExpEvaluator, t) -> np.ndarray:
    return ev.x2(t)
