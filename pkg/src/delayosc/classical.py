"""The oscillator without delay, x'' - omega^2 x = f, in closed form.

With ``C(t) = cosh(omega t)`` and ``S(t) = omega^{-1} sinh(omega t)`` the
mild solution is

    x(t) = C(t) x0 + S(t) x1 + int_0^t S(t - s) f(s) ds
    x'(t) = omega^2 S(t) x0 + C(t) x1 + int_0^t C(t - s) f(s) ds.

``C`` and ``S`` are read off one exponential of the block generator
``[[0, I], [omega^2, 0]]``, which needs no inverse of ``omega``; for an
invertible ``omega`` it agrees with the two-exponential formula
``(e^{omega t} ± e^{-omega t}) / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfHorizon
from .functions import ForcingFunction
from .linalg import DEFAULT_RULE, Operator, QuadratureRule, as_operator, integrate, matrix_exp

__all__ = ["ClassicalProblem", "classical_solution", "classical_velocity", "cosh_sinh"]

# Longest quadrature cell for the Duhamel integrals.
DUHAMEL_CELL = 0.25


def cosh_sinh(omega: Operator, t) -> tuple[np.ndarray, np.ndarray]:
    """``C(t)`` and ``S(t)`` for a scalar or array ``t``."""
    n = omega.dim
    gen = np.zeros((2 * n, 2 * n))
    gen[:n, n:] = np.eye(n)
    gen[n:, :n] = omega.square
    block = matrix_exp(gen, t)
    return block[..., :n, :n], block[..., :n, n:]


@dataclass(eq=False)
class ClassicalProblem:
    omega: Operator
    x0: np.ndarray
    x1: np.ndarray
    forcing: ForcingFunction
    horizon: float
    rule: QuadratureRule = field(default=DEFAULT_RULE)

    def __post_init__(self):
        self.omega = as_operator(self.omega)
        self.x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        self.x1 = np.atleast_1d(np.asarray(self.x1, dtype=float))
        n = self.omega.dim
        if self.x0.shape != (n,) or self.x1.shape != (n,):
            raise ValueError(f"x0 and x1 must have dimension {n}")
        if self.forcing.dim != n:
            raise ValueError(f"forcing dimension {self.forcing.dim} does not match omega ({n})")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError("horizon must be positive")

    def _check(self, t: float) -> float:
        if not (-1e-12 * self.horizon <= t <= self.horizon * (1 + 1e-12)):
            raise OutOfHorizon(f"t = {t} outside [0, {self.horizon}]")
        return min(max(float(t), 0.0), self.horizon)

    def _duhamel(self, t: float, part: int) -> np.ndarray:
        if self.forcing.is_zero or t == 0.0:
            return np.zeros(self.omega.dim)

        def g(s):
            kernel = cosh_sinh(self.omega, t - s)[part]
            return np.einsum("mab,mb->ma", kernel, self.forcing(s))

        return integrate(g, 0.0, t, self.forcing.kinks_in(0.0, t), self.rule, max_width=DUHAMEL_CELL)

    def solution(self, t: float) -> np.ndarray:
        t = self._check(t)
        c, s = cosh_sinh(self.omega, t)
        return c @ self.x0 + s @ self.x1 + self._duhamel(t, 1)

    def velocity(self, t: float) -> np.ndarray:
        t = self._check(t)
        c, s = cosh_sinh(self.omega, t)
        return self.omega.square @ (s @ self.x0) + c @ self.x1 + self._duhamel(t, 0)


def classical_solution(p: ClassicalProblem, t: float) -> np.ndarray:
    return p.solution(t)


def classical_velocity(p: ClassicalProblem, t: float) -> np.ndarray:
    return p.velocity(t)
