import math

import numpy as np
import pytest

from delayosc.analysis import (
    ZERO_ERROR,
    bounds_constants,
    corollary_check,
    fit_slope,
    lemma_check,
    linear_history,
    solution_convergence_study,
)
from delayosc.classical import ClassicalProblem
from delayosc.errors import DomainError, SingularOperator, SlopeUndefined
from delayosc.functions import ForcingFunction, HistoryFunction
from delayosc.linalg import Operator

ALPHA_ONE = 1 + math.e


class TestConstants:
    def test_alpha(self):
        c = bounds_constants([[1.0]], 1.0, 1.0, 1.0)
        assert c.alpha == pytest.approx(ALPHA_ONE, rel=1e-15)
        assert c.kappa == 1 + 3 * 2

    def test_formulas(self):
        om = np.array([[2.0, 0.0], [0.0, 0.5]])
        c = bounds_constants(om, 0.1, 0.3, 2.0)
        w, wi = 2.0, 2.0
        alpha = 1 + w * math.exp(0.3 * w)
        assert c.beta == pytest.approx(2 * (1 + w) * (1 + wi) * math.exp(alpha * 2.2 * w), rel=1e-13)
        assert c.delta == pytest.approx(w**2 * (2 + wi + wi * 2.0) * math.exp(w * 2.0), rel=1e-13)

    def test_monotone_in_T(self, rng):
        for _ in range(10):
            om = rng.standard_normal((3, 3))
            T = rng.uniform(0.5, 3)
            a, b = bounds_constants(om, 0.1, 0.2, T), bounds_constants(om, 0.1, 0.2, 2 * T)
            assert a.alpha >= 1
            for name in ("alpha", "beta", "delta", "kappa"):
                assert 0 < getattr(a, name) <= getattr(b, name)

    def test_singular(self):
        with pytest.raises(SingularOperator):
            bounds_constants([[0.0]], 0.1, 0.2, 1.0)
        c = bounds_constants([[0.0]], 0.1, 0.2, 1.0, allow_singular=True)
        assert math.isinf(c.beta) and c.delta == 0.0 and c.alpha == 1.0


class TestLemma:
    def test_zero_omega(self):
        row = lemma_check(Operator.zero(2), 0.3, 0.5, 2.0)
        assert row.observed == 0.0 and row.bound == pytest.approx(0.3) and row.satisfied

    def test_alpha_field(self):
        assert lemma_check([[1.0]], 1.0, 1.0, 1.0).alpha == pytest.approx(3.718281828, abs=1e-9)

    def test_scalar_example(self):
        row = lemma_check([[1.0]], 0.1, 1.0, 1.0)
        assert row.bound == pytest.approx(0.1 * math.exp(ALPHA_ONE), rel=1e-14)
        assert row.satisfied and row.observed < 0.5

    def test_tau_above_tau0(self):
        with pytest.raises(DomainError):
            lemma_check([[1.0]], 0.5, 0.2, 1.0)
        with pytest.raises(DomainError):
            lemma_check([[1.0]], 0.1, 0.2, 1.0, grid=8)

    def test_first_order_ratio(self, rng):
        om = rng.standard_normal((2, 2))
        om /= np.linalg.norm(om, 2)
        w = 1.0
        alpha = 1 + w * math.exp(0.2 * w)
        for tau in (0.2, 0.1, 0.05, 0.025):
            row = lemma_check(om, tau, 0.2, 2.0)
            assert row.observed / tau <= math.exp(alpha * 2.0 * w)


class TestCorollary:
    def test_example(self):
        row = corollary_check([[1.0]], 0.1, 1.0, 0.2, 1.0)
        assert row.bound == pytest.approx(0.3 * 2 * math.exp(ALPHA_ONE * 1.3), rel=1e-14)
        assert row.satisfied and row.gamma == 0.2

    def test_zero(self):
        assert corollary_check(Operator.zero(3), 0.2, 0.4, 0.4, 1.0).observed == 0.0

    def test_gamma_zero_dominates_lemma(self, rng):
        om = rng.standard_normal((2, 2))
        for tau in (0.05, 0.2):
            lem = lemma_check(om, tau, 0.5, 1.5)
            cor = corollary_check(om, tau, 0.5, 0.0, 1.5)
            assert cor.bound >= lem.bound

    def test_negative_gamma(self):
        with pytest.raises(DomainError):
            corollary_check([[1.0]], 0.1, 0.2, -0.1, 1.0)


class TestSlope:
    def test_exact_line(self):
        taus = np.array([0.4, 0.2, 0.1])
        slope, exact = fit_slope(taus, 3 * taus**2)
        assert slope == pytest.approx(2.0) and not exact

    def test_zero_errors(self):
        assert fit_slope([0.3, 0.2, 0.1], [0.0, 1e-15, 0.0]) == (None, True)

    def test_too_few(self):
        with pytest.raises(SlopeUndefined, match="need >= 3 tau values"):
            fit_slope([0.1, 0.05], [1.0, 0.5])

    def test_drops_zero_rows(self):
        slope, _ = fit_slope([0.4, 0.2, 0.1], [0.4, 0.2, 0.0])
        assert slope == pytest.approx(1.0)
        assert ZERO_ERROR == 1e-13


def scalar_base(T=2.0):
    return ClassicalProblem([[1.0]], [1.0], [-1.0], ForcingFunction.zero(1), T)


def test_convergence_reference_scenario():
    table = solution_convergence_study(scalar_base(), [0.025, 0.2, 0.05, 0.1])
    assert [r.tau for r in table.rows] == [0.2, 0.1, 0.05, 0.025]
    assert table.fitted_slope >= 0.9
    assert all(r.satisfied for r in table.rows)
    assert all(r.sup_error_c0 <= r.sup_error_c1 for r in table.rows)
    errs = [r.sup_error_c0 for r in table.rows]
    assert all(a >= b for a, b in zip(errs, errs[1:]))


def test_convergence_zero_omega():
    base = ClassicalProblem(Operator.zero(2), [1.0, 2.0], [0.5, -1.0], ForcingFunction.zero(2), 2.0)
    table = solution_convergence_study(base, [0.2, 0.1, 0.05])
    assert table.exact_agreement and table.fitted_slope is None
    assert all(r.sup_error_c1 < 1e-13 for r in table.rows)


def test_convergence_forced_custom_history():
    base = ClassicalProblem([[0.8]], [0.5], [0.2], ForcingFunction.analytic("trig", amplitude=[1.0]), 1.5)
    builder = lambda tau: HistoryFunction.analytic(tau, "polynomial",  # noqa: E731
                                                   coefficients=[[0.5, 0.2, 0.3]])
    table = solution_convergence_study(base, [0.2, 0.1, 0.05], history_builder=builder)
    assert all(r.satisfied for r in table.rows)
    # still pre-asymptotic at these tau values (slope about 0.79)
    assert table.fitted_slope > 0.7


def test_convergence_validation():
    with pytest.raises(SlopeUndefined):
        solution_convergence_study(scalar_base(), [0.1, 0.05])
    with pytest.raises(DomainError):
        solution_convergence_study(scalar_base(), [0.2, 0.1, 0.05], tau0=0.1)
    with pytest.raises(DomainError):
        solution_convergence_study(scalar_base(), [0.2, 0.1, 0.05], grid=100)


def test_linear_history_family():
    h = linear_history([1.0], [-1.0])(0.1)
    assert h(-0.2)[0] == pytest.approx(1.2)
    assert h.deriv1(0.0)[0] == -1.0
