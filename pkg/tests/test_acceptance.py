"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed as they are
produced and again in the terminal summary.  Run on its own with

    pytest tests/test_acceptance.py -v
"""
import filecmp
import math
import time
from pathlib import Path

import numpy as np
import pytest

from delayosc.analysis import corollary_check, lemma_check, solution_convergence_study
from delayosc.classical import ClassicalProblem
from delayosc.cli import main as cli_main
from delayosc.dexp import DelayedExpEvaluator
from delayosc.functions import ForcingFunction
from delayosc.scenarios import FIXTURES, random_omega
from delayosc.solver import DEFAULT_MILD_VARIANT, MILD_VARIANTS, solve_classical
from delayosc.steps import apriori_check, integrate_segments, kappa

from oracles import delayed_exp_exact, rel_err, to_float
from suite import SUITE_SIZE, distances, suite

RESULTS: list[str] = []
FIXTURE_DIR = Path(__file__).resolve().parents[1] / "fixtures"


def record(number: int, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _knot_limits(ev, omega, tau, k):
    """Largest relative gap between right-limit evaluations and exact left limits at k*tau."""
    t = k * tau
    worst = 0.0
    for r in range(0, k + 1):
        if r == 0:
            right = ev.exp(t)
        elif r <= 2:
            right = ev.exp_derivative(t, 1, r)
        else:
            right = np.linalg.matrix_power(omega, r) @ ev.exp(t - r * tau)
        left = to_float(delayed_exp_exact(omega, tau, t, 1, deriv=r, left=True))
        worst = max(worst, rel_err(right, left))
    return worst


def test_criterion_1_delayed_exp_fidelity():
    rng = np.random.default_rng(1)
    worst_value = worst_knot = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        omega = np.asarray(random_omega(rng, n, 2.0))
        tau = rng.uniform(0.25, 1.0)
        t = rng.uniform(-2 * tau, 8 * tau)
        sign = int(rng.choice([-1, 1]))
        ev = DelayedExpEvaluator(omega, tau)
        want = to_float(delayed_exp_exact(omega, tau, t, sign))
        worst_value = max(worst_value, rel_err(ev.exp(t, sign), want))
        k = int(rng.integers(0, 8))
        worst_knot = max(worst_knot, _knot_limits(ev, omega, tau, k))
    record(1, worst_value <= 1e-12 and worst_knot <= 1e-12,
           f"200 cases, max rel err {worst_value:.2e}, max knot gap {worst_knot:.2e} (tol 1e-12)")


def test_criterion_2_x2_ode_residual():
    h = 1e-4
    rng = np.random.default_rng(2)
    worst = 0.0
    for p in suite():
        ev = DelayedExpEvaluator(p.omega, p.tau)
        w2 = p.omega.square
        count = 0
        while count < 50:
            t = rng.uniform(0.0, 8 * p.tau)
            if abs(t / p.tau - round(t / p.tau)) * p.tau <= 2 * h:
                continue
            dd = (ev.x2(t + h) - 2 * ev.x2(t) + ev.x2(t - h)) / h**2
            worst = max(worst, float(np.abs(dd - w2 @ ev.x2(t - 2 * p.tau)).max()))
            count += 1
    record(2, worst <= 1e-5, f"{SUITE_SIZE} scenarios x 50 points, max residual {worst:.2e} (tol 1e-5)")


def test_criterion_3_oracle_equivalence():
    problems = suite()
    forced = sum(not p.forcing.is_zero for p in problems)
    oracle = max(distances(i)["classical"] for i in range(SUITE_SIZE))
    mild = max(distances(i)["mild_vs_classical"] for i in range(SUITE_SIZE))
    record(3, oracle <= 1e-6 and mild <= 1e-7,
           f"{SUITE_SIZE} scenarios ({forced} forced), classical vs oracle {oracle:.2e} (tol 1e-6), "
           f"mild vs classical {mild:.2e} (tol 1e-7)")


def test_criterion_4_ic_reproduction():
    rng = np.random.default_rng(4)
    worst = 0.0
    for p in suite():
        for t in rng.uniform(-2 * p.tau, 0.0, 20):
            worst = max(worst, float(np.abs(solve_classical(p, t) - p.history(t)).max()))
    record(4, worst <= 1e-8, f"{SUITE_SIZE} scenarios x 20 points, max deviation {worst:.2e} (tol 1e-8)")


def test_criterion_5_apriori():
    ok = True
    for p in suite():
        long = p.with_(horizon=16 * p.tau)
        report = apriori_check(long, integrate_segments(long, 8))
        ok = ok and report.all_satisfied
        ok = ok and report.kappa == 1 + (1 + 2 * p.tau) * (1 + p.omega.norm**2)
    k = kappa(1.0, 0.5)
    record(5, ok and k == 5.0, f"{SUITE_SIZE} scenarios x 8 segments all satisfied: {ok}; kappa(tau=0.5, |omega|=1) = {k}")


def test_criterion_6_lemma_and_corollary():
    tau0 = 1.0
    checks = failed = 0
    for p in suite():
        for T in (1.0, 2.0, 4.0):
            rows = [lemma_check(p.omega, p.tau, tau0, T, 512)]
            rows += [corollary_check(p.omega, p.tau, tau0, g, T, 512) for g in (0.0, p.tau, 2 * p.tau)]
            checks += len(rows)
            failed += sum(not r.satisfied for r in rows)
    record(6, failed == 0, f"{checks} lemma/corollary checks (T in 1, 2, 4; gamma in 0, tau, 2 tau), {failed} violated")


def test_criterion_7_solution_convergence():
    base = ClassicalProblem([[1.0]], [1.0], [-1.0], ForcingFunction.zero(1), 2.0)
    table = solution_convergence_study(base, [0.2, 0.1, 0.05, 0.025])
    c0 = all(r.sup_error_c0 <= r.theorem_bound for r in table.rows)
    c1 = all(r.sup_error_c1 <= r.corollary_bound for r in table.rows)
    slope = table.fitted_slope
    record(7, slope is not None and slope >= 0.9 and c0 and c1,
           f"fitted slope {slope:.3f} (min 0.9), C0 bound held: {c0}, C1 bound held: {c1}")


def test_criterion_8_mild_adjudication():
    agreeing = [v for v in MILD_VARIANTS if all(distances(i)[v] <= 1e-7 for i in range(SUITE_SIZE))]
    worst = {v: max(distances(i)[v] for i in range(SUITE_SIZE)) for v in MILD_VARIANTS}
    record(8, agreeing == [DEFAULT_MILD_VARIANT],
           f"agreeing variants {agreeing}, default {DEFAULT_MILD_VARIANT!r}, "
           + ", ".join(f"{v} max err {e:.2e}" for v, e in worst.items()))


def _run_twice(tmp_path, name, args):
    paths = []
    for run in (1, 2):
        out = tmp_path / f"{name}.{run}.csv"
        code = cli_main(args + ["--output", str(out)])
        if code != 0:
            return False
        paths.append(out)
    return filecmp.cmp(paths[0], paths[1], shallow=False)


def test_criterion_9_cli_determinism(tmp_path):
    start = time.time()
    results = {}
    for name in FIXTURES:
        cfg = str(FIXTURE_DIR / f"{name}.json")
        results[f"solve:{name}"] = _run_twice(
            tmp_path, f"solve_{name}",
            ["solve", "--config", cfg, "--sources", "closed_form,mild_form,step_oracle,classical"])
        results[f"convergence:{name}"] = _run_twice(tmp_path, f"conv_{name}", ["convergence", "--config", cfg])
    bad = [k for k, v in results.items() if not v]
    record(9, not bad, f"{len(results)} command/fixture pairs bit-identical across two runs"
           + (f"; differing: {bad}" if bad else "") + f" ({time.time() - start:.0f} s)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
