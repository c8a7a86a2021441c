"""Command line entry point: ``delayosc {solve,dexp,bounds,convergence}``.

Exit codes: 0 success, 1 I/O failure, 2 invalid config or arguments,
3 solver error (the error class name is printed).
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .analysis import bounds_constants, corollary_check, lemma_check, solution_convergence_study
from .classical import ClassicalProblem
from .config import FIELD_DOCS, load_config, parse_omega
from .dexp import DelayedExpEvaluator
from .errors import ConfigError, DelayOscError
from .functions import HistoryFunction
from .solver import Trajectory
from .steps import StepTrajectory, apriori_check, integrate_segments

OUTPUT_DIR_ENV = "DELAYOSC_OUTPUT_DIR"
SOURCES = ("closed_form", "mild_form", "step_oracle", "classical")
DEFAULT_TAUS = (0.2, 0.1, 0.05, 0.025)


class UsageError(Exception):
    pass


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def _output_path(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def write_csv_atomic(path: str, header: list[str], rows, footer: list[list] = ()) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    for row in footer:
        w.writerow([fmt(v) for v in row])
    target = _output_path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


# -- commands --------------------------------------------------------------------------

def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    sources = [s.strip() for s in args.sources.split(",") if s.strip()]
    bad = [s for s in sources if s not in SOURCES]
    if bad or not sources:
        raise UsageError(f"--sources: unknown source(s) {bad}; choose from {', '.join(SOURCES)}")
    p = cfg.problem
    n = p.dim
    grid = cfg.output_grid()
    header = ["t"] + [f"x_{i + 1}" for i in range(n)] + [f"dx_{i + 1}" for i in range(n)] + ["source"]
    rows = []
    for source in sources:
        if source == "classical":
            x0, x1 = cfg.classical_data
            cp = ClassicalProblem(p.omega, x0, x1, p.forcing, p.horizon, p.rule)
            for t in grid[grid >= 0.0]:
                rows.append([t, *cp.solution(t), *cp.velocity(t), source])
            continue
        if source == "step_oracle":
            traj = StepTrajectory.run(p)
            xs, dxs = traj.value(grid), traj.deriv(grid)
        else:
            form = "classical" if source == "closed_form" else "mild"
            xs, dxs = Trajectory(p, form, cfg.mild_form).sample(grid)
        for t, x, dx in zip(grid, xs, dxs):
            rows.append([t, *x, *dx, source])
    write_csv_atomic(args.output, header, rows)
    if args.bounds:
        if cfg.tau0 is None:
            raise ConfigError("field 'tau0': missing (required with --bounds)")
        c = bounds_constants(p.omega, p.tau, cfg.tau0, p.horizon)
        write_csv_atomic(str(args.output) + ".bounds.csv", ["name", "value"],
                         [[k, getattr(c, k)] for k in ("alpha", "beta", "delta", "kappa", "tau0", "T", "tau")])
    return 0


def cmd_dexp(args) -> int:
    omega = parse_omega(args.omega, "--omega")
    if not args.tau > 0:
        raise UsageError("--tau must be positive")
    if args.t_min > args.t_max:
        raise UsageError("--t-min must not exceed --t-max")
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    ev = DelayedExpEvaluator(omega, args.tau)
    ts = np.linspace(args.t_min, args.t_max, args.samples)
    n = omega.dim
    idx = [(i + 1, j + 1) for i in range(n) for j in range(n)]
    header = ["t"] + [f"{name}_{i}{j}" for name in ("exp", "x1", "x2") for i, j in idx]
    e, x1, x2 = ev.exp(ts), ev.x1(ts), ev.x2(ts)
    rows = [[t, *e[k].ravel(), *x1[k].ravel(), *x2[k].ravel()] for k, t in enumerate(ts)]
    write_csv_atomic(args.output, header, rows)
    return 0


def cmd_bounds(args) -> int:
    cfg = load_config(args.config)
    if cfg.tau0 is None:
        raise ConfigError("field 'tau0': missing (required by bounds)")
    p = cfg.problem
    T, tau = p.horizon, p.tau
    header = ["check", "tau", "gamma", "observed", "bound", "satisfied"]
    rows = []
    r = lemma_check(p.omega, tau, cfg.tau0, T)
    rows.append(["lemma", tau, "", r.observed, r.bound, r.satisfied])
    for gamma in (0.0, tau, 2 * tau):
        r = corollary_check(p.omega, tau, cfg.tau0, gamma, T)
        rows.append(["corollary", tau, gamma, r.observed, r.bound, r.satisfied])
    # segment norms are not errors, so they get their own table
    n_seg = max(1, int(T // (2 * tau) + 1e-9))
    report = apriori_check(p, integrate_segments(p, n_seg))
    apriori_rows = [[n, observed, bound, observed <= bound] for n, observed, bound in report.per_segment]
    c = bounds_constants(p.omega, tau, cfg.tau0, T, allow_singular=True)
    footer = [[f"# {k}", getattr(c, k)] for k in ("alpha", "beta", "delta", "kappa")]
    write_csv_atomic(args.output, header, rows, footer)
    write_csv_atomic(str(args.output) + ".apriori.csv", ["segment", "observed", "bound", "satisfied"],
                     apriori_rows, [["# kappa", report.kappa]])
    return 0


def cmd_convergence(args) -> int:
    cfg = load_config(args.config)
    if args.taus is not None:
        try:
            taus = [float(t) for t in args.taus.split(",") if t.strip()]
        except ValueError:
            raise UsageError(f"--taus: cannot parse {args.taus!r}") from None
    else:
        taus = list(cfg.taus or DEFAULT_TAUS)
    if len(taus) < 3:
        raise UsageError("need >= 3 tau values for slope")
    if any(t <= 0 for t in taus):
        raise UsageError("--taus: values must be positive")
    p = cfg.problem
    x0, x1 = cfg.classical_data
    base = ClassicalProblem(p.omega, x0, x1, p.forcing, p.horizon, p.rule)
    builder = None
    if cfg.convergence_history == "restrict":
        fam = p.history.family
        if fam is None or fam[0] == "samples":
            raise ConfigError("field 'convergence_history': 'restrict' needs an analytic history")
        kind, params = fam
        builder = lambda tau: HistoryFunction.analytic(tau, kind, **dict(params))  # noqa: E731
    tau0 = cfg.tau0 if cfg.tau0 is not None else max(taus)
    table = solution_convergence_study(base, taus, tau0, builder)
    header = ["tau", "sup_error_c0", "sup_error_c1", "lemma_bound", "theorem_bound", "corollary_bound", "satisfied"]
    rows = [[r.tau, r.sup_error_c0, r.sup_error_c1, r.lemma_bound, r.theorem_bound, r.corollary_bound,
             r.satisfied] for r in table.rows]
    slope = "ExactAgreement" if table.exact_agreement else table.fitted_slope
    write_csv_atomic(args.output, header, rows, [["fitted_slope", slope]])
    return 0


# -- parser ----------------------------------------------------------------------------------

def _config_help() -> str:
    lines = ["config fields (JSON):"]
    lines += [f"  {k:<20} {v}" for k, v in FIELD_DOCS.items()]
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delayosc",
        description="Solve and analyse the delay oscillator x''(t) - omega^2 x(t - 2 tau) = f(t).",
        epilog=_config_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt_cls = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser("solve", help="tabulate trajectories", epilog=_config_help(), formatter_class=fmt_cls)
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--sources", default="closed_form",
                   help=f"comma separated subset of {', '.join(SOURCES)} (default closed_form)")
    p.add_argument("--bounds", action="store_true",
                   help="also write alpha, beta, delta, kappa to OUTPUT.bounds.csv (needs tau0, invertible omega)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("dexp", help="tabulate exp_tau, x1 and x2")
    p.add_argument("--omega", required=True, help="matrix literal or diag:[...]")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--samples", type=int, default=501)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_dexp)

    p = sub.add_parser("bounds", help="lemma, corollary and a priori checks", epilog=_config_help(),
                       formatter_class=fmt_cls)
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("convergence", help="tau -> 0 convergence table", epilog=_config_help(),
                       formatter_class=fmt_cls)
    p.add_argument("--config", required=True)
    p.add_argument("--taus", help="comma separated tau values (default from config or 0.2,0.1,0.05,0.025)")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DelayOscError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
