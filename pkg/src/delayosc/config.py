"""Scenario configuration files (JSON).

Example::

    {
      "omega": "diag:[1.0, -0.5]",
      "tau": 0.5, "tau0": 1.0, "horizon": 5.0,
      "history": {"kind": "polynomial", "coefficients": [[1.0, 0.5], [0.0, 1.0]]},
      "forcing": {"kind": "trig", "amplitude": [1.0, 0.0], "frequency": 2.0, "kinks": []},
      "grid_points": 201,
      "quadrature": {"scheme": "gauss-legendre", "nodes_per_cell": 8},
      "variant": {"mild_form": "derived"},
      "classical": {"x0": [1.0, 0.0], "x1": [0.5, 1.0]},
      "taus": [0.2, 0.1, 0.05, 0.025],
      "convergence_history": "linear"
    }

Only ``omega``, ``tau``, ``horizon`` and ``history`` are required.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, DelayOscError
from .functions import ForcingFunction, HistoryFunction
from .linalg import Operator, QuadratureRule
from .solver import MILD_VARIANTS, DelayProblem

__all__ = ["ScenarioConfig", "load_config", "parse_config", "parse_omega", "dump_config", "scenario_dict"]

HISTORY_KINDS = ("polynomial", "trig", "samples")
FORCING_KINDS = ("zero", "constant", "polynomial", "trig")
FIELD_DOCS = {
    "omega": "matrix literal [[...], ...] or \"diag:[d1, d2, ...]\"",
    "tau": "delay parameter tau > 0 (the lag is 2*tau)",
    "tau0": "upper bound tau0 >= tau used by the a priori constants (bounds only)",
    "horizon": "final time T > 0",
    "history": "{kind: polynomial|trig|samples, ...} on [-2*tau, 0]",
    "forcing": "{kind: zero|constant|polynomial|trig, ..., kinks: [...]}; default zero",
    "grid_points": "uniform output grid size over [-2*tau, T] (multiples of tau are added)",
    "quadrature": "{scheme: gauss-legendre|simpson, nodes_per_cell: 2..64}",
    "variant": "{mild_form: derived|paper}",
    "classical": "{x0: [...], x1: [...]} data of the no-delay problem; default phi(0), phi'(0)",
    "taus": "tau values for the convergence study",
    "convergence_history": "linear (phi = x0 + t*x1) or restrict (the configured history)",
}


def _fail(field_name: str, msg: str):
    raise ConfigError(f"field '{field_name}': {msg}")


def _number(d: dict, key: str, *, positive: bool = True, required: bool = True, default=None):
    if key not in d:
        if required:
            _fail(key, "missing")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        _fail(key, f"expected a finite number, got {v!r}")
    if positive and v <= 0:
        _fail(key, f"must be positive, got {v!r}")
    return float(v)


def parse_omega(value: Any, field_name: str = "omega") -> Operator:
    if isinstance(value, str):
        text = value.strip()
        if not text.startswith("diag:"):
            try:
                value = json.loads(text)
            except json.JSONDecodeError:
                _fail(field_name, "expected a matrix literal or 'diag:[...]'")
            return parse_omega(value, field_name)
        try:
            diag = json.loads(text[5:])
        except json.JSONDecodeError:
            _fail(field_name, f"cannot parse diagonal {text[5:]!r}")
        return parse_omega(np.diag(np.atleast_1d(np.asarray(diag, dtype=float))).tolist(), field_name)
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        _fail(field_name, "entries must be numbers")
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        _fail(field_name, f"must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        _fail(field_name, "entries must be finite")
    return Operator(arr)


def _parse_history(d: Any, tau: float, dim: int) -> HistoryFunction:
    if not isinstance(d, dict) or "kind" not in d:
        _fail("history", "expected an object with a 'kind'")
    params = {k: v for k, v in d.items() if k != "kind"}
    kind = d["kind"]
    try:
        if kind == "samples":
            hist = HistoryFunction.sampled(tau, params["times"], params["values"], params["derivs"],
                                           smoothness=params.get("smoothness", "C1"))
        elif kind in HISTORY_KINDS:
            hist = HistoryFunction.analytic(tau, kind, **params)
        else:
            _fail("history.kind", f"expected one of {HISTORY_KINDS}, got {kind!r}")
    except KeyError as exc:
        _fail(f"history.{exc.args[0]}", "missing")
    except (TypeError, ValueError) as exc:
        _fail("history", str(exc))
    if hist.dim != dim:
        _fail("history", f"dimension {hist.dim} does not match omega ({dim})")
    return hist


def _parse_forcing(d: Any, dim: int) -> ForcingFunction:
    if d is None:
        return ForcingFunction.zero(dim)
    if not isinstance(d, dict) or "kind" not in d:
        _fail("forcing", "expected an object with a 'kind'")
    kind = d["kind"]
    if kind not in FORCING_KINDS:
        _fail("forcing.kind", f"expected one of {FORCING_KINDS}, got {kind!r}")
    params = {k: v for k, v in d.items() if k not in ("kind", "kinks", "continuity")}
    if kind == "zero":
        params = {"dim": dim}
    kinks = d.get("kinks", [])
    if not isinstance(kinks, list) or not all(isinstance(k, (int, float)) for k in kinks):
        _fail("forcing.kinks", "expected a list of numbers")
    try:
        forcing = ForcingFunction.analytic(kind, kinks=kinks, **params)
    except KeyError as exc:
        _fail(f"forcing.{exc.args[0]}", "missing")
    except (TypeError, ValueError) as exc:
        _fail("forcing", str(exc))
    if forcing.dim != dim:
        _fail("forcing", f"dimension {forcing.dim} does not match omega ({dim})")
    return forcing


def _vector_field(d: dict, key: str, dim: int):
    try:
        v = np.atleast_1d(np.asarray(d[key], dtype=float))
    except (TypeError, ValueError):
        _fail(f"classical.{key}", "expected a vector of numbers")
    if v.shape != (dim,):
        _fail(f"classical.{key}", f"expected {dim} entries")
    return v


@dataclass(eq=False)
class ScenarioConfig:
    problem: DelayProblem
    tau0: float | None = None
    grid_points: int = 201
    mild_form: str = "derived"
    x0: np.ndarray | None = None
    x1: np.ndarray | None = None
    taus: list[float] | None = None
    convergence_history: str = "linear"
    raw: dict = field(default_factory=dict)

    @property
    def classical_data(self) -> tuple[np.ndarray, np.ndarray]:
        h = self.problem.history
        x0 = self.x0 if self.x0 is not None else h.value(0.0)
        x1 = self.x1 if self.x1 is not None else h.deriv1(0.0)
        return x0, x1

    def output_grid(self) -> np.ndarray:
        p = self.problem
        uniform = np.linspace(-2 * p.tau, p.horizon, self.grid_points)
        return np.union1d(uniform, p.evaluator.knots(-2 * p.tau, p.horizon))


def parse_config(d: Any) -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ConfigError("config root must be an object")
    for key in ("omega", "history"):
        if key not in d:
            _fail(key, "missing")
    omega = parse_omega(d["omega"])
    tau = _number(d, "tau")
    horizon = _number(d, "horizon")
    tau0 = _number(d, "tau0", required=False)
    if tau0 is not None and tau0 < tau:
        _fail("tau0", f"must be >= tau ({tau})")
    dim = omega.dim
    history = _parse_history(d["history"], tau, dim)
    forcing = _parse_forcing(d.get("forcing"), dim)

    quad = d.get("quadrature", {})
    if not isinstance(quad, dict):
        _fail("quadrature", "expected an object")
    try:
        rule = QuadratureRule(int(quad.get("nodes_per_cell", 8)), quad.get("scheme", "gauss-legendre"))
    except (TypeError, ValueError) as exc:
        _fail("quadrature", str(exc))

    grid_points = d.get("grid_points", 201)
    if isinstance(grid_points, bool) or not isinstance(grid_points, int) or grid_points < 2:
        _fail("grid_points", f"expected an integer >= 2, got {grid_points!r}")

    variant = d.get("variant", {})
    mild_form = variant.get("mild_form", "derived") if isinstance(variant, dict) else None
    if mild_form not in MILD_VARIANTS:
        _fail("variant.mild_form", f"expected one of {MILD_VARIANTS}")

    x0 = x1 = None
    if "classical" in d:
        cl = d["classical"]
        if not isinstance(cl, dict):
            _fail("classical", "expected an object")
        x0 = _vector_field(cl, "x0", dim) if "x0" in cl else None
        x1 = _vector_field(cl, "x1", dim) if "x1" in cl else None

    taus = d.get("taus")
    if taus is not None:
        if not isinstance(taus, list) or not all(
                isinstance(t, (int, float)) and not isinstance(t, bool) and t > 0 for t in taus):
            _fail("taus", "expected a list of positive numbers")
        taus = [float(t) for t in taus]
    conv_hist = d.get("convergence_history", "linear")
    if conv_hist not in ("linear", "restrict"):
        _fail("convergence_history", "expected 'linear' or 'restrict'")

    try:
        problem = DelayProblem(omega, tau, history, forcing, horizon, rule)
    except DelayOscError as exc:
        _fail("horizon" if "horizon" in str(exc) else "forcing", str(exc))
    return ScenarioConfig(problem, tau0, grid_points, mild_form, x0, x1, taus, conv_hist, raw=d)


def load_config(path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(data)


# -- writing ------------------------------------------------------------------------

def _family_dict(family: tuple) -> dict:
    kind, params = family
    out = {"kind": kind}
    for key, value in params:
        out[key] = _thaw(value)
    return out


def _thaw(v):
    if isinstance(v, tuple):
        return [_thaw(x) for x in v]
    return v


def scenario_dict(problem: DelayProblem, **extras) -> dict:
    """JSON-ready description of ``problem`` (analytic or sampled families only)."""
    h, f = problem.history, problem.forcing
    if h.family is None or f.family is None:
        raise ValueError("only family-based histories and forcings can be written to a config")
    history = _family_dict(h.family)
    forcing = _family_dict(f.family)
    if forcing["kind"] == "zero":
        forcing = {"kind": "zero"}
    if f.kink_times:
        forcing["kinks"] = list(f.kink_times)
    out = {
        "omega": problem.omega.entries.tolist(),
        "tau": problem.tau,
        "horizon": problem.horizon,
        "history": history,
        "forcing": forcing,
        "quadrature": {"scheme": problem.rule.scheme, "nodes_per_cell": problem.rule.nodes_per_cell},
    }
    for key, value in extras.items():
        if value is not None:
            out[key] = value.tolist() if isinstance(value, np.ndarray) else value
    return out


def dump_config(problem: DelayProblem, path, **extras):
    Path(path).write_text(json.dumps(scenario_dict(problem, **extras), indent=2) + "\n")
