"""Randomized and bundled scenarios.

``random_problem`` draws smooth test problems from the analytic families
that configs can express, so every generated problem can be written with
``config.dump_config`` and read back unchanged.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .functions import ForcingFunction, HistoryFunction
from .linalg import Operator
from .solver import DelayProblem

__all__ = ["random_omega", "random_history", "random_forcing", "random_problem", "FIXTURES", "write_fixtures"]


def random_omega(rng: np.random.Generator, dim: int, max_norm: float = 2.0) -> Operator:
    a = rng.standard_normal((dim, dim))
    scale = rng.uniform(0.1, max_norm) / np.linalg.norm(a, 2)
    return Operator(a * scale)


def random_history(rng: np.random.Generator, tau: float, dim: int) -> HistoryFunction:
    if rng.random() < 0.5:
        coeffs = rng.uniform(-1.0, 1.0, size=(dim, int(rng.integers(1, 4)) + 1))
        return HistoryFunction.analytic(tau, "polynomial", coefficients=coeffs.round(6).tolist())
    return HistoryFunction.analytic(
        tau, "trig",
        amplitude=rng.uniform(-1.0, 1.0, dim).round(6).tolist(),
        frequency=rng.uniform(0.5, 3.0, dim).round(6).tolist(),
        phase=rng.uniform(0.0, 2 * np.pi, dim).round(6).tolist(),
        offset=rng.uniform(-0.5, 0.5, dim).round(6).tolist(),
    )


def random_forcing(rng: np.random.Generator, dim: int) -> ForcingFunction:
    if rng.random() < 0.5:
        return ForcingFunction.analytic(
            "trig", amplitude=rng.uniform(-1.0, 1.0, dim).round(6).tolist(),
            frequency=rng.uniform(0.5, 3.0, dim).round(6).tolist())
    coeffs = rng.uniform(-0.5, 0.5, size=(dim, 3))
    return ForcingFunction.analytic("polynomial", coefficients=coeffs.round(6).tolist())


def random_problem(rng: np.random.Generator, *, max_dim: int = 4, forced: bool | None = None,
                   tau_range=(0.25, 1.0), horizon_taus: float = 10.0, max_norm: float = 2.0) -> DelayProblem:
    """Smooth random problem with horizon ``horizon_taus * tau``."""
    dim = int(rng.integers(1, max_dim + 1))
    tau = float(np.round(rng.uniform(*tau_range), 6))
    omega = random_omega(rng, dim, max_norm)
    if forced is None:
        forced = bool(rng.random() < 0.5)
    forcing = random_forcing(rng, dim) if forced else ForcingFunction.zero(dim)
    return DelayProblem(omega, tau, random_history(rng, tau, dim), forcing, horizon_taus * tau)


# Bundled fixture configs; ``write_fixtures`` regenerates the JSON files.
FIXTURES = {
    "default": {
        "omega": [[1.0, 0.25], [-0.5, 0.75]],
        "tau": 0.25,
        "tau0": 0.5,
        "horizon": 2.5,
        "history": {"kind": "polynomial", "coefficients": [[1.0, 0.5, -0.25], [0.0, 1.0, 0.5]]},
        "forcing": {"kind": "trig", "amplitude": [0.5, -0.25], "frequency": 2.0, "kinks": []},
        "grid_points": 101,
        "quadrature": {"scheme": "gauss-legendre", "nodes_per_cell": 8},
        "variant": {"mild_form": "derived"},
        "taus": [0.2, 0.1, 0.05],
    },
    "convergence": {
        "omega": [[1.0]],
        "tau": 0.2,
        "tau0": 0.2,
        "horizon": 2.0,
        "history": {"kind": "polynomial", "coefficients": [[1.0, -1.0]]},
        "forcing": {"kind": "zero"},
        "grid_points": 101,
        "classical": {"x0": [1.0], "x1": [-1.0]},
        "taus": [0.2, 0.1, 0.05, 0.025],
        "convergence_history": "linear",
    },
    "zero_omega": {
        "omega": "diag:[0.0, 0.0]",
        "tau": 0.25,
        "tau0": 0.5,
        "horizon": 2.0,
        "history": {"kind": "polynomial", "coefficients": [[1.0, 0.5], [-1.0, 2.0]]},
        "forcing": {"kind": "zero"},
        "grid_points": 41,
        "taus": [0.2, 0.1, 0.05],
    },
    "singular": {
        "omega": [[1.0, 0.0], [0.0, 0.0]],
        "tau": 0.25,
        "tau0": 0.5,
        "horizon": 1.0,
        "history": {"kind": "trig", "amplitude": [1.0, 0.5], "frequency": 1.5},
        "grid_points": 21,
    },
}


def write_fixtures(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, cfg in FIXTURES.items():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(cfg, indent=2) + "\n")
        paths.append(path)
    return paths
