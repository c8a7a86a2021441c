"""The randomized scenario suite shared by the acceptance and adjudication tests."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from delayosc.scenarios import random_problem
from delayosc.solver import solve_classical, solve_mild
from delayosc.steps import integrate_segments

SUITE_SEED = 20251018
SUITE_SIZE = 20
HORIZON_TAUS = 10.0
# every STRIDE-th oracle grid point (plus segment ends) enters the sup-grid distance
STRIDE = 8


@lru_cache(maxsize=None)
def suite() -> tuple:
    """20 smooth problems, n <= 4, |omega| <= 2, tau in [0.25, 1], T = 10 tau; even indices forced."""
    rng = np.random.default_rng(SUITE_SEED)
    return tuple(random_problem(rng, forced=(i % 2 == 0), horizon_taus=HORIZON_TAUS)
                 for i in range(SUITE_SIZE))


def oracle_points(p):
    """(t, x_oracle) pairs on the step-oracle grid, h = 2 tau / 512."""
    n = int(round(p.horizon / (2 * p.tau)))
    segs = integrate_segments(p, n)
    out = []
    for seg in segs:
        ts = seg.times(p.tau)
        idx = list(range(0, ts.size, STRIDE))
        if idx[-1] != ts.size - 1:
            idx.append(ts.size - 1)
        out.extend((float(ts[k]), seg.x[k]) for k in idx)
    return out


@lru_cache(maxsize=None)
def distances(index: int) -> dict:
    """Sup-grid distances for suite problem ``index``."""
    p = suite()[index]
    d = {"classical": 0.0, "derived": 0.0, "paper": 0.0, "mild_vs_classical": 0.0}
    for t, x in oracle_points(p):
        xc = solve_classical(p, t)
        xd = solve_mild(p, t, "derived")
        xp = solve_mild(p, t, "paper")
        d["classical"] = max(d["classical"], float(np.linalg.norm(xc - x)))
        d["derived"] = max(d["derived"], float(np.linalg.norm(xd - x)))
        d["paper"] = max(d["paper"], float(np.linalg.norm(xp - x)))
        d["mild_vs_classical"] = max(d["mild_vs_classical"], float(np.linalg.norm(xd - xc)))
    return d
