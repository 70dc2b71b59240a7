"""
Brute-force reference for the lowest reachable point of an evader.

Works on a lattice of spacing ``resolution`` anchored at the evader and uses
nothing but the distance-ratio test |ES| <= alpha |PS| for every pursuer,
so it shares no code with the closed forms it is compared against.
"""
from __future__ import annotations

import math
from typing import Dict, Sequence

import numpy as np

from .assignment import Assignment
from .state import GameState, SpeedTable


def _reach_bound(e, pursuers, alphas) -> float:
    # |ES| <= alpha (|EP| + |ES|)  =>  |ES| <= alpha |EP| / (1 - alpha)
    return min(a * math.dist(e, p) / (1.0 - a) for p, a in zip(pursuers, alphas))


def _row_has_point(y: float, e, pursuers, alphas, xs: np.ndarray) -> bool:
    dy_e = (y - e[1]) ** 2
    ok = np.ones_like(xs, dtype=bool)
    de2 = (xs - e[0]) ** 2 + dy_e
    for p, a in zip(pursuers, alphas):
        dp2 = (xs - p[0]) ** 2 + (y - p[1]) ** 2
        ok &= de2 <= a * a * dp2
    return bool(ok.any())


def grid_lowest_point(e: Sequence[float], pursuers: Sequence[Sequence[float]], alphas: Sequence[float],
                      resolution: float = 1e-3) -> float:
    """Smallest lattice height holding a point every pursuer reaches no sooner than the evader.

    The evader's own lattice row always qualifies and the qualifying rows of
    a convex region are contiguous, so the lowest one is found by bisection.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    bound = _reach_bound(e, pursuers, alphas)
    n = int(math.ceil(bound / resolution)) + 1
    xs = e[0] + resolution * np.arange(-n, n + 1)
    lo, hi = 0, n  # rows below the evader: k = 0 qualifies, k = n does not
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _row_has_point(e[1] - mid * resolution, e, pursuers, alphas, xs):
            lo = mid
        else:
            hi = mid
    return e[1] - lo * resolution


def compare_assignment(state: GameState, speeds: SpeedTable, assignment: Assignment,
                       resolution: float = 1e-3) -> Dict[int, dict]:
    """Closed-form capture height vs the lattice minimum, per evader."""
    out = {}
    for j, ps in assignment.potential.items():
        usable = [i for i in ps if speeds.allowed(i, j)]
        plan = assignment.plans[j]
        if plan is None:
            continue
        grid = grid_lowest_point(state.evaders[j], [state.pursuers[i] for i in usable],
                                 [speeds.alpha(i, j) for i in usable], resolution)
        out[j] = {"pursuers": list(usable), "mode": plan.mode, "closed_form": plan.y,
                  "grid": grid, "error": abs(plan.y - grid)}
    return out
