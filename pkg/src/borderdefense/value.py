"""
Value of the game, its gradient, and the HJI check.

V(x) is the frozen payoff of already-finished evaders plus the best
assignment's summed capture heights. Solo terms have a closed-form gradient.
Simultaneous-capture terms are differentiated implicitly through the two
isochrony conditions; :func:`coop_derivs` gives the alternative route through
the F/G/D/R expression, which the tests and ``verify`` compare against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .assignment import (Assignment, GameOfKindReport, NoFeasibleAssignmentError, distinct_assignments,
                         enumerate_assignments, optimal_assignment, tie_tolerance)
from .geometry import (CapturePoint, DegenerateConfigurationError, apollonius_circle, closed_form_terms, dist,
                       lowest_point)
from .state import GameState, SpeedTable
from .strategy import HeadingCommand, TeamPolicy, team_headings


class GameValueError(ValueError):
    pass


class OutsideWinningRegionError(GameValueError):
    def __init__(self, msg: str, report: GameOfKindReport):
        super().__init__(msg)
        self.report = report


class DispersalSurfaceError(GameValueError):
    pass


class TooFewAssignmentsError(GameValueError):
    pass


@dataclass(frozen=True)
class ValueGradient:
    """dV/dx ordered pursuers then evaders, (d/dx, d/dy) per agent."""

    vector: np.ndarray
    n_pursuers: int

    def pursuer(self, i: int) -> Tuple[float, float]:
        return float(self.vector[2 * i]), float(self.vector[2 * i + 1])

    def evader(self, j: int) -> Tuple[float, float]:
        k = self.n_pursuers + j
        return float(self.vector[2 * k]), float(self.vector[2 * k + 1])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def _best(state: GameState, speeds: SpeedTable) -> Assignment:
    try:
        return optimal_assignment(state, speeds)
    except NoFeasibleAssignmentError as exc:
        raise OutsideWinningRegionError("state is outside the pursuers' winning region", exc.report) from exc


def value(state: GameState, speeds: SpeedTable) -> float:
    return state.frozen_payoff() + _best(state, speeds).value


def assignment_value(state: GameState, speeds: SpeedTable, assignment: Assignment) -> float:
    return state.frozen_payoff() + assignment.value


def dispersal_gap(state: GameState, speeds: SpeedTable) -> float:
    """Margin between the best and second-best distinct feasible assignments."""
    feas = distinct_assignments([a for a in enumerate_assignments(state, speeds) if a.feasible])
    if len(feas) < 2:
        raise TooFewAssignmentsError("need at least two feasible assignments")
    return feas[0].value - feas[1].value


def _solo_grad(p, e, alpha) -> Tuple[np.ndarray, np.ndarray]:
    d = dist(p, e)
    k = 1.0 / (1.0 - alpha * alpha)
    cx = (e[0] - p[0]) / d
    cy = (e[1] - p[1]) / d
    g_e = np.array([-alpha * k * cx, k * (1.0 - alpha * cy)])
    g_p = np.array([alpha * k * cx, alpha * k * (-alpha + cy)])
    return g_p, g_e


def _simultaneous_grad(point, p_a, p_b, e, alpha_a, alpha_b) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # isochrony: |I-E|^2 - alpha^2 |I-P|^2 = 0 for both pursuers
    I = np.asarray(point, float)
    E = np.asarray(e, float)
    Pa = np.asarray(p_a, float)
    Pb = np.asarray(p_b, float)
    A = np.array([2 * (I - E) - 2 * alpha_a ** 2 * (I - Pa),
                  2 * (I - E) - 2 * alpha_b ** 2 * (I - Pb)])
    # columns: Pa(x,y), Pb(x,y), E(x,y)
    B = np.zeros((2, 6))
    B[0, 0:2] = 2 * alpha_a ** 2 * (I - Pa)
    B[1, 2:4] = 2 * alpha_b ** 2 * (I - Pb)
    B[0, 4:6] = -2 * (I - E)
    B[1, 4:6] = -2 * (I - E)
    dI = -np.linalg.solve(A, B)
    dy = dI[1]
    return dy[0:2], dy[2:4], dy[4:6]


def plan_gradient(state: GameState, speeds: SpeedTable, j: int, plan: CapturePoint) -> np.ndarray:
    """Gradient of one evader's capture height over the full state vector."""
    n = state.n_pursuers
    g = np.zeros(2 * (n + state.n_evaders))
    e = state.evaders[j]
    ke = 2 * (n + j)
    if plan.mode == "solo":
        (i,) = plan.pursuers
        g_p, g_e = _solo_grad(state.pursuers[i], e, speeds.alpha(i, j))
        g[2 * i:2 * i + 2] += g_p
        g[ke:ke + 2] += g_e
        return g
    a, b = plan.pursuers
    g_a, g_b, g_e = _simultaneous_grad(plan.point, state.pursuers[a], state.pursuers[b], e,
                                       speeds.alpha(a, j), speeds.alpha(b, j))
    g[2 * a:2 * a + 2] += g_a
    g[2 * b:2 * b + 2] += g_b
    g[ke:ke + 2] += g_e
    return g


def value_gradient(state: GameState, speeds: SpeedTable) -> ValueGradient:
    best = _best(state, speeds)
    feas = distinct_assignments([a for a in enumerate_assignments(state, speeds) if a.feasible])
    for other in feas:
        if other.key != best.key and best.value - other.value <= tie_tolerance(best.value):
            raise DispersalSurfaceError("state lies on a dispersal surface; V is not differentiable here")
    g = np.zeros(2 * (state.n_pursuers + state.n_evaders))
    for j, plan in best.plans.items():
        g += plan_gradient(state, speeds, j, plan)
    return ValueGradient(g, state.n_pursuers)


def hamiltonian(state: GameState, speeds: SpeedTable, grad: ValueGradient,
                pursuer_headings: Dict[int, HeadingCommand],
                evader_headings: Dict[int, HeadingCommand]) -> float:
    """grad V . f(x, u_P, u_E) for the given headings."""
    total = 0.0
    for i, h in pursuer_headings.items():
        gx, gy = grad.pursuer(i)
        total += speeds.pursuer_speeds[i] * (gx * h.cos_h + gy * h.sin_h)
    for j, h in evader_headings.items():
        gx, gy = grad.evader(j)
        total += speeds.evader_speeds[j] * (gx * h.cos_h + gy * h.sin_h)
    return total


def optimal_headings(state: GameState, speeds: SpeedTable,
                     assignment: Optional[Assignment] = None):
    committed = assignment if assignment is not None else _best(state, speeds)
    opt = TeamPolicy("optimal")
    return (team_headings(state, speeds, opt, "pursuers", committed),
            team_headings(state, speeds, opt, "evaders", committed))


def hji_residual(state: GameState, speeds: SpeedTable) -> float:
    grad = value_gradient(state, speeds)
    hp, he = optimal_headings(state, speeds)
    return hamiltonian(state, speeds, grad, hp, he)


def finite_difference_gradient(state: GameState, speeds: SpeedTable, rel_step: float = 1e-6) -> np.ndarray:
    """Central differences of :func:`value` with h = rel_step * max(1, |coordinate|)."""
    x0 = state.to_vector()
    g = np.zeros_like(x0)
    for k in range(len(x0)):
        h = rel_step * max(1.0, abs(x0[k]))
        xp = x0.copy()
        xm = x0.copy()
        xp[k] += h
        xm[k] -= h
        g[k] = (value(state.with_vector(xp), speeds) - value(state.with_vector(xm), speeds)) / (2 * h)
    return g


def mode_margin(state: GameState, speeds: SpeedTable, assignment: Assignment) -> float:
    """Relative distance of every cooperative pairing from a solo/simultaneous switch.

    Returns ``inf`` when the assignment examines no pairs.
    """
    margin = math.inf
    for j, ps in assignment.potential.items():
        if len(ps) != 2 or not all(speeds.allowed(i, j) for i in ps):
            continue
        a, b = ps
        e = state.evaders[j]
        ca = apollonius_circle(state.pursuers[a], e, speeds.alpha(a, j))
        cb = apollonius_circle(state.pursuers[b], e, speeds.alpha(b, j))
        scale = max(ca.radius, cb.radius)
        la = lowest_point(ca).point
        lb = lowest_point(cb).point
        ga = (dist(la, cb.center) - cb.radius) / scale
        gb = (dist(lb, ca.center) - ca.radius) / scale
        rr = abs(ca.radius - cb.radius) / scale
        cc = dist(ca.center, cb.center) / scale
        margin = min(margin, abs(ga), abs(gb), abs(cc - rr))
    return margin


# ---------------------------------------------------------------------------
# closed-form route for a simultaneous capture

_COORDS = ("x_Pi", "y_Pi", "x_Pi'", "y_Pi'", "x_E", "y_E")


@dataclass(frozen=True)
class CoopDerivs:
    """F, G, D, R of the two-pursuer closed form and their partials.

    Partials are 6-vectors over (x_Pi, y_Pi, x_Pi', y_Pi', x_E, y_E) where
    Pi' is the faster pursuer.
    """

    F: float
    G: float
    D: float
    R: float
    dF: np.ndarray
    dG: np.ndarray
    dD: np.ndarray
    dR: np.ndarray
    theta: np.ndarray
    dx: float
    d_dx: np.ndarray

    @property
    def vs(self) -> float:
        return (self.F - abs(self.dx) * math.sqrt(self.G)) / self.D

    def vs_gradient(self) -> np.ndarray:
        sq = math.sqrt(self.G)
        s = math.copysign(1.0, self.dx)
        return (self.dF - s * sq * self.d_dx - abs(self.dx) * self.dG / (2.0 * sq) - self.vs * self.dD) / self.D


def coop_derivs(p_i: Sequence[float], p_iprime: Sequence[float], e: Sequence[float],
                alpha_i: float, alpha_iprime: float, alpha_pp: float) -> CoopDerivs:
    """Chain-rule partials of F, G, D, R through the circle centers and radii."""
    t = closed_form_terms(p_i, p_iprime, e, alpha_i, alpha_iprime, alpha_pp)
    ai2, aj2, a2 = alpha_i ** 2, alpha_iprime ** 2, alpha_pp ** 2
    ki, kj, kp = 1 / (1 - ai2), 1 / (1 - aj2), 1 / (1 - a2)
    xPi, yPi = p_i
    xPj, yPj = p_iprime
    xE, yE = e
    # intermediates u = (xi, yi, xj, yj, xp, yp, ri2, rj2, rp2); J = du/dtheta
    J = np.zeros((9, 6))
    J[0, 0], J[0, 4] = -ki * ai2, ki
    J[1, 1], J[1, 5] = -ki * ai2, ki
    J[2, 2], J[2, 4] = -kj * aj2, kj
    J[3, 3], J[3, 5] = -kj * aj2, kj
    J[4, 0], J[4, 2] = kp, -kp * a2
    J[5, 1], J[5, 3] = kp, -kp * a2
    ci = 2 * ai2 * ki * ki
    J[6, 4], J[6, 0] = ci * (xE - xPi), -ci * (xE - xPi)
    J[6, 5], J[6, 1] = ci * (yE - yPi), -ci * (yE - yPi)
    cj = 2 * aj2 * kj * kj
    J[7, 4], J[7, 2] = cj * (xE - xPj), -cj * (xE - xPj)
    J[7, 5], J[7, 3] = cj * (yE - yPj), -cj * (yE - yPj)
    cp = 2 * a2 * kp * kp
    J[8, 0], J[8, 2] = cp * (xPi - xPj), -cp * (xPi - xPj)
    J[8, 1], J[8, 3] = cp * (yPi - yPj), -cp * (yPi - yPj)

    xi, yi, xj, yj, xp, yp = t["xi"], t["yi"], t["xj"], t["yj"], t["xp"], t["yp"]
    rp2 = t["rp"] ** 2
    R, D = t["R"], t["D"]
    dX = xi - xj
    dY = yi - yj

    def e_(k):
        v = np.zeros(9)
        v[k] = 1.0
        return v

    u_dX = e_(0) - e_(2)
    u_dY = e_(1) - e_(3)
    u_R = -2 * xi * e_(0) + 2 * xj * e_(2) - 2 * yi * e_(1) + 2 * yj * e_(3) + e_(6) - e_(7)
    u_D = 2 * dX * u_dX + 2 * dY * u_dY
    H = R / 2 + xp * dX
    u_H = u_R / 2 + dX * e_(4) + xp * u_dX
    u_F = 2 * yp * dX * u_dX + dX * dX * e_(5) - H * u_dY - dY * u_H
    K = H + yp * dY
    u_K = u_H + dY * e_(5) + yp * u_dY
    u_G = D * e_(8) + rp2 * u_D - 2 * K * u_K

    theta = np.array([xPi, yPi, xPj, yPj, xE, yE], float)
    return CoopDerivs(t["F"], t["G"], D, R, u_F @ J, u_G @ J, u_D @ J, u_R @ J, theta, dX, u_dX @ J)


def _rel(terms: Sequence[float], rhs: float) -> float:
    lhs = float(np.sum(terms))
    scale = max(float(np.sum(np.abs(terms))), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


def coop_identities(state: GameState, speeds: SpeedTable, pair: Tuple[int, int], evader: int) -> Dict[str, float]:
    """Relative residuals of the translation and homogeneity identities of F and G.

    Keys: ``sum_x_F`` (=0), ``sum_y_F`` (=D), ``sum_x_G`` (=0), ``sum_y_G`` (=0),
    ``euler_F`` (=3F) and ``euler_G`` (=4G).
    """
    a, b = pair
    j = evader
    if speeds.pursuer_speeds[a] == speeds.pursuer_speeds[b]:
        raise DegenerateConfigurationError("equal pursuer speeds: the closed form is undefined")
    slow, fast = (a, b) if speeds.pursuer_speeds[a] < speeds.pursuer_speeds[b] else (b, a)
    cd = coop_derivs(state.pursuers[slow], state.pursuers[fast], state.evaders[j],
                     speeds.alpha(slow, j), speeds.alpha(fast, j),
                     speeds.pursuer_speeds[slow] / speeds.pursuer_speeds[fast])
    xs = [0, 2, 4]
    ys = [1, 3, 5]
    return {
        "sum_x_F": _rel(cd.dF[xs], 0.0),
        "sum_y_F": _rel(cd.dF[ys], cd.D),
        "sum_x_G": _rel(cd.dG[xs], 0.0),
        "sum_y_G": _rel(cd.dG[ys], 0.0),
        "euler_F": _rel(cd.theta * cd.dF, 3 * cd.F),
        "euler_G": _rel(cd.theta * cd.dG, 4 * cd.G),
    }
