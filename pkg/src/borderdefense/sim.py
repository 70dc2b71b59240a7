"""
Fixed-step engagement simulator.

Forward Euler on simple-motion kinematics, with capture and border events
located inside a step by exact interpolation along the (straight) step
segments. Captured evaders and their pursuers freeze in place.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from .assignment import Assignment
from .geometry import Point2
from .state import GameState, SpeedTable
from .strategy import (FIXED_ASSIGNMENT, REASSIGN, WRONG_LOWEST_POINT, HeadingCommand, TeamPolicy,
                       current_engagement, initial_commitment, resolve_assignment, team_headings)

DEFAULT_DT = 1e-3
DEFAULT_CAPTURE_RADIUS = 1e-3
SIMULTANEOUS_EVENT_TOL = 1e-12


class SimulationError(RuntimeError):
    pass


class ContractViolation(SimulationError):
    pass


class EngagementTimeout(SimulationError):
    def __init__(self, msg: str, log: "TrajectoryLog"):
        super().__init__(msg)
        self.log = log


@dataclass(frozen=True)
class Scenario:
    state: GameState
    speeds: SpeedTable
    dt: float = DEFAULT_DT
    capture_radius: float = DEFAULT_CAPTURE_RADIUS
    t_max: Optional[float] = None
    seed: int = 0

    def resolved_t_max(self) -> float:
        if self.t_max is not None:
            return self.t_max
        return 4.0 * self.state.diameter() / min(self.speeds.pursuer_speeds)


@dataclass(frozen=True)
class Event:
    t: float
    kind: str  # "capture" or "border"
    evader: int
    pursuers: Tuple[int, ...]
    location: Point2

    def as_dict(self) -> dict:
        return {"t": self.t, "kind": self.kind, "evader": self.evader,
                "pursuers": list(self.pursuers), "x": self.location.x, "y": self.location.y}


@dataclass
class TrajectoryLog:
    times: List[float] = field(default_factory=list)
    positions: List[Tuple[float, ...]] = field(default_factory=list)
    events: List[Event] = field(default_factory=list)
    payoff: float = math.nan
    terminal_time: float = math.nan
    commitment: Optional[Assignment] = None
    headings: List[Dict[str, Dict[int, HeadingCommand]]] = field(default_factory=list)

    def record(self, state: GameState) -> None:
        self.times.append(state.time)
        self.positions.append(tuple(state.to_vector()))


def step(state: GameState, speeds: SpeedTable, pursuer_headings: Dict[int, HeadingCommand],
         evader_headings: Dict[int, HeadingCommand], dt: float) -> GameState:
    """One forward-Euler step; agents without a command hold position."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    ps = list(state.pursuers)
    es = list(state.evaders)
    for i, h in pursuer_headings.items():
        if not state.pursuer_active[i]:
            raise ContractViolation(f"heading given to inactive pursuer {i}")
        v = speeds.pursuer_speeds[i]
        ps[i] = Point2(ps[i].x + v * h.cos_h * dt, ps[i].y + v * h.sin_h * dt)
    for j, h in evader_headings.items():
        if not state.evader_active[j]:
            raise ContractViolation(f"heading given to inactive evader {j}")
        v = speeds.evader_speeds[j]
        es[j] = Point2(es[j].x + v * h.cos_h * dt, es[j].y + v * h.sin_h * dt)
    return replace(state, pursuers=tuple(ps), evaders=tuple(es), time=state.time + dt)


def _first_close_approach(rel0: Tuple[float, float], rel1: Tuple[float, float], radius: float) -> Optional[float]:
    # smallest s in [0, 1] with |rel0 + s (rel1 - rel0)| <= radius
    dx, dy = rel1[0] - rel0[0], rel1[1] - rel0[1]
    a = dx * dx + dy * dy
    b = 2.0 * (rel0[0] * dx + rel0[1] * dy)
    c = rel0[0] ** 2 + rel0[1] ** 2 - radius * radius
    if c <= 0.0:
        return 0.0
    if a == 0.0:
        return None
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    s = (-b - math.sqrt(disc)) / (2.0 * a)
    return s if 0.0 <= s <= 1.0 else None


def _lerp(p: Point2, q: Point2, s: float) -> Point2:
    return Point2(p.x + s * (q.x - p.x), p.y + s * (q.y - p.y))


def _detect(old: GameState, new: GameState, matching: Dict[int, Tuple[int, ...]],
            radius: float) -> List[Tuple[float, int, str, Tuple[int, ...]]]:
    found = []
    for j in old.active_evaders():
        best = None
        e0, e1 = old.evaders[j], new.evaders[j]
        for i in matching.get(j, ()):
            if not old.pursuer_active[i]:
                continue
            p0, p1 = old.pursuers[i], new.pursuers[i]
            s = _first_close_approach((e0.x - p0.x, e0.y - p0.y), (e1.x - p1.x, e1.y - p1.y), radius)
            if s is not None and (best is None or s < best[0] - SIMULTANEOUS_EVENT_TOL):
                best = (s, j, "capture", (i,))
            elif s is not None and best is not None and abs(s - best[0]) <= SIMULTANEOUS_EVENT_TOL:
                best = (best[0], j, "capture", best[3] + (i,))
        if e1.y <= 0.0 < e0.y or e0.y <= 0.0:
            s = 0.0 if e0.y <= 0.0 else e0.y / (e0.y - e1.y)
            if best is None or s < best[0]:
                best = (s, j, "border", ())
        if best is not None:
            found.append(best)
    found.sort(key=lambda ev: (ev[0], ev[1]))
    return found


def _apply_events(old: GameState, new: GameState, found, matching, dt: float, log: TrajectoryLog) -> GameState:
    ps = list(new.pursuers)
    es = list(new.evaders)
    p_act = list(new.pursuer_active)
    e_act = list(new.evader_active)
    fy = list(new.frozen_y)
    for s, j, kind, capturers in found:
        loc = _lerp(old.evaders[j], new.evaders[j], s)
        if kind == "border":
            loc = Point2(loc.x, 0.0)
        es[j] = loc
        e_act[j] = False
        fy[j] = loc.y if kind == "capture" else 0.0
        for i in matching.get(j, ()):
            if old.pursuer_active[i]:
                ps[i] = _lerp(old.pursuers[i], new.pursuers[i], s)
                p_act[i] = False
        log.events.append(Event(old.time + s * dt, kind, j, tuple(sorted(capturers)), loc))
    return replace(new, pursuers=tuple(ps), evaders=tuple(es), pursuer_active=tuple(p_act),
                   evader_active=tuple(e_act), frozen_y=tuple(fy))


def _pin_policy(policy: TeamPolicy, state: GameState, speeds: SpeedTable) -> TeamPolicy:
    # resolve assignment indices once, at t0, so later index shifts do not matter
    if policy.kind in (FIXED_ASSIGNMENT, WRONG_LOWEST_POINT) and isinstance(policy.assignment, int):
        a = resolve_assignment(policy.assignment, state, speeds)
        return replace(policy, assignment=dict(a.pairs))
    return policy


def run_engagement(scenario: Scenario, pursuer_policy: TeamPolicy, evader_policy: TeamPolicy,
                   allow_partial: bool = False, sample_every: int = 1,
                   keep_headings: bool = False) -> TrajectoryLog:
    """Simulate until every evader is captured or has reached the border.

    The payoff sums the terminal evader heights; border arrivals count 0.
    """
    pursuer_policy.check_side("pursuers")
    evader_policy.check_side("evaders")
    state = scenario.state
    speeds = scenario.speeds
    dt = scenario.dt
    pursuer_policy = _pin_policy(pursuer_policy, state, speeds)
    evader_policy = _pin_policy(evader_policy, state, speeds)
    committed = initial_commitment(state, speeds, pursuer_policy, allow_partial)
    log = TrajectoryLog(commitment=committed)
    log.record(state)
    t_max = scenario.resolved_t_max()
    k = 0
    while state.active_evaders():
        if state.time >= t_max:
            log.payoff = math.nan
            log.terminal_time = state.time
            raise EngagementTimeout(f"t_max={t_max:g} reached with evaders still active", log)
        if pursuer_policy.kind == REASSIGN:
            committed = current_engagement(state, speeds)
        hp = team_headings(state, speeds, pursuer_policy, "pursuers", committed)
        he = team_headings(state, speeds, evader_policy, "evaders", committed)
        if keep_headings:
            log.headings.append({"pursuers": hp, "evaders": he})
        new = step(state, speeds, hp, he, dt)
        found = _detect(state, new, committed.pairs, scenario.capture_radius)
        if found:
            new = _apply_events(state, new, found, committed.pairs, dt, log)
        state = new
        k += 1
        if found or k % sample_every == 0 or not state.active_evaders():
            log.record(state)
    log.payoff = sum(state.frozen_y)
    log.terminal_time = log.events[-1].t if log.events else state.time
    return log
