"""
Feedback guidance: aimpoints, unit headings and team policies.

All policies are closed loop; aimpoints are recomputed from the state they
are handed, once per simulator step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

from .assignment import (Assignment, NoFeasibleAssignmentError, PursuerSets, build_assignment,
                         capture_plan, enumerate_assignments, game_of_kind, optimal_assignment)
from .geometry import CapturePoint, Point2, apollonius_circle, cooperative_lowest_point, dist, lowest_point
from .state import GameState, SpeedTable

AT_AIMPOINT_EPS = 1e-12


class PolicyError(ValueError):
    pass


class AtAimpointError(ValueError):
    pass


@dataclass(frozen=True)
class HeadingCommand:
    cos_h: float
    sin_h: float

    @classmethod
    def from_angle(cls, theta: float) -> "HeadingCommand":
        return cls(math.cos(theta), math.sin(theta))

    @property
    def angle(self) -> float:
        return math.atan2(self.sin_h, self.cos_h)


OPTIMAL = "optimal"
FIXED_ASSIGNMENT = "fixed-assignment"
PURE_PURSUIT = "pure-pursuit"
WRONG_LOWEST_POINT = "wrong-lowest-point"
STRAIGHT_TO_BORDER = "straight-to-border"
FIXED_HEADING = "fixed-heading"
REASSIGN = "reassign"

POLICY_KINDS = (OPTIMAL, FIXED_ASSIGNMENT, PURE_PURSUIT, WRONG_LOWEST_POINT,
                STRAIGHT_TO_BORDER, FIXED_HEADING, REASSIGN)
_FORBIDDEN = {"evaders": {PURE_PURSUIT}, "pursuers": {STRAIGHT_TO_BORDER}}

AssignmentRef = Union[int, PursuerSets]


@dataclass(frozen=True)
class TeamPolicy:
    """How one team steers.

    ``assignment`` names the matching used by ``fixed-assignment`` and
    ``wrong-lowest-point``: either the 1-based structural index from
    :func:`enumerate_assignments` or an explicit ``{evader: (pursuers...)}``.
    ``angles`` holds one heading angle (radians) per agent of the team for
    ``fixed-heading``.
    """

    kind: str
    assignment: Optional[AssignmentRef] = None
    angles: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise PolicyError(f"unknown policy {self.kind!r}; valid: {', '.join(POLICY_KINDS)}")
        if self.kind in (FIXED_ASSIGNMENT, WRONG_LOWEST_POINT) and self.assignment is None:
            raise PolicyError(f"{self.kind} needs an assignment")
        if self.kind == FIXED_HEADING and self.angles is None:
            raise PolicyError("fixed-heading needs angles")

    def check_side(self, side: str) -> None:
        if side not in _FORBIDDEN:
            raise PolicyError(f"side must be 'pursuers' or 'evaders', got {side!r}")
        if self.kind in _FORBIDDEN[side]:
            raise PolicyError(f"{side} may not use {self.kind}")


def resolve_assignment(ref: AssignmentRef, state: GameState, speeds: SpeedTable) -> Assignment:
    if isinstance(ref, int):
        for a in enumerate_assignments(state, speeds):
            if a.index == ref:
                return a
        raise PolicyError(f"no assignment with index {ref}")
    return build_assignment(state, speeds, {int(j): tuple(ps) for j, ps in ref.items()})


def aimpoint_solo(p: Sequence[float], e: Sequence[float], alpha: float) -> Point2:
    return lowest_point(apollonius_circle(p, e, alpha)).point


def aimpoint_cooperative(p_a: Sequence[float], p_b: Sequence[float], e: Sequence[float],
                         alphas: Tuple[float, float], ids: Tuple[int, int] = (0, 1)) -> CapturePoint:
    """Shared aimpoint of a cooperating pair.

    When the lens bottom is a single circle's lowest point the result has
    mode ``"solo"`` and names only the capturing pursuer.
    """
    return cooperative_lowest_point(p_a, p_b, e, alphas[0], alphas[1], ids=ids)


def heading_to(frm: Sequence[float], aim: Sequence[float], eps: float = AT_AIMPOINT_EPS) -> HeadingCommand:
    dx, dy = aim[0] - frm[0], aim[1] - frm[1]
    n = math.hypot(dx, dy)
    if n < eps:
        raise AtAimpointError("agent is at its aimpoint")
    return HeadingCommand(dx / n, dy / n)


def current_engagement(state: GameState, speeds: SpeedTable) -> Assignment:
    """Optimal matching for the current state, or the best partial one."""
    try:
        return optimal_assignment(state, speeds)
    except NoFeasibleAssignmentError as exc:
        return exc.report.best_assignment


def _plans(state: GameState, speeds: SpeedTable, matching: PursuerSets) -> Dict[int, Optional[CapturePoint]]:
    return {j: capture_plan(state, speeds, j, ps) for j, ps in matching.items() if state.evader_active[j]}


def _aim_headings(state: GameState, speeds: SpeedTable, matching: PursuerSets, side: str) -> Dict[int, HeadingCommand]:
    out = {}
    for j, plan in _plans(state, speeds, matching).items():
        e = state.evaders[j]
        if side == "evaders":
            if plan is None:
                out[j] = HeadingCommand(0.0, -1.0)
                continue
            try:
                out[j] = heading_to(e, plan.point)
            except AtAimpointError:
                out[j] = HeadingCommand(0.0, -1.0)
            continue
        for i in matching[j]:
            if not state.pursuer_active[i]:
                continue
            # a committed pair member that is not needed shadows the capture point
            aim = plan.point if plan is not None else e
            try:
                out[i] = heading_to(state.pursuers[i], aim)
            except AtAimpointError:
                try:
                    out[i] = heading_to(state.pursuers[i], e)
                except AtAimpointError:
                    out[i] = HeadingCommand(0.0, 1.0)
    return out


def team_headings(state: GameState, speeds: SpeedTable, policy: TeamPolicy, side: str,
                  committed: Assignment) -> Dict[int, HeadingCommand]:
    """Headings for every active agent of ``side``.

    ``committed`` is the matching the pursuers locked at the start (or, for
    ``reassign``, their current one). Idle pursuers get no command.
    """
    policy.check_side(side)
    kind = policy.kind
    if kind == STRAIGHT_TO_BORDER:
        return {j: HeadingCommand(0.0, -1.0) for j in state.active_evaders()}
    if kind == FIXED_HEADING:
        idx = state.active_evaders() if side == "evaders" else state.active_pursuers()
        if side == "pursuers":
            idx = tuple(i for i in idx if i in committed.pursuer_of())
        return {k: HeadingCommand.from_angle(policy.angles[k]) for k in idx}
    if kind == PURE_PURSUIT:
        out = {}
        for j, ps in committed.pairs.items():
            if not state.evader_active[j]:
                continue
            for i in ps:
                if state.pursuer_active[i]:
                    try:
                        out[i] = heading_to(state.pursuers[i], state.evaders[j])
                    except AtAimpointError:
                        out[i] = HeadingCommand(0.0, 1.0)
        return out
    if kind == OPTIMAL:
        matching = committed.pairs
    elif kind == REASSIGN:
        matching = current_engagement(state, speeds).pairs
    else:
        ref = policy.assignment
        matching = resolve_assignment(ref, state, speeds).pairs if isinstance(ref, int) else ref
        if kind == FIXED_ASSIGNMENT and side == "pursuers":
            matching = committed.pairs
    return _aim_headings(state, speeds, matching, side)


def initial_commitment(state: GameState, speeds: SpeedTable, pursuer_policy: TeamPolicy,
                       allow_partial: bool = False) -> Assignment:
    """Matching the pursuers lock at t0 under ``pursuer_policy``."""
    if pursuer_policy.kind in (FIXED_ASSIGNMENT, WRONG_LOWEST_POINT):
        return resolve_assignment(pursuer_policy.assignment, state, speeds)
    if allow_partial:
        return game_of_kind(state, speeds).best_assignment
    return optimal_assignment(state, speeds)


def aimpoint_of(state: GameState, speeds: SpeedTable, j: int, pursuers: Sequence[int]) -> Optional[Point2]:
    plan = capture_plan(state, speeds, j, pursuers)
    return plan.point if plan is not None else None


def time_to(point: Sequence[float], frm: Sequence[float], speed: float) -> float:
    return dist(point, frm) / speed
