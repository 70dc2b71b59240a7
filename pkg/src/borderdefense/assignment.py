"""
Pursuer-to-evader assignments.

Every evader receives one pursuer or a cooperating pair. A potential pair is
kept as a pair only when the pair's lens actually forces a simultaneous
capture; otherwise it collapses onto the pursuer that captures alone and the
other member is freed. Assignments are ranked by the summed capture heights.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import CapturePoint, apollonius_circle, cooperative_lowest_point, lowest_point
from .state import GameState, SpeedTable

DEFAULT_PLAYER_LIMIT = 16
TIE_REL = 1e-9


class AssignmentError(ValueError):
    pass


class NoFeasibleAssignmentError(AssignmentError):
    def __init__(self, msg: str, report: "GameOfKindReport" = None):
        super().__init__(msg)
        self.report = report


class CombinatorialLimitError(AssignmentError):
    pass


PursuerSets = Dict[int, Tuple[int, ...]]


@dataclass(frozen=True)
class Assignment:
    """One way of matching pursuers to evaders.

    ``potential`` is the matching examined (evader -> 1 or 2 pursuers),
    ``pairs`` the matching after collapsing pairs that do not cooperate, and
    ``plans`` the capture point per evader (``None`` when no assigned pursuer
    is faster than the evader). ``index`` is the 1-based position in the
    structural enumeration order, which is how scenarios name assignments.
    """

    index: int
    potential: PursuerSets
    pairs: PursuerSets
    plans: Dict[int, Optional[CapturePoint]]
    value: float

    @property
    def contributions(self) -> Dict[int, float]:
        return {j: (p.y if p is not None else -math.inf) for j, p in self.plans.items()}

    @property
    def unstoppable(self) -> FrozenSet[int]:
        return frozenset(j for j, y in self.contributions.items() if not y > 0.0)

    @property
    def feasible(self) -> bool:
        return not self.unstoppable

    @property
    def key(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(self.pairs[j] for j in sorted(self.pairs))

    def pursuer_of(self) -> Dict[int, int]:
        """Map pursuer -> evader under the reduced matching."""
        return {i: j for j, ps in self.pairs.items() for i in ps}

    def mu(self, n_pursuers: int, n_evaders: int) -> np.ndarray:
        m = np.zeros((n_pursuers, n_evaders), dtype=int)
        for j, ps in self.pairs.items():
            for i in ps:
                m[i, j] = 1
        return m


@dataclass(frozen=True)
class GameOfKindReport:
    winner: str
    unstoppable_evaders: FrozenSet[int]
    best_assignment: Assignment


def capture_plan(state: GameState, speeds: SpeedTable, j: int,
                 pursuers: Sequence[int]) -> Optional[CapturePoint]:
    """Capture point of evader ``j`` against the given pursuers (1 or 2)."""
    usable = [i for i in pursuers if speeds.allowed(i, j)]
    e = state.evaders[j]
    if not usable:
        return None
    if len(usable) == 1:
        i = usable[0]
        return lowest_point(apollonius_circle(state.pursuers[i], e, speeds.alpha(i, j)), i)
    a, b = usable
    return cooperative_lowest_point(state.pursuers[a], state.pursuers[b], e,
                                    speeds.alpha(a, j), speeds.alpha(b, j), ids=(a, b))


def build_assignment(state: GameState, speeds: SpeedTable, potential: PursuerSets,
                     index: int = 0) -> Assignment:
    plans = {}
    pairs = {}
    for j in sorted(potential):
        plan = capture_plan(state, speeds, j, potential[j])
        plans[j] = plan
        pairs[j] = tuple(plan.pursuers) if plan is not None else tuple(potential[j])
    value = sum(p.y if p is not None else -math.inf for p in plans.values())
    return Assignment(index, dict(potential), pairs, plans, value)


def pair_feasible(p: int, e: int, state: GameState, speeds: SpeedTable) -> bool:
    if not speeds.allowed(p, e):
        return False
    c = apollonius_circle(state.pursuers[p], state.evaders[e], speeds.alpha(p, e))
    return lowest_point(c).y > 0.0


def _potential_matchings(pursuers: Sequence[int], evaders: Sequence[int]) -> Iterator[PursuerSets]:
    # every evader gets 1 or 2 pursuers; as many pursuers as possible are used
    n_pairs = min(len(pursuers) - len(evaders), len(evaders))

    def rec(k: int, free: Tuple[int, ...], pairs_left: int, acc: PursuerSets):
        if k == len(evaders):
            yield dict(acc)
            return
        j = evaders[k]
        remaining_after = len(evaders) - k - 1
        if pairs_left > 0:
            for combo in itertools.combinations(free, 2):
                acc[j] = combo
                rest = tuple(i for i in free if i not in combo)
                yield from rec(k + 1, rest, pairs_left - 1, acc)
        if remaining_after >= pairs_left:
            for i in free:
                acc[j] = (i,)
                rest = tuple(q for q in free if q != i)
                yield from rec(k + 1, rest, pairs_left, acc)
        acc.pop(j, None)

    # pairs first, matching the order in which cooperative options are listed
    yield from rec(0, tuple(pursuers), n_pairs, {})


def enumerate_assignments(state: GameState, speeds: SpeedTable,
                          player_limit: int = DEFAULT_PLAYER_LIMIT) -> List[Assignment]:
    """All assignments of active pursuers to active evaders, best first.

    Assignments in which some evader escapes are kept (see ``feasible``).
    """
    ps = state.active_pursuers()
    es = state.active_evaders()
    if len(ps) + len(es) > player_limit:
        raise CombinatorialLimitError(
            f"{len(ps)} pursuers + {len(es)} evaders exceeds the player limit {player_limit}")
    if len(ps) < len(es):
        raise AssignmentError(f"need at least as many pursuers as evaders ({len(ps)} < {len(es)})")
    out = [build_assignment(state, speeds, pot, k + 1)
           for k, pot in enumerate(_potential_matchings(ps, es))]
    out.sort(key=lambda a: (-a.value, a.key, a.index))
    return out


def tie_tolerance(value: float) -> float:
    return TIE_REL * max(1.0, abs(value))


def select_best(candidates: Sequence[Assignment]) -> Assignment:
    """Highest value; near-ties go to the lexicographically smallest matching."""
    best = max(a.value for a in candidates)
    eps = tie_tolerance(best)
    tied = [a for a in candidates if a.value >= best - eps]
    return min(tied, key=lambda a: (a.key, tuple(a.potential[j] for j in sorted(a.potential)), a.index))


def optimal_assignment(state: GameState, speeds: SpeedTable,
                       player_limit: int = DEFAULT_PLAYER_LIMIT) -> Assignment:
    allas = enumerate_assignments(state, speeds, player_limit)
    feasible = [a for a in allas if a.feasible]
    if not feasible:
        raise NoFeasibleAssignmentError("no assignment captures every evader",
                                        _kind_report(allas))
    return select_best(feasible)


def distinct_assignments(assignments: Sequence[Assignment]) -> List[Assignment]:
    """Drop rows whose reduced matching repeats an earlier (better) row."""
    seen = set()
    out = []
    for a in assignments:
        if a.key in seen:
            continue
        seen.add(a.key)
        out.append(a)
    return out


def _kind_report(allas: Sequence[Assignment]) -> GameOfKindReport:
    def captured_payoff(a: Assignment) -> float:
        return sum(y for y in a.contributions.values() if y > 0.0)

    fewest = min(len(a.unstoppable) for a in allas)
    group = [a for a in allas if len(a.unstoppable) == fewest]
    if fewest == 0:
        best = select_best(group)
    else:
        top = max(captured_payoff(a) for a in group)
        eps = tie_tolerance(top)
        best = min((a for a in group if captured_payoff(a) >= top - eps), key=lambda a: (a.key, a.index))
    winner = "pursuers" if fewest == 0 else "evaders-partial"
    return GameOfKindReport(winner, best.unstoppable, best)


def game_of_kind(state: GameState, speeds: SpeedTable,
                 player_limit: int = DEFAULT_PLAYER_LIMIT) -> GameOfKindReport:
    """Which side wins, and the assignment that saves the most evaders' worth of border."""
    return _kind_report(enumerate_assignments(state, speeds, player_limit))


def lowest_point_matrix(state: GameState, speeds: SpeedTable) -> np.ndarray:
    """Solo capture heights, pursuers by rows; forbidden pairs get -inf."""
    m = np.full((state.n_pursuers, state.n_evaders), -np.inf)
    for i in range(state.n_pursuers):
        for j in range(state.n_evaders):
            if speeds.allowed(i, j):
                c = apollonius_circle(state.pursuers[i], state.evaders[j], speeds.alpha(i, j))
                m[i, j] = lowest_point(c).y
    return m


def hungarian_assign(score) -> Tuple[Tuple[int, ...], float]:
    """Maximum-weight perfect matching of a square score matrix.

    Returns ``(perm, total)`` where row ``i`` is matched to column ``perm[i]``.
    """
    s = np.asarray(score, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise AssignmentError(f"score matrix must be square, got shape {s.shape}")
    finite = np.isfinite(s)
    work = s.copy()
    if not finite.all():
        # forbidden entries: large penalty keeps the solver well posed
        span = np.abs(s[finite]).max() if finite.any() else 1.0
        work[~finite] = -(span + 1.0) * (s.shape[0] + 1) * 10.0
    rows, cols = linear_sum_assignment(work, maximize=True)
    perm = tuple(int(c) for _, c in sorted(zip(rows, cols)))
    total = float(sum(s[i, perm[i]] for i in range(len(perm))))
    return perm, total
