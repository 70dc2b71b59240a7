import math

import numpy as np
import pytest

from borderdefense.assignment import build_assignment, optimal_assignment
from borderdefense.sim import ContractViolation, EngagementTimeout, Scenario, run_engagement, step
from borderdefense.state import GameState, SpeedTable
from borderdefense.strategy import HeadingCommand, TeamPolicy, team_headings
from borderdefense.value import value

from conftest import EX1_AIM1, EX1_AIM2, EX1_V

OPT = TeamPolicy("optimal")


def test_step_trivial():
    st = GameState([(0, 0)], [(0, 5)])
    sp = SpeedTable([1.0], [0.5])
    new = step(st, sp, {0: HeadingCommand(1.0, 0.0)}, {}, 0.5)
    assert new.pursuers[0] == pytest.approx((0.5, 0))
    assert new.evaders[0] == (0, 5)
    assert new.time == 0.5


def test_step_frozen_and_contract():
    st = GameState([(0, 0)], [(0, 5)], (True,), (False,), (5.0,))
    sp = SpeedTable([1.0], [0.5])
    assert step(st, sp, {}, {}, 0.3).evaders == st.evaders
    with pytest.raises(ContractViolation):
        step(st, sp, {}, {0: HeadingCommand(0.0, -1.0)}, 0.1)
    with pytest.raises(ValueError):
        step(st, sp, {}, {}, 0.0)


def test_one_step_example1(ex1):
    st, sp = ex1
    best = optimal_assignment(st, sp)
    hp = team_headings(st, sp, OPT, "pursuers", best)
    he = team_headings(st, sp, OPT, "evaders", best)
    new = step(st, sp, hp, he, 1e-3)
    for i in range(2):
        assert math.dist(new.pursuers[i], st.pursuers[i]) == pytest.approx(sp.pursuer_speeds[i] * 1e-3)
    for j in range(2):
        assert math.dist(new.evaders[j], st.evaders[j]) == pytest.approx(sp.evader_speeds[j] * 1e-3)


@pytest.fixture(scope="module")
def ex1_optimal_log():
    st = GameState([(-1.5, 4.2), (9.3, 4.5)], [(4.1, 11.0), (5.5, 12.2)])
    sp = SpeedTable([1.0, 1.04], [0.81, 0.77])
    return Scenario(st, sp), run_engagement(Scenario(st, sp), OPT, OPT, keep_headings=True)


def test_example1_optimal_play(ex1_optimal_log):
    sc, log = ex1_optimal_log
    assert log.payoff == pytest.approx(EX1_V, abs=0.01)
    caps = {ev.evader: ev.location for ev in log.events}
    assert all(ev.kind == "capture" for ev in log.events)
    assert caps[0] == pytest.approx(EX1_AIM1, abs=0.01)
    assert caps[1] == pytest.approx(EX1_AIM2, abs=0.01)


def test_optimal_headings_constant(ex1_optimal_log):
    _, log = ex1_optimal_log
    first = log.headings[0]
    for rec in log.headings:
        for side in ("pursuers", "evaders"):
            for k, h in rec[side].items():
                assert abs(h.angle - first[side][k].angle) <= 1e-6


def test_straight_lines_under_optimal_play(ex1_optimal_log):
    sc, log = ex1_optimal_log
    st, sp = sc.state, sc.speeds
    pos = np.asarray(log.positions)
    tol = 10 * sc.dt * sp.v_max
    aims = {0: EX1_AIM1, 1: EX1_AIM2}
    starts = list(st.pursuers) + list(st.evaders)
    targets = [aims[0], aims[1], aims[0], aims[1]]  # P1->E1's point, P2->E2's point
    for k, (a, b) in enumerate(zip(starts, targets)):
        a, b = np.asarray(a), np.asarray(b)
        d = b - a
        for q in pos[:, 2 * k:2 * k + 2]:
            s = np.clip(np.dot(q - a, d) / np.dot(d, d), 0, 1)
            assert np.linalg.norm(q - (a + s * d)) <= tol + 1e-3


def test_committed_value_constant_along_optimal_play(ex1_optimal_log):
    sc, log = ex1_optimal_log
    committed = log.commitment.potential
    v0 = build_assignment(sc.state, sc.speeds, committed).value
    t_first = log.events[0].t
    tol = 10 * sc.dt * sc.speeds.v_max
    for t, x in zip(log.times[::200], log.positions[::200]):
        if t >= t_first:
            break
        st = sc.state.with_vector(np.asarray(x))
        assert abs(build_assignment(st, sc.speeds, committed).value - v0) <= tol


def test_uncommitted_value_rises_on_example1(ex1_optimal_log):
    # once the agents move, the swapped matching overtakes the committed one; pursuers bound
    # by their t0 commitment cannot exploit it, so the max over matchings is not invariant
    sc, log = ex1_optimal_log
    k = int(round(2.0 / sc.dt))
    st = sc.state.with_vector(np.asarray(log.positions[k]))
    assert value(st, sc.speeds) > value(sc.state, sc.speeds) + 1.0
    assert optimal_assignment(st, sc.speeds).pairs == {0: (1,), 1: (0,)}


def test_no_evader_below_border():
    st = GameState([(0, 20)], [(0, 1)])
    sp = SpeedTable([1.0], [0.9])
    sc = Scenario(st, sp, dt=0.07)
    log = run_engagement(sc, OPT, TeamPolicy("straight-to-border"), allow_partial=True)
    assert log.events[0].kind == "border"
    assert log.events[0].location.y == 0.0
    assert log.events[0].t == pytest.approx(1 / 0.9, rel=1e-12)
    assert min(p[3] for p in log.positions) >= -sc.capture_radius
    assert log.payoff == 0.0


def test_determinism(ex1):
    sc = Scenario(*ex1, dt=1e-2)
    a = run_engagement(sc, OPT, TeamPolicy("wrong-lowest-point", assignment={0: (1,), 1: (0,)}))
    b = run_engagement(sc, OPT, TeamPolicy("wrong-lowest-point", assignment={0: (1,), 1: (0,)}))
    assert a.positions == b.positions and a.times == b.times
    assert [e.as_dict() for e in a.events] == [e.as_dict() for e in b.events]
    assert a.payoff == b.payoff


def test_dt_refinement_first_order():
    # Euler is exact on straight lines, so the error comes from the capture radius; tie it to dt
    st = GameState([(-2.0, 1.0)], [(1.0, 4.0)])
    sp = SpeedTable([1.0], [0.6])
    v = value(st, sp)
    errs = []
    for dt in (1e-2, 1e-3, 1e-4):
        log = run_engagement(Scenario(st, sp, dt=dt, capture_radius=dt), OPT, OPT, sample_every=1000)
        errs.append(abs(log.payoff - v))
    assert errs[0] / errs[1] == pytest.approx(10, rel=0.2)
    assert errs[1] / errs[2] == pytest.approx(10, rel=0.2)


def test_timeout_keeps_partial_log(ex1):
    sc = Scenario(*ex1, dt=1e-2, t_max=1.0)
    with pytest.raises(EngagementTimeout) as exc:
        run_engagement(sc, OPT, OPT)
    assert exc.value.log.times[-1] >= 1.0
    assert len(exc.value.log.positions) > 50


def test_default_t_max(ex1):
    sc = Scenario(*ex1)
    assert sc.resolved_t_max() == pytest.approx(4 * sc.state.diameter() / 1.0)


def test_simultaneous_capture_event():
    st = GameState([(0, 0), (10, 0)], [(5, 4)])
    sp = SpeedTable([1.0, 1.0], [0.5])
    log = run_engagement(Scenario(st, sp, dt=1e-3), OPT, OPT)
    (ev,) = log.events
    assert ev.kind == "capture"
    assert ev.location == pytest.approx((5, 1.403), abs=5e-3)
    assert log.payoff == pytest.approx(value(st, sp), abs=5e-3)


def test_reassign_exploits_the_swap_on_example1(ex1):
    sc = Scenario(*ex1, dt=1e-2)
    a = run_engagement(sc, OPT, OPT)
    b = run_engagement(sc, TeamPolicy("reassign"), OPT)
    assert b.payoff > a.payoff + 1.0


def test_evaders_blind_to_the_pursuers_matching_lose_ground(ex1):
    # evaders steering against the optimal matching while the pursuers chase the swapped one
    sc = Scenario(*ex1, dt=1e-2)
    log = run_engagement(sc, TeamPolicy("fixed-assignment", assignment={0: (1,), 1: (0,)}),
                         TeamPolicy("fixed-assignment", assignment={0: (0,), 1: (1,)}))
    assert log.payoff > value(*ex1) + 1.0
