import math

import numpy as np
import pytest

from borderdefense.assignment import build_assignment, optimal_assignment
from borderdefense.geometry import DegenerateConfigurationError
from borderdefense.state import GameState, SpeedTable
from borderdefense.strategy import HeadingCommand
from borderdefense.value import (DispersalSurfaceError, OutsideWinningRegionError, TooFewAssignmentsError,
                                 assignment_value, coop_derivs, coop_identities, dispersal_gap,
                                 finite_difference_gradient, hamiltonian, hji_residual, optimal_headings,
                                 plan_gradient, value, value_gradient)
from borderdefense.verification import random_2v1_simultaneous

from conftest import EX1_V, EX1_YS2


def test_value_examples(ex1):
    st, sp = ex1
    assert value(st, sp) == pytest.approx(EX1_V, abs=1e-3)
    a2 = build_assignment(st, sp, {0: (1,), 1: (0,)})
    assert assignment_value(st, sp, a2) == pytest.approx(EX1_YS2, abs=1e-3)
    assert value(GameState([(0, 0)], [(0, 3)]), SpeedTable([1.0], [0.5])) == pytest.approx(2.0)


def test_value_outside_winning_region():
    with pytest.raises(OutsideWinningRegionError):
        value(GameState([(0, 10)], [(0, 1)]), SpeedTable([1.0], [0.9]))


def test_gradient_example1(ex1):
    st, sp = ex1
    g = value_gradient(st, sp)
    a, d = 0.81, math.dist((-1.5, 4.2), (4.1, 11.0))
    expected = (1 - a * (11.0 - 4.2) / d) / (1 - a * a)
    assert g.evader(0)[1] == pytest.approx(expected, rel=1e-12)
    assert g.evader(0)[1] == pytest.approx(1.0897, abs=1e-3)
    # solo x-partials of a matched pair cancel
    assert g.evader(0)[0] == pytest.approx(-g.pursuer(0)[0], rel=1e-12)
    assert g.evader(1)[0] == pytest.approx(-g.pursuer(1)[0], rel=1e-12)
    fd = finite_difference_gradient(st, sp)
    assert np.allclose(g.vector, fd, rtol=1e-6, atol=1e-8)


def test_hji_example1(ex1):
    st, sp = ex1
    g = value_gradient(st, sp)
    assert abs(hji_residual(st, sp)) <= 1e-9 * sp.v_max * g.norm


def test_hji_random_simultaneous():
    rng = np.random.default_rng(21)
    for _ in range(50):
        st, sp = random_2v1_simultaneous(rng)
        g = value_gradient(st, sp)
        assert abs(hji_residual(st, sp)) <= 1e-9 * sp.v_max * g.norm
        fd = finite_difference_gradient(st, sp)
        assert np.max(np.abs(g.vector - fd) / np.maximum(np.abs(g.vector), 1.0)) <= 1e-5


def test_pursuer_deviation_lowers_value_growth(ex1):
    st, sp = ex1
    g = value_gradient(st, sp)
    hp, he = optimal_headings(st, sp)
    th = hp[0].angle + 0.1
    hp[0] = HeadingCommand(math.cos(th), math.sin(th))
    assert hamiltonian(st, sp, g, hp, he) < 0


def test_closed_form_gradient_matches_implicit():
    rng = np.random.default_rng(22)
    for _ in range(100):
        st, sp = random_2v1_simultaneous(rng)
        best = optimal_assignment(st, sp)
        plan = best.plans[0]
        a, b = plan.pursuers
        slow, fast = (a, b) if sp.pursuer_speeds[a] < sp.pursuer_speeds[b] else (b, a)
        cd = coop_derivs(st.pursuers[slow], st.pursuers[fast], st.evaders[0], sp.alpha(slow, 0),
                         sp.alpha(fast, 0), sp.pursuer_speeds[slow] / sp.pursuer_speeds[fast])
        assert cd.vs == pytest.approx(plan.y, rel=1e-9)
        g = plan_gradient(st, sp, 0, plan)
        # reorder the closed-form gradient (slow, fast, evader) onto the state vector
        mapped = np.zeros_like(g)
        mapped[2 * slow:2 * slow + 2] = cd.vs_gradient()[0:2]
        mapped[2 * fast:2 * fast + 2] = cd.vs_gradient()[2:4]
        mapped[4:6] = cd.vs_gradient()[4:6]
        assert np.allclose(g, mapped, rtol=1e-8, atol=1e-10)


def test_coop_identities():
    rng = np.random.default_rng(23)
    for _ in range(100):
        st, sp = random_2v1_simultaneous(rng)
        pair = optimal_assignment(st, sp).plans[0].pursuers
        res = coop_identities(st, sp, pair, 0)
        assert set(res) == {"sum_x_F", "sum_y_F", "sum_x_G", "sum_y_G", "euler_F", "euler_G"}
        assert max(res.values()) <= 1e-9
        moved = coop_identities(st.translated(7.0, 0.0), sp, pair, 0)
        assert max(moved.values()) <= 1e-9
        scaled = st.with_vector(2.0 * st.to_vector())
        assert max(coop_identities(scaled, sp, pair, 0).values()) <= 1e-9


def test_coop_identities_equal_speeds():
    st = GameState([(0, 0), (10, 0)], [(5, 4)])
    with pytest.raises(DegenerateConfigurationError):
        coop_identities(st, SpeedTable([1.0, 1.0], [0.5]), (0, 1), 0)


def test_dispersal_gap(ex1):
    assert dispersal_gap(*ex1) == pytest.approx(10.696 - 8.288, abs=2e-3)
    sym = GameState([(-5, 2), (5, 2)], [(0, 8), (0, 12)])
    sp = SpeedTable([1.0, 1.0], [0.7, 0.7])
    assert dispersal_gap(sym, sp) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(DispersalSurfaceError):
        value_gradient(sym, sp)
    with pytest.raises(TooFewAssignmentsError):
        dispersal_gap(GameState([(0, 0)], [(0, 3)]), SpeedTable([1.0], [0.5]))


def test_translation_and_vertical_shift(ex1):
    st, sp = ex1
    v0 = value(st, sp)
    assert value(st.translated(13.0, 0.0), sp) == pytest.approx(v0, rel=1e-12)
    assert value(st.translated(0.0, 2.5), sp) == pytest.approx(v0 + 2 * 2.5, rel=1e-12)


def test_frozen_payoff_counts():
    st = GameState([(-1.5, 4.2), (9.3, 4.5)], [(4.1, 11.0), (5.5, 12.2)], (True, False), (True, False),
                   (None, 7.0))
    sp = SpeedTable([1.0, 1.04], [0.81, 0.77])
    assert value(st, sp) == pytest.approx(7.0 + 3.2248, abs=1e-3)
