import numpy as np
import pytest

from borderdefense.assignment import build_assignment, optimal_assignment
from borderdefense.geometry import cooperative_lowest_point
from borderdefense.oracle import compare_assignment, grid_lowest_point
from borderdefense.state import GameState, SpeedTable


def test_grid_1v1():
    assert grid_lowest_point((0, 3), [(0, 0)], [0.5], 1e-3) == pytest.approx(2.0, abs=2e-3)


def test_grid_symmetric_pair():
    y = grid_lowest_point((5, 4), [(0, 0), (10, 0)], [0.5, 0.5], 1e-3)
    assert y == pytest.approx(1.403, abs=2e-3)


def test_grid_rejects_bad_resolution():
    with pytest.raises(ValueError):
        grid_lowest_point((0, 3), [(0, 0)], [0.5], 0.0)


def test_grid_matches_cooperative_random():
    rng = np.random.default_rng(31)
    for _ in range(40):
        e = (rng.uniform(-3, 3), rng.uniform(4, 10))
        pa = (rng.uniform(-8, 0), rng.uniform(0, 6))
        pb = (rng.uniform(0, 8), rng.uniform(0, 6))
        aa, ab = rng.uniform(0.4, 0.9, 2)
        c = cooperative_lowest_point(pa, pb, e, aa, ab)
        assert grid_lowest_point(e, [pa, pb], [aa, ab], 1e-3) == pytest.approx(c.y, abs=2e-3)


def test_third_pursuer_never_helps():
    rng = np.random.default_rng(32)
    for _ in range(20):
        e = (rng.uniform(-3, 3), rng.uniform(5, 10))
        ps = [(rng.uniform(-8, 8), rng.uniform(0, 5)) for _ in range(3)]
        al = rng.uniform(0.4, 0.9, 3)
        best = max(cooperative_lowest_point(ps[a], ps[b], e, al[a], al[b]).y
                   for a, b in ((0, 1), (0, 2), (1, 2)))
        assert grid_lowest_point(e, ps, al, 1e-3) == pytest.approx(best, abs=2e-3)


def test_compare_assignment_example1(ex1):
    st, sp = ex1
    rows = compare_assignment(st, sp, optimal_assignment(st, sp), 1e-3)
    assert set(rows) == {0, 1}
    assert all(r["error"] <= 2e-3 for r in rows.values())


def test_compare_assignment_skips_escapes():
    st = GameState([(0, 0)], [(0, 3)])
    sp = SpeedTable([1.0], [1.5])
    assert compare_assignment(st, sp, build_assignment(st, sp, {0: (0,)})) == {}
