import math

import numpy as np
import pytest
from scipy.optimize import brentq

from qcorr import extremal, measures, states
from qcorr.errors import ConstraintInfeasible

import oracles

LOG2_3 = math.log2(3)


# ---------------------------------------------------------------- dense sweep oracle
#
# Each candidate family is written out as an explicit matrix.  At fixed first
# parameter the entropy is monotone in the second one, so brentq solves the
# entropy constraint; discord is the grid brute force of the oracle module.

def _x(r11, r22, r33, r44, r14):
    m = np.diag([r11, r22, r33, r44]).astype(complex)
    m[0, 3] = m[3, 0] = r14
    return m


def _r_matrix(a, r):
    return _x((1 - a) / 2, a, 0.0, (1 - a) / 2, r / 2)


def _p_matrix(a, b):
    return _x(a / 2, (1 - a - b) / 2, (1 - a + b) / 2, a / 2, a / 2)


def _w_matrix(f):
    return _x((1 + f) / 4, (1 - f) / 4, (1 - f) / 4, (1 + f) / 4, f / 2)


def _solve_second(make, first, target):
    hi = 1 - first
    g = lambda y: oracles.entropy(make(first, y)) - target
    if g(0.0) < 0 or g(hi) > 0:
        return None
    return brentq(g, 0.0, hi, xtol=1e-13)


def sweep_oracle(target, n=200):
    best = (-1.0, None)
    for name, make in (("R", _r_matrix), ("P", _p_matrix)):
        lo, hi, fam_best = 0.0, 1.0, (-1.0, None)
        for _ in range(4):  # successive zooms around the best grid value
            for first in np.linspace(lo, hi, n):
                y = _solve_second(make, first, target)
                if y is not None:
                    v = oracles.discord_brute(make(first, y), n=2000, refine=2)
                    fam_best = max(fam_best, (v, first, y))
            width = 4 * (hi - lo) / (n - 1)
            lo, hi = max(fam_best[1] - width, 0.0), min(fam_best[1] + width, 1.0)
            n = 41
        if fam_best[1] is not None:
            # a grid minimum overestimates discord; redo the winner at full resolution
            best = max(best, (oracles.discord_brute(make(*fam_best[1:])), name))
    # the b = 0 edge of P, where S(a) peaks at a = 1/3
    for lo, hi in ((0.0, 1 / 3), (1 / 3, 1.0)):
        g = lambda a: oracles.entropy(_p_matrix(a, 0.0)) - target
        if g(lo) * g(hi) <= 0:
            a = brentq(g, lo, hi, xtol=1e-13)
            best = max(best, (oracles.discord_brute(_p_matrix(a, 0.0)), "P"))
    for lo, hi in ((0.0, 1.0), (-1 / 3, 0.0)):
        g = lambda f: oracles.entropy(_w_matrix(f)) - target
        if g(lo) * g(hi) <= 0:
            f = brentq(g, lo, hi, xtol=1e-13)
            best = max(best, (oracles.discord_brute(_w_matrix(f)), "W"))
    return best


# ---------------------------------------------------------------- max_measure_at_entropy

@pytest.mark.parametrize("measure", extremal.MEASURES)
def test_limits(measure):
    top = extremal.max_measure_at_entropy(measure, 0.0)
    assert top.value == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(top.state().matrix, states.werner(1.0).matrix, atol=1e-6)
    bottom = extremal.max_measure_at_entropy(measure, 2.0)
    assert bottom.value == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_allclose(bottom.state().matrix, np.eye(4) / 4, atol=1e-12)


def test_werner_range_point_matches_sweep():
    bp = extremal.max_measure_at_entropy("discord", 1.0)
    assert bp.tag == "W"
    value, family = sweep_oracle(1.0)
    assert family == "W"
    assert bp.value == pytest.approx(value, abs=1e-6)
    f = bp.params["f"]
    assert bp.value == pytest.approx(measures.discord_left(states.werner(f)), abs=1e-9)


@pytest.mark.parametrize("target", [0.5, 1.45, 1.52])
def test_boundary_dominates_sweep(target):
    # the sweep only visits the three families, so it can never beat the boundary
    bp = extremal.max_measure_at_entropy("discord", target)
    value, _ = sweep_oracle(target)
    assert bp.value >= value - 1e-6
    assert bp.value - value < 1e-4


@pytest.mark.parametrize("measure", extremal.MEASURES)
@pytest.mark.parametrize("target", [0.3, 0.9, 1.2, 1.45, 1.52, 1.8])
def test_boundary_point_reevaluates(measure, target):
    bp = extremal.max_measure_at_entropy(measure, target)
    s, v = bp.reevaluate()
    assert s == pytest.approx(target, abs=1e-6)
    assert v == pytest.approx(bp.value, abs=1e-6)


def test_family_tags_follow_entropy():
    expected = {0.5: "R", 1.2: "W", 1.45: "P(b=0)", 1.52: "P", 1.8: "W"}
    for s, tag in expected.items():
        assert extremal.max_measure_at_entropy("discord", s).tag == tag


@pytest.mark.parametrize("bad", [-0.1, 2.1, float("nan")])
def test_infeasible_entropy(bad):
    with pytest.raises(ConstraintInfeasible):
        extremal.max_measure_at_entropy("discord", bad)


def test_unknown_measure():
    with pytest.raises(ValueError):
        extremal.max_measure_at_entropy("entanglement", 1.0)


def test_lagrange_problem_constraint_and_multiplier():
    prob = extremal.LagrangeProblem("discord", 1.2)
    bp = prob.solve()
    s, _ = bp.reevaluate()
    assert abs(s - 1.2) < 1e-8
    # the boundary decreases with entropy, so the multiplier is positive
    assert prob.multiplier > 0
    fd = (extremal.max_measure_at_entropy("discord", 1.21).value
          - extremal.max_measure_at_entropy("discord", 1.19).value) / 0.02
    assert prob.multiplier == pytest.approx(-fd, rel=1e-2)


# ---------------------------------------------------------------- crossings and continuity

@pytest.fixture(scope="module")
def crossings():
    return extremal.family_crossings()


def test_crossings_count_and_order(crossings):
    assert len(crossings) == 4
    assert crossings == sorted(crossings)


def test_boundary_continuous_at_crossings(crossings):
    for c in crossings:
        lo = extremal.max_measure_at_entropy("discord", c - 1e-4)
        hi = extremal.max_measure_at_entropy("discord", c + 1e-4)
        assert lo.tag != hi.tag
        assert abs(lo.value - hi.value) < 1e-3


def test_tie_break_prefers_earlier_family():
    # exactly at log2 3 the P(b=0) state (a = 1/3) and the Werner branch meet
    bp = extremal.max_measure_at_entropy("discord", LOG2_3)
    assert bp.tag in ("P(b=0)", "P")


# ---------------------------------------------------------------- r*, a*

def test_r_star_endpoints():
    assert extremal.r_star(0.0) == 1.0
    with pytest.raises(ValueError):
        extremal.r_star(0.5)


def _r_slice_argmax_oracle(target, n=400):
    """Dense a grid over the R slice at fixed entropy."""
    best = (-1.0, None, None)
    for a in np.linspace(0, 1 / 3, n):
        r = _solve_second(_r_matrix, a, target)
        if r is None:
            continue
        v = measures.discord_x(measures.XSummary.from_entries((1 - a) / 2, a, 0.0, (1 - a) / 2, r / 2))
        best = max(best, (v, a, r))
    return best


def test_r_star_matches_dense_grid():
    r = extremal.r_star(0.2)
    s = oracles.entropy(_r_matrix(0.2, r))
    _, a_grid, r_grid = _r_slice_argmax_oracle(s)
    assert a_grid == pytest.approx(0.2, abs=2e-3)
    assert r_grid == pytest.approx(r, abs=2e-3)


def test_r_star_one_third_is_edge_optimum():
    r = extremal.r_star(1 / 3)
    assert 0 < r < 2 / 3
    s = oracles.entropy(_r_matrix(1 / 3, r))
    _, a_grid, _ = _r_slice_argmax_oracle(s)
    assert a_grid == pytest.approx(1 / 3, abs=2e-3)


def test_a_star_zero():
    assert extremal.a_star(0.0) == pytest.approx(1 / 3)
    # at log2 3 the P-slice optimum is (1/3, 0)
    bp = extremal.family_best("P", "discord", LOG2_3 - 1e-9)
    assert bp.params["a"] == pytest.approx(1 / 3, abs=1e-4)
    assert bp.params["b"] == pytest.approx(0.0, abs=1e-4)


def test_a_star_interior_consistent():
    b = 0.1
    a = extremal.a_star(b)
    s = oracles.entropy(_p_matrix(a, b))
    bp = extremal.family_best("P", "discord", s)
    assert bp.params["b"] == pytest.approx(b, abs=1e-4)
    assert bp.params["a"] == pytest.approx(a, abs=1e-4)


# ---------------------------------------------------------------- MID boundary

def test_mid_boundary_examples():
    bp = extremal.mid_boundary(0.5)
    assert bp.value == 1.0 and bp.family == "beta"
    assert measures.mid(bp.state()) == pytest.approx(1.0, abs=1e-9)
    assert oracles.entropy(bp.state().matrix) == pytest.approx(0.5, abs=1e-9)
    bp = extremal.mid_boundary(1.5)
    assert bp.value == pytest.approx(0.5) and bp.family == "delta"
    assert measures.mid(bp.state()) == pytest.approx(0.5, abs=1e-9)
    assert extremal.mid_boundary(2.0).value == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ConstraintInfeasible):
        extremal.mid_boundary(2.5)


@pytest.mark.parametrize("s", np.linspace(0, 2, 9))
def test_mid_boundary_reevaluates(s):
    bp = extremal.mid_boundary(s)
    ent, v = bp.reevaluate()
    assert ent == pytest.approx(s, abs=1e-6) and v == pytest.approx(bp.value, abs=1e-6)


# ---------------------------------------------------------------- A versus two-way discord

def test_amid_vs_discord_endpoints():
    assert extremal.amid_vs_discord_upper_boundary(0.0).value == 0.0
    bp = extremal.amid_vs_discord_upper_boundary(1.0)
    assert bp.value == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        extremal.amid_vs_discord_upper_boundary(1.5)


def test_amid_vs_discord_half():
    bp = extremal.amid_vs_discord_upper_boundary(0.5)
    d, a = bp.reevaluate()
    assert d == pytest.approx(0.5, abs=1e-6)
    assert a == pytest.approx(bp.value, abs=1e-6)
    assert bp.value >= 0.5
    # random X states mixed down to D<-> = 0.5 never beat the boundary
    rng = np.random.default_rng(3)
    for _ in range(40):
        res = extremal._constrained_amid(extremal._x_from_vector(rng.normal(size=6)), 0.5)
        if res is not None:
            assert res[0] <= bp.value + 1e-6
