"""Group model: word metric, growth, Diophantine margins, Haar, fixed sets."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftindex import group_model as gm

GOLDEN = gm.GOLDEN_CONJUGATE


@pytest.fixture(scope="module")
def dense():
    return gm.GroupSpec(kind="dense-rotation", theta=GOLDEN)


@pytest.fixture(scope="module")
def z4():
    return gm.GroupSpec(kind="finite-cyclic", order=4)


# ---- spec validation ----

def test_rational_theta_rejected():
    with pytest.raises(gm.GroupModelError):
        gm.GroupSpec(kind="dense-rotation", theta=0.25)
    with pytest.raises(gm.GroupModelError):
        gm.GroupSpec(kind="dense-rotation", theta=0.1)


def test_asymmetric_generators_rejected():
    with pytest.raises(gm.GroupModelError):
        gm.GroupSpec(kind="dense-rotation", theta=GOLDEN, generators=(1,))


def test_finite_needs_positive_order():
    with pytest.raises(gm.GroupModelError):
        gm.GroupSpec(kind="finite-cyclic", order=0)


# ---- word_length ----

def _bfs_word_length(target, generators, order=None):
    # independent breadth-first oracle over words
    if target == 0:
        return 0
    frontier = {0}
    seen = {0}
    for length in range(1, 64):
        frontier = {
            (g + s) % order if order else g + s
            for g in frontier for s in generators
        }
        if target in frontier:
            return length
        frontier -= seen
        seen |= frontier
    raise AssertionError("oracle did not reach target")


def test_word_length_identity(dense):
    assert gm.word_length(0, dense) == 0


def test_word_length_generator(dense):
    assert gm.word_length(1, dense) == 1


def test_word_length_k5_bfs_oracle(dense):
    assert gm.word_length(5, dense) == _bfs_word_length(5, (1, -1)) == 5


@given(st.integers(min_value=-40, max_value=40))
@settings(max_examples=30, deadline=None)
def test_word_length_symmetric(k):
    spec = gm.GroupSpec(kind="dense-rotation", theta=GOLDEN)
    assert gm.word_length(k, spec) == gm.word_length(-k, spec)


def test_word_length_finite_wraps(z4):
    assert gm.word_length(3, z4) == 1  # 3 = -1 mod 4


# ---- growth_census ----

def test_census_z(dense):
    counts, _ = gm.growth_census(dense, 3)
    assert counts.tolist() == [1, 3, 5, 7]


def test_census_z4_saturates(z4):
    counts, degree = gm.growth_census(z4, 10)
    assert counts[-1] == 4 and counts[2:].tolist() == [4] * 9
    assert degree < 0.5


def test_census_two_generators():
    spec = gm.GroupSpec(kind="dense-rotation", theta=GOLDEN, generators=(1, -1, 2, -2))
    counts, _ = gm.growth_census(spec, 2)
    # oracle: enumerate words of length <= 2 over {+-1, +-2}
    gens = [1, -1, 2, -2]
    reach = {0} | set(gens) | {a + b for a, b in itertools.product(gens, gens)}
    assert counts.tolist() == [1, 5, 9]
    assert counts[2] == len(reach)


def test_census_nondecreasing_and_poly_bounded(dense):
    counts, degree = gm.growth_census(dense, 32)
    assert np.all(np.diff(counts) >= 0)
    ks = np.arange(1, 33, dtype=float)
    c = np.max(counts[1:] / ks**degree)
    assert np.all(counts[1:] <= 1.0001 * c * ks**degree)


# ---- diophantine_margin ----

def test_margin_golden_k1(dense):
    margin, ok = gm.diophantine_margin(dense, 1, C=0.1, N=2.0)
    # oracle: circle distance of 2*pi*theta from 0 is 2*pi*(1-theta)
    expected = 2 * np.pi * (1 - GOLDEN)
    assert ok and margin == pytest.approx(expected, rel=1e-12)


def test_margin_half_turn(z4):
    margin, ok = gm.diophantine_margin(z4, 2, C=1.0, N=3.0)
    assert ok and margin == pytest.approx(np.pi * 2**3, rel=1e-12)


def test_margin_rejects_identity(dense, z4):
    with pytest.raises(gm.GroupModelError):
        gm.diophantine_margin(dense, 0, 0.1, 2.0)
    with pytest.raises(gm.GroupModelError):
        gm.diophantine_margin(z4, 4, 0.1, 2.0)


def test_sweep_matches_convergent_oracle(dense):
    kmax = 2000
    worst_k, worst, ok = gm.diophantine_sweep(dense, kmax, C=0.05, N=2.0)
    assert ok and worst > 0
    dens = gm.convergent_denominators(GOLDEN, kmax)
    oracle = min(gm.diophantine_margin(dense, q, 0.05, 2.0)[0] for q in dens)
    assert worst == pytest.approx(oracle, rel=1e-12)
    assert worst_k in dens


# ---- haar_average ----

def test_haar_constant(dense):
    tab = gm.conjugacy_table(dense, 2)
    assert gm.haar_average(lambda a: 3.25, 0, tab) == pytest.approx(3.25)


def test_haar_first_mode_vanishes(dense):
    tab = gm.conjugacy_table(dense, 2)
    assert abs(gm.haar_average(lambda a: np.exp(1j * a), 0, tab)) < 1e-12


def test_haar_cos_squared(dense):
    tab = gm.conjugacy_table(dense, 2)
    assert gm.haar_average(lambda a: np.cos(a) ** 2, 0, tab) == pytest.approx(0.5, abs=1e-12)


def test_haar_finite_exact(z4):
    tab = gm.conjugacy_table(z4, 2)
    vals = [np.exp(1j * 2 * np.pi * j / 4) for j in range(4)]
    assert gm.haar_average(lambda a: np.exp(1j * a), 0, tab) == pytest.approx(np.mean(vals), abs=1e-14)


def test_haar_rejects_few_points(dense):
    tab = gm.conjugacy_table(dense, 2)
    with pytest.raises(gm.GroupModelError):
        gm.haar_average(lambda a: 1.0, 0, tab, quadrature_points=2)


@given(st.integers(min_value=1, max_value=12))
@settings(max_examples=12, deadline=None)
def test_haar_kills_nonconstant_modes(mode):
    spec = gm.GroupSpec(kind="dense-rotation", theta=GOLDEN)
    tab = gm.conjugacy_table(spec, 2)
    val = gm.haar_average(lambda a: np.exp(1j * mode * a) + np.exp(-1j * mode * a), 0, tab)
    assert abs(val) < 1e-12


# ---- fixed sets ----

def test_fixed_sets(dense, z4):
    assert gm.fixed_set(0, dense).kind == gm.WHOLE
    assert gm.fixed_set(1, dense).kind == gm.EMPTY
    assert gm.fixed_set(2, z4).kind == gm.EMPTY


def test_isolated_fixed_set_constructor():
    rot = [[0.0, -1.0], [1.0, 0.0]]
    fs = gm.FixedSet.isolated(3, [((0.0, 0.0), rot)])
    assert fs.kind == gm.ISOLATED and fs.points[0][1].shape == (2, 2)


# ---- codifferential action ----

def test_codifferential_identity(dense):
    act = gm.codifferential_action(0, dense)
    assert act.on_cosphere(+1, 1.0) == (+1, pytest.approx(1.0))
    assert act.on_double_ball(1.0, 2.0) == (pytest.approx(1.0), 2.0)


def test_codifferential_generator(dense):
    act = gm.codifferential_action(1, dense)
    xi, x = act.on_cosphere(+1, 0.0)
    assert xi == +1 and x == pytest.approx(2 * np.pi * GOLDEN)


def test_codifferential_is_group_action(dense, z4):
    xs = np.linspace(0, 2 * np.pi, 13, endpoint=False)
    for spec, pairs in ((dense, [(2, 3), (-1, 4)]), (z4, [(1, 2), (3, 3)])):
        for g, h in pairs:
            act_g = gm.codifferential_action(g, spec)
            act_h = gm.codifferential_action(h, spec)
            act_gh = gm.codifferential_action(spec.compose(g, h), spec)
            for x in xs:
                _, via_pair = act_g.on_cosphere(+1, act_h.on_cosphere(+1, x)[1])
                _, direct = act_gh.on_cosphere(+1, x)
                assert gm.circle_dist(via_pair, direct) < 1e-12


def test_conjugacy_table_partitions(z4):
    tab = gm.conjugacy_table(z4, 4)
    reps = tab.representatives()
    assert sorted(reps) == [0, 1, 2, 3]
    for cls in tab.classes:
        assert cls.members == (cls.representative,)
        assert cls.centralizer == "Z/4"
