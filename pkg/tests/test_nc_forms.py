"""Crossed-product differential forms, the exterior derivative, the trace."""

import numpy as np
import pytest

from shiftindex import group_model as gm
from shiftindex import nc_forms as nf

GRID = (32, 32)
GOLDEN = gm.GOLDEN_CONJUGATE


@pytest.fixture(scope="module")
def z2():
    return gm.GroupSpec(kind="finite-cyclic", order=2)


@pytest.fixture(scope="module")
def dense():
    return gm.GroupSpec(kind="dense-rotation", theta=GOLDEN)


def grid_xy(grid=GRID):
    gx, gb = grid
    x = 2 * np.pi * np.arange(gx) / gx
    b = 2 * np.pi * np.arange(gb) / gb
    return np.meshgrid(x, b, indexing="ij")


# ---- nc_product ----

def test_unit_is_identity(z2):
    a = nf.random_form(z2, 2, GRID, support=[0, 1], seed=1)
    unit = nf.NCForm.unit(z2, 2, GRID)
    left, _ = nf.nc_product(unit, a)
    right, _ = nf.nc_product(a, unit)
    assert (left - a).norm() < 1e-13
    assert (right - a).norm() < 1e-13


def test_pure_shifts_compose(z2):
    tg = nf.NCForm(z2, (1, 1), GRID, {1: nf.Graded.constant([[1.0]], GRID)})
    prod, _ = nf.nc_product(tg, tg)
    assert prod.support() == [0]
    assert np.allclose(prod.entry(0).c0, 1.0)


def test_one_forms_anticommute(z2):
    X, _ = grid_xy()
    a = nf.NCForm(z2, (1, 1), GRID, {0: nf.Graded((1, 1), GRID,
        c1x=np.cos(X)[None, None], c1b=np.sin(2 * X)[None, None])})
    b = nf.NCForm(z2, (1, 1), GRID, {0: nf.Graded((1, 1), GRID,
        c1x=np.sin(X)[None, None], c1b=np.cos(3 * X)[None, None])})
    ab, _ = nf.nc_product(a, b)
    ba, _ = nf.nc_product(b, a)
    # pointwise wedge oracle on the c2 component
    oracle = (np.cos(X) * np.cos(3 * X) - np.sin(2 * X) * np.sin(X))[None, None]
    assert np.abs(ab.entry(0).c2 - oracle).max() < 1e-13
    assert (ab + ba).norm() < 1e-13


def test_product_associative(dense):
    a = nf.random_form(dense, 2, GRID, support=[-1, 0], seed=2)
    b = nf.random_form(dense, 2, GRID, support=[0, 1], seed=3)
    c = nf.random_form(dense, 2, GRID, support=[1], seed=4)
    ab, _ = nf.nc_product(a, b)
    left, _ = nf.nc_product(ab, c)
    bc, _ = nf.nc_product(b, c)
    right, _ = nf.nc_product(a, bc)
    assert (left - right).norm() < 1e-10 * max(1.0, left.norm())


def test_mismatched_grid_rejected(z2):
    a = nf.random_form(z2, 1, (32, 32), support=[0], seed=5)
    b = nf.random_form(z2, 1, (16, 16), support=[0], seed=6)
    with pytest.raises(nf.FormError):
        nf.nc_product(a, b)


# ---- nc_d ----

def test_d_constant_zero(z2):
    unit = nf.NCForm.unit(z2, 3, GRID)
    assert nf.nc_d(unit).norm() == 0.0


def test_d_sin_is_cos_dx(z2):
    X, _ = grid_xy()
    f = nf.NCForm(z2, (1, 1), GRID, {0: nf.Graded((1, 1), GRID, c0=np.sin(X)[None, None])})
    df = nf.nc_d(f)
    assert np.abs(df.entry(0).c1x - np.cos(X)[None, None]).max() < 1e-12
    assert np.abs(df.entry(0).c1b).max() < 1e-14


def test_d_squared_zero(dense):
    a = nf.random_form(dense, 2, GRID, support=[-1, 0, 1], seed=7)
    dda = nf.nc_d(nf.nc_d(a))
    assert dda.norm() < 1e-11


def test_d_graded_derivation(z2):
    a = nf.random_form(z2, 2, GRID, support=[0, 1], seed=8)
    b = nf.random_form(z2, 2, GRID, support=[0, 1], seed=9)
    for deg in (0, 1):
        ap = a.degree_part(deg)
        prod, _ = nf.nc_product(ap, b)
        lhs = nf.nc_d(prod)
        t1, _ = nf.nc_product(nf.nc_d(ap), b)
        t2, _ = nf.nc_product(ap, nf.nc_d(b))
        rhs = t1 + ((-1) ** deg) * t2
        assert (lhs - rhs).norm() < 1e-10 * max(1.0, lhs.norm())


# ---- supercommutator ----

def test_supercommutator_with_unit(z2):
    a = nf.random_form(z2, 2, GRID, support=[0, 1], seed=10)
    unit = nf.NCForm.unit(z2, 2, GRID)
    assert nf.supercommutator(a, unit).norm() < 1e-13


def test_supercommutator_degree_one_sign(z2):
    a = nf.random_form(z2, 2, GRID, support=[0], degrees=(1,), seed=11)
    b = nf.random_form(z2, 2, GRID, support=[1], degrees=(1,), seed=12)
    ab, _ = nf.nc_product(a, b)
    ba, _ = nf.nc_product(b, a)
    direct = ab + ba  # (-1)^{1*1} = -1, so [a,b] = ab + ba
    assert (nf.supercommutator(a, b) - direct).norm() < 1e-12


def test_supercommutator_matches_direct_formula(dense):
    a = nf.random_form(dense, 2, GRID, support=[0, 1], seed=13)
    b = nf.random_form(dense, 2, GRID, support=[-1, 0], seed=14)
    total = None
    for p in (0, 1, 2):
        for q in (0, 1, 2):
            ab, _ = nf.nc_product(a.degree_part(p), b.degree_part(q))
            ba, _ = nf.nc_product(b.degree_part(q), a.degree_part(p))
            term = ab - ((-1) ** (p * q)) * ba
            total = term if total is None else total + term
    assert (nf.supercommutator(a, b) - total).norm() < 1e-12


# ---- trace_tau ----

def test_trace_of_unit(z2):
    unit = nf.NCForm.unit(z2, 1, GRID)
    tv = nf.trace_tau(unit, gm.conjugacy_table(z2, 2))
    ident = tv.identity_part()
    assert np.abs(ident.c0 - 1.0).max() < 1e-13
    assert set(tv.classes) == {0}


def test_trace_ignores_fixed_point_free_terms(dense):
    a = nf.random_form(dense, 1, GRID, support=[1], seed=15)  # no identity term
    tv = nf.trace_tau(a, gm.conjugacy_table(dense, 2))
    assert tv.sup_norm() == 0.0 and not tv.classes


def test_trace_haar_averages_x(dense):
    X, _ = grid_xy()
    a = nf.NCForm(dense, (1, 1), GRID, {0: nf.Graded((1, 1), GRID, c0=np.cos(X)[None, None])})
    tv = nf.trace_tau(a, gm.conjugacy_table(dense, 2))
    assert tv.identity_part().sup_norm() < 1e-12


def test_trace_finite_group_average(z2):
    # cos(x) averaged over {id, half turn}: cos(x) + cos(x+pi) = 0
    X, _ = grid_xy()
    a = nf.NCForm(z2, (1, 1), GRID, {0: nf.Graded((1, 1), GRID, c0=np.cos(X)[None, None])})
    tv = nf.trace_tau(a, gm.conjugacy_table(z2, 2))
    assert tv.identity_part().sup_norm() < 1e-13
    # cos(2x) is invariant under the half turn: survives the average
    a2 = nf.NCForm(z2, (1, 1), GRID, {0: nf.Graded((1, 1), GRID, c0=np.cos(2 * X)[None, None])})
    tv2 = nf.trace_tau(a2, gm.conjugacy_table(z2, 2))
    assert np.abs(tv2.identity_part().c0 - np.cos(2 * X)[None, None]).max() < 1e-13


def test_graded_trace_kills_supercommutators(z2, dense):
    rng_seeds = [(20, 21), (22, 23), (24, 25)]
    for spec, support in ((z2, [0, 1]), (dense, [-1, 0, 1])):
        tab = gm.conjugacy_table(spec, 3)
        for sa, sb in rng_seeds:
            a = nf.random_form(spec, 2, GRID, support=support, seed=sa)
            b = nf.random_form(spec, 2, GRID, support=support, seed=sb)
            tv = nf.trace_tau(nf.supercommutator(a, b), tab)
            assert tv.sup_norm() <= 1e-9 * a.norm() * b.norm()


def test_adjoint_involution(dense):
    a = nf.random_form(dense, 2, GRID, support=[-1, 0, 2], seed=30)
    assert (a.adjoint().adjoint() - a).norm() < 1e-12
