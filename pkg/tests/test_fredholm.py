"""Analytic index by stabilized singular-value counting."""

import numpy as np
import pytest

from shiftindex import fredholm as fr
from shiftindex import group_model as gm
from shiftindex import shift_ops as so
from shiftindex import symbol_calc as sc
from shiftindex.trig import SheetSymbol

SCHEDULE = (32, 64, 128)


@pytest.fixture(scope="module")
def z2():
    return gm.GroupSpec(kind="finite-cyclic", order=2)


def winding_op(spec, w):
    return so.ShiftOperator(spec, {0: so.PDOCoefficient.multiplication(
        SheetSymbol.from_sheets({w: [[1.0]]}, {0: [[1.0]]}, (1, 1)))})


def test_taper_profile_shape():
    w = fr.taper_profile(64)
    assert w[0] == 0.0 and w[-1] == 0.0
    assert np.all(w[np.abs(np.arange(-64, 65)) <= 57] == 1.0)
    assert np.all((w >= 0) & (w <= 1))


def test_identity_index_zero(z2):
    est = fr.numerical_index(so.ShiftOperator.identity(z2), schedule=SCHEDULE)
    assert est.stable and est.index == 0
    assert est.kernel_dim == 0 and est.cokernel_dim == 0
    assert est.gap > 1e3


def test_winding_index_minus_one(z2):
    # oracle: the operator is e^{ix} on modes k >= 0 and identity on k < 0;
    # every mode is reached except k = 0, and no input dies: ker 0, coker 1
    est = fr.numerical_index(winding_op(z2, 1), schedule=SCHEDULE)
    assert est.stable
    assert (est.kernel_dim, est.cokernel_dim, est.index) == (0, 1, -1)
    # explicit mode-shift count at one cutoff
    N = 32
    A = so.assemble(winding_op(z2, 1), N).matrix
    cols = [tuple(np.nonzero(A[:, j])[0]) for j in range(2 * N + 1)]
    rows_hit = {r for c in cols for r in c}
    assert (0 + N) not in rows_hit  # e_0 misses: the cokernel direction


@pytest.mark.parametrize("w,expected", [(-2, 2), (-1, 1), (0, 0), (1, -1), (2, -2)])
def test_winding_family(z2, w, expected):
    est = fr.numerical_index(winding_op(z2, w), schedule=SCHEDULE)
    assert est.stable and est.index == expected


def test_direct_sum_additivity(z2):
    d1, d2 = winding_op(z2, 1), winding_op(z2, 2)
    est = fr.numerical_index(so.direct_sum(d1, d2), schedule=SCHEDULE)
    assert est.stable and est.index == -3


def test_product_index_adds(z2):
    neumann = so.ShiftOperator.identity(z2) + 0.5 * so.ShiftOperator.pure_shift(z2, 1)
    prod, _ = so.compose(winding_op(z2, 1), neumann)
    est = fr.numerical_index(prod, schedule=SCHEDULE)
    assert est.stable and est.index == -1


def test_lower_order_perturbation_invariance(z2):
    # perturb by a coefficient with zero principal symbol (order -1 term):
    # the symbol window is unchanged, so the index must not move
    rng = np.random.default_rng(0)
    base = winding_op(z2, 1)
    zero = SheetSymbol.zero((1, 1))
    pert_sym = SheetSymbol.from_sheets(
        {f: [[0.5 * complex(*rng.standard_normal(2))]] for f in (-1, 0, 1)},
        {f: [[0.5 * complex(*rng.standard_normal(2))]] for f in (-1, 0, 1)}, (1, 1))
    pert = so.ShiftOperator(z2, {1: so.PDOCoefficient(0, [zero, pert_sym])})
    est = fr.numerical_index(base + pert, schedule=SCHEDULE)
    assert est.stable and est.index == -1
    lhs = sc.symbol_of(base + pert)
    assert (lhs.entry(1)).norm_sup() == 0.0  # the perturbation is invisible to the symbol


def test_adjoint_index_negates(z2):
    D = winding_op(z2, 2)
    est = fr.numerical_index(D, schedule=SCHEDULE)
    est_star = fr.numerical_index(D.adjoint(), schedule=SCHEDULE)
    assert est.stable and est_star.stable
    assert est_star.index == -est.index


def test_homotopy_invariance_eight_points(z2):
    # straight-line homotopy W o (1 + t T/2): elliptic at every sample
    W = winding_op(z2, 1)
    for t in np.linspace(0.0, 1.0, 8):
        Dt = W + float(t) * so.compose(W, 0.5 * so.ShiftOperator.pure_shift(z2, 1))[0]
        cert = sc.is_elliptic(sc.symbol_of(Dt), schedule=(16, 32, 64))
        assert cert.elliptic
        est = fr.numerical_index(Dt, schedule=SCHEDULE)
        assert est.stable and est.index == -1


def test_unstable_raises_on_require(z2):
    est = fr.numerical_index(winding_op(z2, 1), schedule=(16, 32))  # too short
    assert not est.stable
    with pytest.raises(fr.UnstableIndex):
        est.require_stable()


def test_nonelliptic_flag_passthrough(z2):
    est = fr.numerical_index(winding_op(z2, 1), schedule=SCHEDULE, elliptic=False)
    assert est.elliptic is False
