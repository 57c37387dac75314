import numpy as np
import pytest

from g2coflow.torus.forms import BasicForm, fibered_max_diff, form_max_diff
from g2coflow.torus.grid import BasicField, Grid
from g2coflow.torus.g2model import flat_su3, perturbed_su3
from g2coflow.torus.kahler import project_11, project_30_03
from g2coflow.torus import serialize as ser
from g2coflow.torus.slices import (
    MODELS,
    DeformationSlice,
    coflow_residual_direct,
    coflow_residual_form,
    constraint_residual,
    make_satisfying_slice,
    solve_beta_wedge,
    type_ii_deform,
    _dlog_form,
)

GRID = Grid(active_axes=(1, 3), n=16)


def potential(ampl=0.05):
    return BasicField.from_function(
        GRID, lambda x1, x2, x3, x4, x5, x6: ampl * (np.cos(x1) + 0.5 * np.sin(x3))
    )


@pytest.fixture(scope="module")
def flat():
    return flat_su3(GRID)


@pytest.fixture(scope="module")
def pert():
    return perturbed_su3(GRID, potential())


@pytest.fixture(scope="module")
def f_dot():
    return BasicField.from_function(GRID, lambda x1, *r: 0.03 * np.sin(x1))


def test_product_mlcf_construct_then_check(pert):
    A = 0.7
    sl = make_satisfying_slice("product-mlcf", pert, A=A)
    rep, forms = constraint_residual("product-mlcf", sl, pert, A=A)
    assert rep.max_residual() < 1e-8
    assert coflow_residual_direct("product-mlcf", sl, pert, A=A) < 1e-8


def test_product_lcf_is_trivial(pert):
    sl = make_satisfying_slice("product-lcf", pert)
    assert sl.beta.max_abs() == 0.0 and sl.gamma.max_abs() == 0.0
    rep, _ = constraint_residual("product-lcf", sl, pert)
    assert rep.max_residual() == 0.0
    assert coflow_residual_direct("product-lcf", sl, pert) < 1e-8


def test_bidegree_vanishing(pert):
    # a constructed product solution with fixed J has beta^(1,1) = 0 and
    # Im(gamma)^(3,0)+(0,3) = 0 exactly by type projection
    sl = make_satisfying_slice("product-mlcf", pert, A=1.3)
    assert project_11(sl.beta).max_abs() < 1e-12
    assert project_30_03(sl.gamma.imag_part()).max_abs() < 1e-12


@pytest.mark.parametrize("model,A", [
    ("ccy-lcf", 0.0),
    ("ccy-mlcf", 0.4),
    ("broken-lcf", 0.0),
    ("broken-mlcf", 0.6),
])
def test_flat_construct_then_check(model, A, flat, f_dot):
    sl = make_satisfying_slice(model, flat, A=A, f_dot=f_dot)
    rep, _ = constraint_residual(model, sl, flat, A=A)
    assert rep.max_residual() < 1e-8, rep.to_dict()
    # the independent oracle: the slice satisfies the actual flow equation
    assert coflow_residual_direct(model, sl, flat, A=A) < 1e-8


def test_ccy_flat_zero_slice_residual(flat):
    # with the trivial slice the contact beta-equation retains 2|Y|^2 omega^2
    zero = DeformationSlice.zero(GRID)
    rep, forms = constraint_residual("ccy-lcf", zero, flat)
    w2 = flat.omega.wedge(flat.omega)
    assert form_max_diff(forms["beta"] * (-1.0), w2 * 2.0) < 1e-12
    assert rep.max_residual() == pytest.approx(4.0)


def test_product_mlcf_zero_A_zero_residuals(flat):
    zero = DeformationSlice.zero(GRID)
    rep, _ = constraint_residual("product-mlcf", zero, flat, A=0.0)
    assert rep.max_residual() < 1e-12
    assert coflow_residual_direct("product-mlcf", zero, flat, A=0.0) < 1e-12


def test_ccy_shape_mismatch_rejected(pert):
    zero = DeformationSlice.zero(GRID)
    with pytest.raises(ValueError):
        constraint_residual("ccy-lcf", zero, pert)  # omega != omega0 + ddc(0)


def test_unknown_model_rejected(flat):
    with pytest.raises(ValueError):
        constraint_residual("sasaki-lcf", DeformationSlice.zero(GRID), flat)


def test_reeb_contraction_isolates_gamma(pert):
    # adding Im(gamma) changes only the fiber part of the coflow residual
    zero = DeformationSlice.zero(GRID)
    target = _dlog_form(pert.norm()).wedge(pert.omega) * (pert.norm() * pert.norm() * 4.0)
    bumped = DeformationSlice(
        zero.f, zero.f_dot, BasicForm.zero(GRID, 2), target * (-1j), zero.alpha
    )
    r0 = coflow_residual_form("ccy-lcf", zero, pert)
    r1 = coflow_residual_form("ccy-lcf", bumped, pert)
    diff = r1 - r0
    assert diff.basic.max_abs() < 1e-12
    assert form_max_diff(diff.reeb_contraction(), target) < 1e-9


def test_solve_beta_wedge_roundtrip(pert):
    rng = np.random.default_rng(4)
    coeffs = {
        idx: BasicField.constant(GRID, float(rng.standard_normal()))
        for idx in [(1, 2), (1, 4), (3, 6), (5, 6)]
    }
    beta = BasicForm(GRID, 2, coeffs)
    rhs = beta.wedge(pert.omega)
    sol = solve_beta_wedge(pert.omega, rhs)
    assert form_max_diff(sol, beta) < 1e-10


def test_direct_oracle_matches_constraint_for_any_slice(pert):
    # for the broken family the combined constraint equation IS the flow
    # equation: residuals agree identically even far from a solution
    rng = np.random.default_rng(8)
    beta = BasicForm(GRID, 2, {(1, 2): BasicField.constant(GRID, 0.3)})
    gamma = BasicForm(GRID, 3, {(1, 3, 5): BasicField.constant(GRID, 0.2j)})
    alpha = BasicForm(GRID, 1, {(1,): BasicField.constant(GRID, 0.1)})
    sl = DeformationSlice(
        BasicField.constant(GRID, 0.0), BasicField.constant(GRID, 0.0),
        beta, gamma, alpha,
    )
    rep, forms = constraint_residual("broken-lcf", sl, pert)
    direct = coflow_residual_form("broken-lcf", sl, pert)
    # alpha enters both the alpha equation and the main form; compare the
    # main residual directly with the flow residual
    assert abs(forms["main"].max_abs() - direct.max_abs()) < 1e-10
    assert fibered_max_diff(forms["main"], direct) < 1e-10


def test_type_ii_deformation():
    h = potential()
    res = type_ii_deform(h)
    assert res.positive
    assert res.omega_prime.d().max_abs() < 1e-12
    # the basic class is preserved: omega' - omega0 = d(dc h) is exact
    assert form_max_diff(res.omega_prime - BasicForm.standard_kahler(GRID),
                         res.eta_shift.d()) < 1e-12
    zero = type_ii_deform(BasicField.constant(GRID, 0.0))
    assert zero.eta_shift.max_abs() == 0.0
    big = BasicField.from_function(GRID, lambda x1, *r: 3.0 * np.cos(x1))
    res_big = type_ii_deform(big)
    assert not res_big.positive
    assert res_big.min_eigenvalue < 0


def test_slice_serialization_roundtrip(f_dot):
    sl = make_satisfying_slice("product-mlcf", perturbed_su3(GRID, potential()), A=0.7)
    obj = ser.slice_to_json(sl)
    back = ser.slice_from_json(obj, GRID)
    assert (sl.f - back.f).max_abs() < 1e-12
    assert form_max_diff(sl.beta, back.beta) < 1e-10
    assert form_max_diff(sl.gamma, back.gamma) < 1e-10
