import numpy as np
import pytest

from g2coflow.g2 import metric_from_phi
from g2coflow.exterior import max_coeff_diff
from g2coflow.torus.forms import (
    CONTACT,
    PRODUCT,
    BasicForm,
    FiberedForm,
    fibered_max_diff,
    form_max_diff,
    lie_derivative,
)
from g2coflow.torus.grid import BasicField, Grid
from g2coflow.torus.g2model import (
    build_g2,
    check_laplacian,
    check_torsion,
    flat_su3,
    laplacian_psi,
    modified_extra,
    perturbed_su3,
    predicted_laplacian,
    sample_points,
    seven_star,
    trace_field,
)
from g2coflow.torus.kahler import dc, metric_of_omega

GRID = Grid(active_axes=(1, 3), n=16)
AMPL = 0.05


def potential(grid=GRID, ampl=AMPL):
    return BasicField.from_function(
        grid, lambda x1, x2, x3, x4, x5, x6: ampl * (np.cos(x1) + 0.5 * np.sin(x3))
    )


@pytest.fixture(scope="module")
def pert():
    return perturbed_su3(GRID, potential())


@pytest.fixture(scope="module")
def g_product(pert):
    return build_g2(pert, convention=PRODUCT)


@pytest.fixture(scope="module")
def g_ccy(pert):
    return build_g2(pert, convention=CONTACT, eta_shift=dc(potential()))


@pytest.fixture(scope="module")
def g_broken(pert):
    return build_g2(pert, convention=CONTACT, eta_shift=None)


def test_su3_validation(pert):
    pert.validate()
    with pytest.raises(ValueError):
        perturbed_su3(GRID, potential(ampl=3.0)).validate()


def test_build_flat_product_torsion_free():
    gd = build_g2(flat_su3(GRID), convention=PRODUCT)
    dphi = gd.phi.d()
    assert dphi.max_abs() < 1e-13
    assert gd.psi.d().max_abs() < 1e-13


def test_coclosed_all_models(g_product, g_ccy, g_broken):
    for gd in (g_product, g_ccy, g_broken):
        assert gd.psi.d().max_abs() < 1e-8


def test_psi_is_star_phi(g_ccy):
    # the sign convention is computed, not assumed: psi = -eta^ImY + omega^2/2
    star_phi = seven_star(g_ccy.phi, g_ccy)
    assert fibered_max_diff(star_phi, g_ccy.psi) < 1e-10
    fiber = star_phi.fiber
    im_u = g_ccy.su3.im_upsilon()
    assert form_max_diff(fiber, -im_u) < 1e-10


def test_seven_star_involution(g_ccy):
    F = g_ccy.phi
    ss = seven_star(seven_star(F, g_ccy), g_ccy)
    assert fibered_max_diff(ss, F) < 1e-11   # k(7-k) is even


def test_pointwise_metric_matches_defining_relation(g_ccy):
    for pt in sample_points(GRID, 5, seed=3):
        s = g_ccy.structure_at(pt)
        g_rec, vol_rec = metric_from_phi(s.phi)
        for i in range(1, 8):
            for j in range(1, 8):
                assert abs(g_rec[i, j] - s.metric[i, j]) < 1e-9
        assert s.defining_relation_residual() < 1e-9


def test_dphi_ccy_flat_red_term():
    gd = build_g2(flat_su3(GRID), convention=CONTACT)
    dphi = gd.phi.d()
    w2 = gd.su3.omega.wedge(gd.su3.omega)
    assert form_max_diff(dphi.basic, w2) < 1e-12  # d phi = |Y| omega^2, |Y| = 1
    assert dphi.fiber.max_abs() < 1e-12


def test_product_dphi_closed_form(g_product, pert):
    y = g_product.norm
    dlog = BasicForm(GRID, 1, {(a,): y.log().deriv(a) for a in GRID.active_axes})
    dphi = g_product.phi.d()
    assert form_max_diff(dphi.basic, dlog.wedge(pert.re_upsilon()) * (-1.0 / y)) < 1e-6
    assert form_max_diff(dphi.fiber, dlog.wedge(pert.omega) * y * (-1.0)) < 1e-6


@pytest.mark.parametrize("model", ["product", "ccy", "broken"])
def test_torsion_closed_forms(model, g_product, g_ccy, g_broken):
    gd = {"product": g_product, "ccy": g_ccy, "broken": g_broken}[model]
    rep = check_torsion(gd, model, n_samples=48, seed=5)
    assert rep.max_residual() < 1e-6, rep.to_dict()


@pytest.mark.parametrize("model", ["product", "ccy", "broken"])
def test_laplacian_closed_forms(model, g_product, g_ccy, g_broken):
    gd = {"product": g_product, "ccy": g_ccy, "broken": g_broken}[model]
    rep = check_laplacian(gd, model)
    assert rep.max_residual(exclude=("laplacian-constant-trace",)) < 1e-6


def test_broken_literal_bracket_deviates(g_broken):
    # freezing the trace factor at 3 is only exact when omega' = dTheta; at
    # amplitude 0.05 the deviation is first-order in the perturbation
    rep = check_laplacian(g_broken, "broken")
    literal = {e.name: e.max_residual for e in rep.entries}["laplacian-constant-trace"]
    assert literal > 1e-3
    lam = trace_field(BasicForm.standard_kahler(GRID), g_broken.g6)
    assert (lam - 3.0).max_abs() > 1e-3  # the trace genuinely varies


def test_broken_reduces_to_ccy_at_flat():
    flat = flat_su3(GRID)
    gd = build_g2(flat, convention=CONTACT)
    lam = trace_field(BasicForm.standard_kahler(GRID), gd.g6)
    assert (lam - 3.0).max_abs() < 1e-12
    lap = laplacian_psi(gd)
    for model in ("ccy", "broken"):
        assert fibered_max_diff(lap, predicted_laplacian(gd, model)) < 1e-10
    assert fibered_max_diff(lap, predicted_laplacian(gd, "broken", literal_bracket=True)) < 1e-10


def test_flat_contact_full_torsion_value():
    # |Y| = 1 contact structure is the epsilon = 1 Ansatz at a point:
    # tau0 = 6/7 and |T|^2 = 15/4
    from g2coflow.g2 import extract_torsion, full_torsion
    from g2coflow.torus.g2model import _realize

    gd = build_g2(flat_su3(GRID), convention=CONTACT)
    dphi = gd.phi.d()
    dpsi = gd.psi.d()
    pt = (0, 0)
    s = gd.structure_at(pt)
    tf = extract_torsion(s, dphi.at(pt).map_coeffs(_realize),
                         dpsi.at(pt).map_coeffs(_realize))
    assert tf.tau0 == pytest.approx(6.0 / 7.0)
    T = full_torsion(tf, s)
    assert float(T.norm_sq(s.metric)) == pytest.approx(15.0 / 4.0)


def test_modified_extra_product_is_A_dphi(g_product):
    A = 0.8
    extra = modified_extra(g_product, A)
    dphi = g_product.phi.d()
    assert fibered_max_diff(extra, dphi * A) < 1e-12


def test_modified_extra_ccy_display(g_ccy, pert):
    # for the contact family (omega = d eta_t) the correction expands to
    # -(A/|Y|) dlog^ReY + A|Y| dlog^eta^omega + A|Y| omega^2
    # - 6|Y|^2 dlog^eta^omega - 3|Y|^2 omega^2
    A = 0.9
    y = g_ccy.norm
    y2 = y * y
    grid = g_ccy.grid
    dlog = BasicForm(grid, 1, {(a,): y.log().deriv(a) for a in grid.active_axes})
    eta_t = g_ccy.eta_t()
    omega = pert.omega
    re_u = pert.re_upsilon()
    t_re = FiberedForm.from_basic(dlog.wedge(re_u) * ((1.0 / y) * -A), CONTACT)
    t_eta = FiberedForm.from_basic(dlog, CONTACT).wedge(eta_t.wedge_basic(omega))
    coeff = (y * A) - (y2 * 6.0)
    t_eta = FiberedForm(t_eta.basic * coeff, t_eta.fiber * coeff, CONTACT)
    t_w2 = FiberedForm.from_basic(omega.wedge(omega) * ((y * A) - (y2 * 3.0)), CONTACT)
    display = t_re + t_eta + t_w2
    assert fibered_max_diff(modified_extra(g_ccy, A), display) < 1e-6


def test_scalar_torsion_field_matches_extraction(g_product, g_ccy, g_broken):
    from g2coflow.g2 import extract_torsion
    from g2coflow.torus.g2model import _realize, scalar_torsion_field

    for gd in (g_product, g_ccy, g_broken):
        tau0 = scalar_torsion_field(gd)
        dphi = gd.phi.d()
        dpsi = gd.psi.d()
        for pt in sample_points(GRID, 6, seed=12):
            s = gd.structure_at(pt)
            tf = extract_torsion(s, dphi.at(pt).map_coeffs(_realize),
                                 dpsi.at(pt).map_coeffs(_realize))
            assert abs(tf.tau0 - tau0.at(pt).real) < 1e-10


def test_fibered_star_rules_constant_norm():
    # *alpha = (-1)^k |Y| eta ^ *_B alpha and *(eta ^ alpha) = (1/|Y|) *_B alpha
    # checked on a scaled structure with constant |Y| = 1/8
    from g2coflow.torus.kahler import basic_star
    from g2coflow.torus.g2model import SU3Data

    su3 = SU3Data(GRID, BasicForm.standard_kahler(GRID) * 4.0)  # |Y| = 1/8
    gd = build_g2(su3, convention=CONTACT)
    y = 0.125
    alpha = su3.omega  # basic 2-form
    F = FiberedForm.from_basic(alpha, CONTACT)
    star_alpha = seven_star(F, gd)
    want_fiber = basic_star(alpha, gd.g6) * y  # (-1)^2 |Y| *_B alpha
    assert form_max_diff(star_alpha.fiber, want_fiber) < 1e-12
    assert star_alpha.basic.max_abs() < 1e-12
    eta_alpha = FiberedForm(BasicForm.zero(GRID, 3), alpha, CONTACT)  # eta ^ alpha
    star_ea = seven_star(eta_alpha, gd)
    want_basic = basic_star(alpha, gd.g6) * (1.0 / y)
    assert form_max_diff(star_ea.basic, want_basic) < 1e-12
    assert star_ea.fiber.max_abs() < 1e-12


def test_three_active_axes_small():
    grid = Grid(active_axes=(1, 3, 5), n=16)
    pot = BasicField.from_function(
        grid,
        lambda x1, x2, x3, x4, x5, x6: 0.04 * (np.cos(x1) + np.sin(x3 + x5)),
    )
    su3 = perturbed_su3(grid, pot)
    gd = build_g2(su3, convention=CONTACT, eta_shift=dc(pot))
    rep = check_torsion(gd, "ccy", n_samples=16, seed=9)
    assert rep.max_residual() < 1e-6
    repl = check_laplacian(gd, "ccy")
    assert repl.max_residual() < 1e-6
