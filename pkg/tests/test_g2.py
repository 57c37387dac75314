from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from g2coflow import g2
from g2coflow.exterior import (
    KForm,
    Vector,
    hodge_star,
    inner,
    interior,
    max_coeff_diff,
    wedge,
)
from g2coflow.scalars import sym

RNG = np.random.default_rng(11)


@pytest.fixture(scope="module")
def s0():
    return g2.G2Structure.from_phi(g2.standard_phi("float"))


@pytest.fixture(scope="module")
def sym_ccy():
    return g2.ccy_structure()


def random_form(degree, scale=1.0):
    return KForm(
        7,
        degree,
        {idx: float(RNG.standard_normal()) * scale
         for idx in combinations(range(1, 8), degree)},
    )


# -- metric recovery ---------------------------------------------------------

def test_standard_phi_identity_metric(s0):
    for i in range(1, 8):
        for j in range(1, 8):
            want = 1.0 if i == j else 0.0
            assert abs(s0.metric[i, j] - want) < 1e-12
    assert abs(s0.vol.coeffs[tuple(range(1, 8))] - 1.0) < 1e-12
    s0.validate(tol=1e-10)


def test_standard_phi_exact_path():
    s = g2.G2Structure.from_phi(g2.standard_phi("exact"))
    assert s.metric[1, 1] == Fraction(1)
    assert s.psi.kind in ("exact", "neutral")
    assert wedge(s.phi, s.psi) == s.vol.scaled(7)


def test_ccy_metric_symbolic(sym_ccy):
    a2, b2 = sym("a", 2), sym("b", 2)
    for i in range(1, 7):
        assert sym_ccy.metric[i, i] == b2
    assert sym_ccy.metric[7, 7] == a2
    assert sym_ccy.vol == KForm.volume(7, sym("a") * sym("b", 6))
    assert sym_ccy.defining_relation_residual() == 0.0


def test_product_metric_flat_norm():
    # |Y| = 1 product structure: phi = ReY + dr ^ omega gives the flat metric
    phi = g2.ccy_phi(1.0, 1.0)
    s = g2.G2Structure.from_phi(phi)
    for i in range(1, 8):
        assert abs(s.metric[i, i] - 1.0) < 1e-12


def test_degenerate_phi_rejected():
    with pytest.raises(g2.DegeneratePhiError):
        g2.metric_from_phi(KForm.zero(7, 3))
    with pytest.raises(g2.DegeneratePhiError):
        g2.metric_from_phi(g2.standard_phi("float").scaled(-1.0))  # negative form


def test_defining_relation_random_scaling():
    # metric recovery commutes with scaling: phi -> c^3 phi gives c^2 g
    c = 1.37
    s = g2.G2Structure.from_phi(g2.standard_phi("float").scaled(c**3))
    for i in range(1, 8):
        assert abs(s.metric[i, i] - c**2) < 1e-10


# -- decompositions ----------------------------------------------------------

def test_decompose2_eigenvalues(s0):
    beta = random_form(2)
    b7, b14 = g2.decompose2(beta, s0)
    assert max_coeff_diff(b7 + b14, beta) < 1e-12
    t7 = hodge_star(wedge(s0.phi, b7), s0.metric)
    assert max_coeff_diff(t7, b7.scaled(2.0)) < 1e-12
    t14 = hodge_star(wedge(s0.phi, b14), s0.metric)
    assert max_coeff_diff(t14, -b14) < 1e-12
    # idempotency
    b7b, b14b = g2.decompose2(b7, s0)
    assert max_coeff_diff(b7b, b7) < 1e-12 and b14b.max_abs() < 1e-12


def test_decompose2_interior_is_7_part(s0):
    X = Vector([float(x) for x in RNG.standard_normal(7)])
    _, b14 = g2.decompose2(interior(X, s0.phi), s0)
    assert b14.max_abs() < 1e-12


def test_decompose2_known_14_form(s0):
    w = KForm(7, 2, {(4, 5): 1.0, (6, 7): -1.0})
    assert max_coeff_diff(hodge_star(wedge(s0.phi, w), s0.metric), -w) < 1e-12
    b7, b14 = g2.decompose2(w, s0)
    assert b7.max_abs() < 1e-12
    assert max_coeff_diff(b14, w) < 1e-12


def test_decompose3_parts(s0):
    g1, g7, g27 = g2.decompose3(s0.phi, s0)
    assert max_coeff_diff(g1, s0.phi) < 1e-12
    assert g7.max_abs() < 1e-12 and g27.max_abs() < 1e-12
    X = Vector([float(x) for x in RNG.standard_normal(7)])
    xpsi = interior(X, s0.psi)
    g1, g7, g27 = g2.decompose3(xpsi, s0)
    assert g1.max_abs() < 1e-12 and g27.max_abs() < 1e-10
    assert max_coeff_diff(g7, xpsi) < 1e-10
    gamma = random_form(3)
    g1, g7, g27 = g2.decompose3(gamma, s0)
    assert max_coeff_diff(g1 + g7 + g27, gamma) < 1e-12
    for x, y in ((g1, g7), (g1, g27), (g7, g27)):
        assert abs(inner(x, y, s0.metric)) < 1e-10


# -- torsion -----------------------------------------------------------------

def test_flat_torsion_zero(s0):
    tf = g2.extract_torsion(s0, KForm.zero(7, 4), KForm.zero(7, 5))
    assert tf.tau0 == 0.0
    assert tf.tau1.is_zero and tf.tau2.is_zero and tf.tau3.is_zero
    T = g2.full_torsion(tf, s0)
    assert T.max_abs() == 0.0


def test_torsion_roundtrip_with_tau12(s0):
    for _ in range(5):
        tau0 = float(RNG.standard_normal())
        tau1 = random_form(1, 0.5)
        _, tau2 = g2.decompose2(random_form(2, 0.5), s0)
        _, _, tau3 = g2.decompose3(random_form(3, 0.5), s0)
        tf = g2.TorsionForms(tau0, tau1, tau2, tau3)
        got = g2.extract_torsion(s0, tf.reconstruct_dphi(s0), tf.reconstruct_dpsi(s0),
                                 tol=1e-8)
        assert abs(got.tau0 - tau0) < 1e-10
        assert max_coeff_diff(got.tau1, tau1) < 1e-10
        assert max_coeff_diff(got.tau2, tau2) < 1e-9
        assert max_coeff_diff(got.tau3, tau3) < 1e-9


def test_torsion_rejects_incompatible_input(s0):
    # a generic 4-form is not tau0 psi + *tau3 with tau3 in the 27-part
    bad = random_form(4)
    with pytest.raises(g2.TorsionExtractionError):
        g2.extract_torsion(s0, bad, KForm.zero(7, 5))


def test_ccy_torsion_exact(sym_ccy):
    a, b = sym("a"), sym("b")
    dphi = g2.contact_differential(sym_ccy.phi)
    dpsi = g2.contact_differential(sym_ccy.psi)
    assert dpsi.is_zero
    omega2 = wedge(g2.kahler_form(), g2.kahler_form())
    assert dphi == omega2.scaled(a * b**2)
    tf = g2.extract_torsion(sym_ccy, dphi, dpsi)
    assert tf.tau0 == Fraction(6, 7) * a * sym("b", -2)
    assert tf.tau1.is_zero and tf.tau2.is_zero
    want = g2.re_upsilon().scaled(Fraction(-6, 7) * a * b) + wedge(
        g2.eta_form(), g2.kahler_form()
    ).scaled(Fraction(8, 7) * a**2)
    assert tf.tau3 == want


def test_ccy_full_torsion_exact(sym_ccy):
    a = sym("a")
    tf = g2.extract_torsion(
        sym_ccy,
        g2.contact_differential(sym_ccy.phi),
        g2.contact_differential(sym_ccy.psi),
    )
    T = g2.full_torsion(tf, sym_ccy)
    half_a = Fraction(1, 2) * a
    for i in range(1, 7):
        assert T[i, i] == half_a
    assert T[7, 7] == Fraction(-3, 2) * a**3 * sym("b", -2)
    assert T.norm_sq(sym_ccy.metric) == Fraction(15, 4) * a**2 * sym("b", -4)


def test_j_operator(sym_ccy, s0):
    j0 = g2.j_operator(s0.phi, s0)
    for i in range(1, 8):
        for j in range(1, 8):
            assert abs(j0[i, j] - (6.0 if i == j else 0.0)) < 1e-12
    assert g2.j_operator(KForm.zero(7, 3), s0).max_abs() == 0.0
    jsym = g2.j_operator(sym_ccy.phi, sym_ccy)
    assert jsym.is_symmetric()
    assert jsym[7, 7] == 6 * sym("a", 2)


def test_hodge_laplacian_ccy(sym_ccy):
    lap = g2.hodge_laplacian_psi(sym_ccy, g2.contact_differential)
    omega2 = wedge(g2.kahler_form(), g2.kahler_form())
    assert lap == omega2.scaled(2 * sym("a", 2))


def test_hodge_laplacian_flat(s0):
    lap = g2.hodge_laplacian_psi(s0, lambda f: KForm.zero(7, min(f.degree + 1, 7)))
    assert lap.is_zero


def test_hodge_laplacian_rejects_non_coclosed(sym_ccy):
    def bad_d(f):
        out = g2.contact_differential(f)
        if f.degree == 4:
            out = out + KForm.basis(7, (1, 2, 3, 4, 5), sym("a"))
        return out

    with pytest.raises(ValueError):
        g2.hodge_laplacian_psi(sym_ccy, bad_d)
