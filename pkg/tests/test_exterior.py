from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from g2coflow.exterior import (
    DegreeMismatchError,
    DimensionMismatchError,
    KForm,
    Metric,
    Vector,
    flat,
    gram_minor_inverse,
    hodge_star,
    inner,
    interior,
    max_coeff_diff,
    merge_sign,
    sharp,
    sort_index,
    wedge,
)
from g2coflow.scalars import ScalarMixError, sym

RNG = np.random.default_rng(7)


def random_form(degree, dim=7, scale=1.0):
    return KForm(
        dim,
        degree,
        {idx: float(RNG.standard_normal()) * scale
         for idx in combinations(range(1, dim + 1), degree)},
    )


def random_metric(dim=7):
    m = RNG.standard_normal((dim, dim)) * 0.3
    g = np.eye(dim) + m @ m.T
    return Metric([[float(x) for x in row] for row in g])


def test_sort_index():
    assert sort_index((3, 1, 2)) == ((1, 2, 3), 1)
    assert sort_index((2, 1)) == ((1, 2), -1)
    assert sort_index((1, 1)) is None


def test_merge_sign():
    assert merge_sign((1,), (2,)) == 1
    assert merge_sign((2,), (1,)) == -1
    assert merge_sign((1, 3), (2, 4)) == -1


def test_normalization_signs():
    f = KForm(3, 2, {(2, 1): 1})
    assert f.coeffs == {(1, 2): -1}
    g = KForm(3, 2, {(1, 2): 1, (2, 1): 1})
    assert g.is_zero


def test_wedge_basis():
    dx1 = KForm.basis(7, (1,))
    dx2 = KForm.basis(7, (2,))
    assert wedge(dx1, dx2) == KForm.basis(7, (1, 2))
    assert wedge(dx2, dx1) == KForm.basis(7, (1, 2), -1)
    assert wedge(dx1, dx1).is_zero


def test_wedge_graded_commutativity():
    for ka, kb in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)]:
        a = random_form(ka)
        b = random_form(kb)
        ab = wedge(a, b)
        ba = wedge(b, a)
        sign = (-1) ** (ka * kb)
        assert max_coeff_diff(ab, ba.scaled(float(sign))) < 1e-12


def test_wedge_associative_bilinear():
    a, b, c = random_form(1), random_form(2), random_form(2)
    lhs = wedge(wedge(a, b), c)
    rhs = wedge(a, wedge(b, c))
    assert max_coeff_diff(lhs, rhs) < 1e-12
    lin = wedge(a + a, b)
    assert max_coeff_diff(lin, wedge(a, b).scaled(2.0)) < 1e-13


def test_odd_square_vanishes():
    exact = KForm(
        7, 3,
        {idx: Fraction(int(RNG.integers(-9, 10)), int(RNG.integers(1, 7)))
         for idx in combinations(range(1, 8), 3)},
    )
    assert wedge(exact, exact).is_zero
    phi = random_form(3)
    assert wedge(phi, phi).max_abs() < 1e-12


def test_wedge_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        wedge(KForm.basis(6, (1,)), KForm.basis(7, (1,)))


def test_upsilon_volume_relation():
    # ReY ^ ImY = 4 omega^3 / 3! for the standard SU(3) data in dim 6
    re_u = KForm(6, 3, {(1, 3, 5): 1, (1, 4, 6): -1, (2, 3, 6): -1, (2, 4, 5): -1})
    im_u = KForm(6, 3, {(1, 3, 6): 1, (1, 4, 5): 1, (2, 3, 5): 1, (2, 4, 6): -1})
    omega = KForm(6, 2, {(1, 2): 1, (3, 4): 1, (5, 6): 1})
    w3 = wedge(wedge(omega, omega), omega)
    lhs = wedge(re_u, im_u)
    assert lhs == w3.map_coeffs(lambda c: Fraction(4, 6) * c)


def test_interior_basis():
    e1 = Vector.basis(7, 1)
    e3 = Vector.basis(7, 3)
    f = KForm.basis(7, (1, 2))
    assert interior(e1, f) == KForm.basis(7, (2,))
    assert interior(e3, f).is_zero


def test_interior_antiderivation_squares_to_zero():
    X = Vector([float(x) for x in RNG.standard_normal(7)])
    a = random_form(3)
    assert interior(X, interior(X, a)).max_abs() < 1e-12


def test_interior_degree_zero_error():
    with pytest.raises(DegreeMismatchError):
        interior(Vector.basis(7, 1), KForm.scalar(7, 1.0))


def test_interior_reeb_contact():
    # xi ⌟ (eta ^ omega) = omega when eta(xi) = 1 and xi ⌟ omega = 0
    eta = KForm.basis(7, (7,))
    omega = KForm(7, 2, {(1, 2): 1, (3, 4): 1, (5, 6): 1})
    xi = Vector.basis(7, 7)
    assert interior(xi, wedge(eta, omega)) == omega


def test_hodge_star_volume():
    g = Metric.identity(7, "float")
    one = KForm.scalar(7, 1.0)
    assert hodge_star(one, g) == KForm.volume(7, 1.0)
    assert hodge_star(KForm.volume(7, 1.0), g) == KForm.scalar(7, 1.0)


def test_hodge_star_su3():
    g6 = Metric.identity(6, "float")
    omega = KForm(6, 2, {(1, 2): 1.0, (3, 4): 1.0, (5, 6): 1.0})
    w2_half = wedge(omega, omega).scaled(0.5)
    assert max_coeff_diff(hodge_star(omega, g6), w2_half) == 0
    re_u = KForm(6, 3, {(1, 3, 5): 1.0, (1, 4, 6): -1.0, (2, 3, 6): -1.0, (2, 4, 5): -1.0})
    im_u = KForm(6, 3, {(1, 3, 6): 1.0, (1, 4, 5): 1.0, (2, 3, 5): 1.0, (2, 4, 6): -1.0})
    assert max_coeff_diff(hodge_star(re_u, g6), im_u) == 0


def test_hodge_star_symbolic_fibered():
    # *(eta ^ alpha) = (1/|Y|) *_B alpha for the metric |Y|^2 eta^2 + g_D
    Y = sym("Y")
    g = Metric.diagonal([sym("one", 0)] * 6 + [Y**2])
    eta = KForm.basis(7, (7,))
    alpha = KForm.basis(7, (1, 2))  # basic 2-form
    lhs = hodge_star(wedge(eta, alpha), g)
    # *_B dx12 = dx3456 in dim 6, embedded in 7 dims
    want = KForm(7, 4, {(3, 4, 5, 6): Y.inverse()})
    assert lhs == want


def test_star_involution_all_basis():
    for n in (6, 7):
        g = Metric.identity(n, "float")
        for k in range(n + 1):
            for idx in combinations(range(1, n + 1), k):
                f = KForm.basis(n, idx, 1.0)
                ss = hodge_star(hodge_star(f, g), g)
                sign = (-1) ** (k * (n - k))
                assert max_coeff_diff(ss, f.scaled(float(sign))) == 0


def test_wedge_star_pairing_random():
    g = random_metric()
    vol = g.volume_form()
    for _ in range(200):
        k = int(RNG.integers(0, 8))
        a, b = random_form(k), random_form(k)
        lhs = wedge(a, hodge_star(b, g))
        rhs = vol.scaled(float(inner(a, b, g)))
        assert max_coeff_diff(lhs, rhs) < 1e-12


def test_inner_identity_and_symmetry():
    g = Metric.identity(7, "float")
    dx1 = KForm.basis(7, (1,), 1.0)
    assert inner(dx1, dx1, g) == 1.0
    omega = KForm(7, 2, {(1, 2): 1.0, (3, 4): 1.0, (5, 6): 1.0})
    assert abs(inner(omega, omega, g) - 3.0) < 1e-14
    a, b = random_form(3), random_form(3)
    gr = random_metric()
    assert abs(inner(a, b, gr) - inner(b, a, gr)) < 1e-12


def test_inner_star_isometry():
    g = random_metric()
    for k in (1, 2, 3):
        a, b = random_form(k), random_form(k)
        lhs = inner(a, b, g)
        rhs = inner(hodge_star(a, g), hodge_star(b, g), g)
        assert abs(lhs - rhs) < 1e-11


def test_inner_degree_mismatch():
    g = Metric.identity(7, "float")
    with pytest.raises(DegreeMismatchError):
        inner(random_form(2), random_form(3), g)


def test_interior_adjoint_to_wedge():
    g = random_metric()
    for _ in range(50):
        k = int(RNG.integers(1, 8))
        a, b = random_form(k), random_form(k - 1)
        X = Vector([float(x) for x in RNG.standard_normal(7)])
        assert abs(inner(interior(X, a), b, g) - inner(a, wedge(flat(X, g), b), g)) < 1e-12


def test_sharp_flat_inverse():
    g = random_metric()
    X = Vector([float(x) for x in RNG.standard_normal(7)])
    Y = sharp(flat(X, g), g)
    assert max(abs(X[i] - Y[i]) for i in range(1, 8)) < 1e-12


def test_gram_minor_jacobi_identity():
    g = random_metric()
    # complement path (k=5) must agree with the direct inverse-minor value
    ginv = np.array(g.inverse_entries)
    I = (1, 2, 4, 5, 7)
    J = (1, 3, 4, 6, 7)
    direct = np.linalg.det(ginv[np.ix_([i - 1 for i in I], [j - 1 for j in J])])
    assert abs(gram_minor_inverse(g, I, J) - direct) < 1e-12


def test_kind_mixing_rules():
    exact = KForm.basis(7, (1, 2), Fraction(1, 2))
    floaty = KForm.basis(7, (1, 2), 0.5)
    symf = KForm.basis(7, (1, 2), sym("a"))
    with pytest.raises(ScalarMixError):
        exact + floaty
    with pytest.raises(ScalarMixError):
        wedge(symf, floaty)
    with pytest.raises(ScalarMixError):
        floaty.scaled(Fraction(1, 3))
    assert (exact + symf).kind == "sym"
    assert floaty.scaled(3).kind == "float"
    assert exact.divided_by_int(3).coeffs[(1, 2)] == Fraction(1, 6)
    assert floaty.as_float().kind == "float"


def test_metric_validation():
    with pytest.raises(ValueError):
        Metric([[1, 2], [3, 1]])  # not symmetric
    g = Metric([[2.0, 0.0], [0.0, 3.0]])
    assert g.is_positive_definite()
    bad = Metric([[1.0, 2.0], [2.0, 1.0]])
    assert not bad.is_positive_definite()


def test_orientation_flips_star():
    g_plus = Metric.identity(7, "float")
    g_minus = Metric([[1.0 if i == j else 0.0 for j in range(7)] for i in range(7)],
                     orientation=-1)
    f = KForm.basis(7, (1, 2, 3), 1.0)
    assert max_coeff_diff(hodge_star(f, g_minus), -hodge_star(f, g_plus)) == 0
