"""Verification corpora behind the CLI `verify` command.

Each check returns a residual (0.0 for exact passes) and carries a
self-describing statement of the identity it verifies.  Suites:

* ``algebra``: exact rational identities of the invariant-form algebra;
* ``g2``: metric recovery, decompositions, and torsion extraction;
* ``torus``: spectral residuals of the fibered-model formulas;
* ``ode``: the flow engine against closed forms and the regime table.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import algebra as alg
from . import g2, ode
from .exterior import (
    KForm,
    Metric,
    Vector,
    flat,
    hodge_star,
    inner,
    interior,
    max_coeff_diff,
    wedge,
)
from .scalars import SymScalar, sym


@dataclass
class CheckResult:
    check_id: str
    statement: str
    status: str  # 'pass' | 'fail'
    residual: float
    runtime: float
    tolerance: float

    def to_dict(self):
        return {
            "check_id": self.check_id,
            "statement": self.statement,
            "status": self.status,
            "residual": self.residual,
            "runtime": self.runtime,
            "tolerance": self.tolerance,
        }


def _run(checks):
    out = []
    for check_id, statement, tol, fn in checks:
        t0 = time.perf_counter()
        try:
            residual = float(fn())
        except Exception as exc:  # a crash is a failing check, not a crash of the suite
            out.append(
                CheckResult(check_id, f"{statement} [error: {exc}]", "fail",
                            float("inf"), time.perf_counter() - t0, tol)
            )
            continue
        status = "pass" if residual <= tol else "fail"
        out.append(
            CheckResult(check_id, statement, status, residual,
                        time.perf_counter() - t0, tol)
        )
    return out


def _exact(condition):
    return 0.0 if condition else float("inf")


# ---------------------------------------------------------------------------
# algebra suite (exact; tolerance 0)
# ---------------------------------------------------------------------------

def suite_algebra():
    a, b, A, Y = sym("a"), sym("b"), sym("A"), sym("Y")
    phi = alg.ansatz_phi()
    psi = alg.ansatz_psi()
    omega2 = alg.omega(2)

    def check_dphi():
        return _exact(phi.d() == omega2.scaled(a * b**2))

    def check_dpsi():
        return _exact(phi.star(a, b).d().is_zero)

    def check_psi_star():
        return _exact(phi.star(a, b) == psi)

    def check_star_dphi():
        return _exact(phi.d().star(a, b) == (alg.eta() * alg.omega()).scaled(a**2 * 2))

    def check_laplacian():
        return _exact(alg.laplacian_coclosed(phi, a, b) == omega2.scaled(a**2 * 2))

    def check_tau0():
        return _exact(alg.scalar_torsion(phi, a, b) == a * Fraction(6, 7) * sym("b", -2))

    def check_modified():
        t = alg.modified_term(phi, alg.scalar_torsion(phi, a, b))
        return _exact(t == omega2.scaled(a * (A * b**2 - a * 3)))

    def check_coefficient_equations():
        res = alg.coflow_evolution_residuals()
        bdot, adot = sym("bdot"), sym("adot")
        want_w2 = b**3 * bdot * 2 - a * (A * b**2 - a)
        want_es = -(adot * b**3 + a * b**2 * bdot * 3)
        ok = (
            res["omega2"] == want_w2
            and res["eta_sigma"] == want_es
            and res["full"].is_zero
        )
        return _exact(ok)

    def check_constant_norm_sector():
        # tau0 and the Laplacian in the constant-|Y| contact sector (a=Y, b=1)
        phi_c = alg.ansatz_phi(Y, SymScalar.constant(1))
        one = SymScalar.constant(1)
        tau0 = alg.scalar_torsion(phi_c, Y, one)
        lap = alg.laplacian_coclosed(phi_c, Y, one)
        return _exact(tau0 == Y * Fraction(6, 7) and lap == omega2.scaled(Y**2 * 2))

    def check_epsilon_structure():
        eps = sym("eps")
        phi_e = alg.ansatz_phi(eps, SymScalar.constant(1))
        return _exact(
            phi_e.d() == omega2.scaled(eps)
            and alg.laplacian_coclosed(phi_e, eps, SymScalar.constant(1))
            == omega2.scaled(eps**2 * 2)
        )

    def check_rho_sigma():
        return _exact(
            alg.rho() * alg.sigma() == alg.omega(3).scaled(Fraction(2, 3))
            and alg.sigma() * alg.rho() == alg.omega(3).scaled(Fraction(-2, 3))
        )

    def check_d_squared():
        keys = [(1, 0, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1), (1, 2, 0, 0)]
        ok = all(
            alg.AlgebraElement({k: SymScalar.constant(1)}).d().d().is_zero for k in keys
        )
        return _exact(ok)

    def check_star_involution():
        ok = True
        for key in alg._STAR_TABLE:
            m = alg.AlgebraElement({key: SymScalar.constant(1)})
            kdeg = alg._key_degree(key)
            want = m  # k(7-k) is even for every k in dim 7
            ok = ok and m.star(a, b).star(a, b) == want and kdeg <= 7
        return _exact(ok)

    def check_volume():
        one = alg.one()
        return _exact(
            one.star(a, b) == (alg.eta() * alg.omega(3)).scaled(a * b**6 * Fraction(1, 6))
        )

    def check_scaled_extra_term():
        # conformally scaled transverse form omega' = v^2 omega with constant
        # norm |Y|_{omega'} = v^-3: the extra term of the broken family with
        # dlog|Y| = 0 expands to (A v^-1 - 3 v^-6) omega^2 exactly
        v = sym("v")
        av, bv = sym("v", -3), v
        phi_p = alg.ansatz_phi(av, bv)
        tau0 = alg.scalar_torsion(phi_p, av, bv)
        ok = tau0 == SymScalar.monomial(Fraction(6, 7), {"v": -5})
        extra = alg.modified_term(phi_p, tau0)
        want = omega2.scaled(A * sym("v", -1) - SymScalar.monomial(3, {"v": -6}))
        return _exact(ok and extra == want)

    checks = [
        ("alg-dphi", "d(phi_t) = a b^2 omega^2", 0.0, check_dphi),
        ("alg-dpsi", "d(psi_t) = 0", 0.0, check_dpsi),
        ("alg-psi", "*(phi_t) = -a b^3 eta^ImY + (1/2) b^4 omega^2", 0.0, check_psi_star),
        ("alg-star-dphi", "*(d phi_t) = 2 a^2 eta ^ omega", 0.0, check_star_dphi),
        ("alg-laplacian", "d * d phi_t = 2 a^2 omega^2", 0.0, check_laplacian),
        ("alg-tau0", "tau0 = 6a/(7 b^2)", 0.0, check_tau0),
        ("alg-modified", "d((A - 7/2 tau0) phi_t) = a (A b^2 - 3a) omega^2", 0.0, check_modified),
        (
            "alg-flow-equations",
            "coefficient equations d(b^4)/dt = 2a(A b^2 - a), d(a b^3)/dt = 0; zero residual after substitution",
            0.0,
            check_coefficient_equations,
        ),
        (
            "alg-constant-norm",
            "constant-norm sector: tau0 = (6/7)|Y|, Laplacian = 2|Y|^2 omega^2",
            0.0,
            check_constant_norm_sector,
        ),
        (
            "alg-epsilon",
            "epsilon-structure (a=eps, b=1): d phi = eps omega^2, Laplacian = 2 eps^2 omega^2",
            0.0,
            check_epsilon_structure,
        ),
        ("alg-rho-sigma", "rho ^ sigma = (2/3) omega^3 (graded sign checked)", 0.0, check_rho_sigma),
        ("alg-d-squared", "d o d = 0 on all eta-monomials", 0.0, check_d_squared),
        ("alg-star-involution", "** = identity on all basis monomials", 0.0, check_star_involution),
        ("alg-volume", "*1 = a b^6 eta ^ omega^3 / 6", 0.0, check_volume),
        (
            "alg-scaled-extra",
            "conformally scaled extra term reproduces (A - 3Y') c Y' omega^2",
            0.0,
            check_scaled_extra_term,
        ),
    ]
    return _run(checks)


# ---------------------------------------------------------------------------
# g2 suite
# ---------------------------------------------------------------------------

def suite_g2(seed=20240, n_random=200):
    rng = np.random.default_rng(seed)

    def check_metric_phi0():
        s = g2.G2Structure.from_phi(g2.standard_phi("float"))
        worst = 0.0
        for i in range(1, 8):
            for j in range(1, 8):
                want = 1.0 if i == j else 0.0
                worst = max(worst, abs(s.metric[i, j] - want))
        worst = max(worst, abs(s.vol.coeffs.get(tuple(range(1, 8)), 0.0) - 1.0))
        return worst

    def check_metric_ansatz_symbolic():
        s = g2.ccy_structure()
        a2, b2 = sym("a", 2), sym("b", 2)
        ok = all(s.metric[i, i] == b2 for i in range(1, 7)) and s.metric[7, 7] == a2
        ok = ok and s.vol == KForm.volume(7, sym("a") * sym("b", 6))
        ok = ok and s.defining_relation_residual() == 0.0
        return _exact(ok)

    def check_phi_psi_7vol():
        s = g2.G2Structure.from_phi(g2.standard_phi("float"))
        return max_coeff_diff(wedge(s.phi, s.psi), s.vol.scaled(7))

    def check_decompose2():
        s = g2.G2Structure.from_phi(g2.standard_phi("float"))
        worst = 0.0
        for _ in range(20):
            beta = _random_form(rng, 2)
            b7, b14 = g2.decompose2(beta, s)
            worst = max(worst, max_coeff_diff(b7 + b14, beta))
            t7 = hodge_star(wedge(s.phi, b7), s.metric)
            t14 = hodge_star(wedge(s.phi, b14), s.metric)
            worst = max(worst, max_coeff_diff(t7, b7.scaled(2.0)))
            worst = max(worst, max_coeff_diff(t14, -b14))
        # X ⌟ phi lies in the 7-part; dx45 - dx67 is a 14-type combination for phi0
        X = Vector([float(x) for x in rng.standard_normal(7)])
        _, b14 = g2.decompose2(interior(X, s.phi), s)
        worst = max(worst, b14.max_abs())
        w14 = KForm(7, 2, {(4, 5): 1.0, (6, 7): -1.0})
        eig = hodge_star(wedge(s.phi, w14), s.metric)
        worst = max(worst, max_coeff_diff(eig, -w14))
        b7, _ = g2.decompose2(w14, s)
        return max(worst, b7.max_abs())

    def check_decompose3():
        s = g2.G2Structure.from_phi(g2.standard_phi("float"))
        worst = 0.0
        g1, g7, g27 = g2.decompose3(s.phi, s)
        worst = max(worst, max_coeff_diff(g1, s.phi), g7.max_abs(), g27.max_abs())
        X = Vector([float(x) for x in rng.standard_normal(7)])
        xpsi = interior(X, s.psi)
        g1, g7, g27 = g2.decompose3(xpsi, s)
        worst = max(worst, g1.max_abs(), g27.max_abs(), max_coeff_diff(g7, xpsi))
        for _ in range(10):
            gamma = _random_form(rng, 3)
            g1, g7, g27 = g2.decompose3(gamma, s)
            worst = max(worst, max_coeff_diff(g1 + g7 + g27, gamma))
            worst = max(worst, abs(inner(g1, g7, s.metric)))
            worst = max(worst, abs(inner(g1, g27, s.metric)))
            worst = max(worst, abs(inner(g7, g27, s.metric)))
        return worst

    def check_j_operator():
        s = g2.G2Structure.from_phi(g2.standard_phi("float"))
        jphi = g2.j_operator(s.phi, s)
        worst = max(
            abs(jphi[i, j] - (6.0 if i == j else 0.0))
            for i in range(1, 8)
            for j in range(1, 8)
        )
        zero = g2.j_operator(KForm.zero(7, 3), s)
        return max(worst, zero.max_abs())

    def check_torsion_roundtrip():
        # choose torsion forms, reconstruct (dphi, dpsi), extract them back
        s = g2.G2Structure.from_phi(g2.standard_phi("float"))
        worst = 0.0
        for _ in range(10):
            tau0 = float(rng.standard_normal())
            tau1 = _random_form(rng, 1, 0.5)
            _, tau2 = g2.decompose2(_random_form(rng, 2, 0.5), s)
            _, _, tau3 = g2.decompose3(_random_form(rng, 3, 0.5), s)
            tf = g2.TorsionForms(tau0, tau1, tau2, tau3)
            dphi = tf.reconstruct_dphi(s)
            dpsi = tf.reconstruct_dpsi(s)
            got = g2.extract_torsion(s, dphi, dpsi, tol=1e-8)
            worst = max(worst, abs(got.tau0 - tau0))
            worst = max(worst, max_coeff_diff(got.tau1, tau1))
            worst = max(worst, max_coeff_diff(got.tau2, tau2))
            worst = max(worst, max_coeff_diff(got.tau3, tau3))
        return worst

    def check_ccy_torsion_exact():
        s = g2.ccy_structure()
        dphi = g2.contact_differential(s.phi)
        dpsi = g2.contact_differential(s.psi)
        tf = g2.extract_torsion(s, dphi, dpsi)
        a, b = sym("a"), sym("b")
        ok = tf.tau0 == a * Fraction(6, 7) * sym("b", -2)
        want_tau3 = g2.re_upsilon().scaled(a * b * Fraction(-6, 7)) + wedge(
            g2.eta_form(), g2.kahler_form()
        ).scaled(a**2 * Fraction(8, 7))
        ok = ok and tf.tau3 == want_tau3
        T = g2.full_torsion(tf, s)
        ok = ok and T.norm_sq(s.metric) == sym("a", 2) * Fraction(15, 4) * sym("b", -4)
        lap = g2.hodge_laplacian_psi(s, g2.contact_differential)
        ok = ok and lap == wedge(g2.kahler_form(), g2.kahler_form()).scaled(sym("a", 2) * 2)
        return _exact(ok)

    def check_star_involution():
        worst = 0.0
        for n in (6, 7):
            gm = Metric.identity(n, "float")
            for k in range(n + 1):
                from itertools import combinations

                for idx in combinations(range(1, n + 1), k):
                    f = KForm.basis(n, idx, 1.0)
                    ss = hodge_star(hodge_star(f, gm), gm)
                    sign = (-1) ** (k * (n - k))
                    worst = max(worst, max_coeff_diff(ss, f.scaled(float(sign))))
        return worst

    def check_wedge_star_inner():
        gm = _random_metric(rng, 7)
        worst = 0.0
        vol = gm.volume_form()
        for _ in range(n_random):
            k = int(rng.integers(0, 8))
            x = _random_form(rng, k)
            y = _random_form(rng, k)
            lhs = wedge(x, hodge_star(y, gm))
            rhs = vol.scaled(float(inner(x, y, gm)))
            worst = max(worst, max_coeff_diff(lhs, rhs))
        return worst

    def check_interior_adjoint():
        gm = _random_metric(rng, 7)
        worst = 0.0
        for _ in range(50):
            k = int(rng.integers(1, 8))
            x = _random_form(rng, k)
            y = _random_form(rng, k - 1)
            X = Vector([float(v) for v in rng.standard_normal(7)])
            lhs = inner(interior(X, x), y, gm)
            rhs = inner(x, wedge(flat(X, gm), y), gm)
            worst = max(worst, abs(lhs - rhs))
        return worst

    checks = [
        ("g2-metric-phi0", "metric of the standard positive 3-form is the identity", 1e-12, check_metric_phi0),
        ("g2-metric-ansatz", "Ansatz metric is a^2 eta^2 + b^2 g_D exactly", 0.0, check_metric_ansatz_symbolic),
        ("g2-phi-psi-vol", "phi ^ psi = 7 vol", 1e-12, check_phi_psi_7vol),
        ("g2-decompose2", "2-form projectors: eigenvalues +2/-1, idempotent, complete", 1e-10, check_decompose2),
        ("g2-decompose3", "3-form splitting: orthogonal parts summing to the input", 1e-9, check_decompose3),
        ("g2-j-operator", "j(phi) = 6 g and j(0) = 0", 1e-10, check_j_operator),
        ("g2-torsion-roundtrip", "reconstruct-then-extract returns the chosen torsion forms", 1e-9, check_torsion_roundtrip),
        (
            "g2-ccy-exact",
            "Ansatz torsion: tau0 = 6a/7b^2, tau3, |T|^2 = 15/4 a^2 b^-4, Laplacian = 2a^2 omega^2 (exact)",
            0.0,
            check_ccy_torsion_exact,
        ),
        ("g2-star-involution", "** = (-1)^(k(n-k)) on all basis forms, n in {6,7}", 1e-12, check_star_involution),
        ("g2-wedge-star", "a ^ *b = <a,b> vol on random same-degree pairs", 1e-12, check_wedge_star_inner),
        ("g2-interior-adjoint", "interior product is adjoint to wedging with the dual", 1e-12, check_interior_adjoint),
    ]
    return _run(checks)


def _random_form(rng, degree, scale=1.0, dim=7):
    from itertools import combinations

    out = {}
    for idx in combinations(range(1, dim + 1), degree):
        out[idx] = float(rng.standard_normal()) * scale
    return KForm(dim, degree, out)


def _random_metric(rng, n):
    m = rng.standard_normal((n, n)) * 0.25
    g = np.eye(n) + m @ m.T
    return Metric([[float(x) for x in row] for row in g])


# ---------------------------------------------------------------------------
# torus suite
# ---------------------------------------------------------------------------

def suite_torus(grid_n=16, amplitude=0.05, modes=2, axes=(1, 3), n_samples=96,
                seed=20240):
    from .torus import g2model as tm
    from .torus import slices as ts
    from .torus.forms import BasicForm, form_max_diff, lie_derivative
    from .torus.grid import BasicField, Grid
    from .torus.kahler import (
        dc,
        ddc,
        gradient,
        project_11,
        project_30_03,
        ricci_det_oracle,
        ricci_transverse,
    )

    grid = Grid(active_axes=axes, n=grid_n)

    def _pot(x1, x2, x3, x4, x5, x6):
        # `modes` counts Fourier modes of the potential (the corpus uses
        # low-wavenumber fields: residual floors scale with harmonic depth)
        terms = [np.cos(x1), 0.5 * np.sin(x3), 0.3 * np.cos(x1 + x3),
                 0.2 * np.sin(x1 - x3)]
        return amplitude * sum(terms[: max(1, min(modes, 4))])

    pot = BasicField.from_function(grid, _pot)
    flat = tm.flat_su3(grid)
    pert = tm.perturbed_su3(grid, pot)
    # slice construction targets the 1e-8 regime, which pins the corpus at
    # lowest-mode content (higher harmonics sit at the truncation floor)
    pot1 = BasicField.from_function(
        grid,
        lambda x1, x2, x3, x4, x5, x6: amplitude * (np.cos(x1) + 0.5 * np.sin(x3)),
    )
    pert1 = tm.perturbed_su3(grid, pot1)

    gp = tm.build_g2(pert, convention=tm.PRODUCT)
    gc = tm.build_g2(pert, convention=tm.CONTACT, eta_shift=dc(pot))
    gb = tm.build_g2(pert, convention=tm.CONTACT, eta_shift=None)

    def check_d_squared():
        f = BasicField.from_function(grid, lambda x1, *r: np.cos(x1) * np.sin(r[1]))
        one = BasicForm(grid, 1, {(1,): f, (4,): f})
        worst = one.d().d().max_abs()
        fib = tm.FiberedForm(one, BasicForm(grid, 0, {(): f}), tm.CONTACT)
        worst = max(worst, fib.d().d().max_abs())
        return worst

    def check_coclosed():
        return max(gp.psi.d().max_abs(), gc.psi.d().max_abs(), gb.psi.d().max_abs())

    def check_dc_type():
        f = BasicField.from_function(grid, lambda x1, *r: np.cos(x1))
        w = ddc(f)
        from .torus.kahler import metric_of_omega

        sym_err = 0.0
        try:
            metric_of_omega(w, require_positive=False)
        except ValueError:
            sym_err = float("inf")
        return max(sym_err, w.d().max_abs())

    def check_norm_upsilon():
        worst = (flat.norm() - 1.0).max_abs()
        scaled = tm.SU3Data(grid, flat.omega * 4.0)  # omega -> c^2 omega scales |Y| by c^-3
        worst = max(worst, (scaled.norm() - 0.125).max_abs())
        det_a = tm.kahler_det(pert.omega)
        det_b = tm.hermitian_det(pert.metric())
        worst = max(worst, (det_a - det_b).max_abs())
        nonconst = 0.0 if not pert.norm().is_constant(1e-6) else float("inf")
        return max(worst, nonconst)

    def check_gradient():
        f = pot
        mf = pert.metric()
        v = gradient(f, mf)
        worst = 0.0
        arr = np.zeros(grid.shape + (6,))
        for a in range(6):
            arr[..., a] = v.components[a].data.real
        gv = np.einsum("...ab,...b->...a", mf.mat, arr)
        for a in range(1, 7):
            worst = max(worst, float(np.max(np.abs(gv[..., a - 1] - f.deriv(a).data.real))))
        return worst

    def check_ricci_lie():
        grad = gp.grad_log_norm()
        lie_o = lie_derivative(grad, pert.omega)
        ric = ricci_transverse(pert.omega)
        worst = form_max_diff(lie_o, ric)
        worst = max(worst, form_max_diff(ric, ricci_det_oracle(pert.omega)))
        flat_ric = ricci_transverse(flat.omega)
        return max(worst, flat_ric.max_abs())

    def check_dphi_product():
        dphi = gp.phi.d()
        y = gp.norm
        dlog = ts._dlog_form(y)
        pred_basic = dlog.wedge(pert.re_upsilon()) * (-1.0 / y)
        pred_fiber = dlog.wedge(pert.omega) * y * (-1.0)
        return max(
            form_max_diff(dphi.basic, pred_basic), form_max_diff(dphi.fiber, pred_fiber)
        )

    def check_dphi_ccy_flat():
        gflat = tm.build_g2(flat, convention=tm.CONTACT)
        dphi = gflat.phi.d()
        w2 = flat.omega.wedge(flat.omega)
        return form_max_diff(dphi.basic, w2)

    def _torsion(gd, model):
        rep = tm.check_torsion(gd, model, n_samples=n_samples, seed=seed)
        return rep.max_residual()

    def _laplacian(gd, model):
        rep = tm.check_laplacian(gd, model)
        return rep.max_residual(exclude=("laplacian-constant-trace",))

    def check_bidegree():
        sl = ts.make_satisfying_slice("product-mlcf", pert1, A=0.7)
        return max(
            project_11(sl.beta).max_abs(),
            project_30_03(sl.gamma.imag_part()).max_abs(),
        )

    def check_slices():
        worst = 0.0
        sl = ts.make_satisfying_slice("product-mlcf", pert1, A=0.7)
        rep, _ = ts.constraint_residual("product-mlcf", sl, pert1, A=0.7)
        worst = max(worst, rep.max_residual())
        worst = max(worst, ts.coflow_residual_direct("product-mlcf", sl, pert1, A=0.7))
        fd = BasicField.from_function(grid, lambda x1, *r: 0.03 * np.sin(x1))
        for model, A in (
            ("ccy-lcf", 0.0),
            ("ccy-mlcf", 0.4),
            ("broken-lcf", 0.0),
            ("broken-mlcf", 0.6),
        ):
            sl = ts.make_satisfying_slice(model, flat, A=A, f_dot=fd)
            rep, _ = ts.constraint_residual(model, sl, flat, A=A)
            worst = max(worst, rep.max_residual())
            worst = max(worst, ts.coflow_residual_direct(model, sl, flat, A=A))
        return worst

    def check_ccy_flat_zero_slice():
        # the beta-equation of the contact coflow keeps 2|Y|^2 omega^2 at the
        # trivial slice: this residual is structural, not an error
        zero = ts.DeformationSlice.zero(grid)
        _, forms = ts.constraint_residual("ccy-lcf", zero, flat)
        w2 = flat.omega.wedge(flat.omega)
        return form_max_diff(forms["beta"] * (-1.0), w2 * 2.0)

    def check_reeb_contraction():
        # contracting the combined coflow residual with the Reeb field isolates
        # the gamma-equation
        zero = ts.DeformationSlice.zero(grid)
        gamma_target = ts._dlog_form(pert1.norm()).wedge(pert1.omega) * (
            pert1.norm() * pert1.norm() * 4.0
        )
        sl_bad = ts.DeformationSlice(
            zero.f, zero.f_dot, BasicForm.zero(grid, 2), gamma_target * (-1j), zero.alpha
        )
        # residual fiber part changes exactly by the injected Im(gamma)
        r0 = ts.coflow_residual_form("ccy-lcf", zero, pert1)
        r1 = ts.coflow_residual_form("ccy-lcf", sl_bad, pert1)
        diff = r1 - r0
        return max(
            form_max_diff(diff.reeb_contraction(), gamma_target), diff.basic.max_abs()
        )

    def check_type_ii():
        res = ts.type_ii_deform(pot)
        ok = res.positive and res.omega_prime.d().max_abs() < 1e-12
        big = BasicField.from_function(grid, lambda x1, *r: 3.0 * np.cos(x1))
        res_big = ts.type_ii_deform(big)
        ok = ok and not res_big.positive
        return _exact(ok)

    checks = [
        ("torus-d2", "d o d = 0 for fibered forms (both conventions)", 1e-12, check_d_squared),
        ("torus-coclosed", "d psi = 0 for every built structure", 1e-8, check_coclosed),
        ("torus-dc", "d d^c f is a closed (1,1)-form", 1e-10, check_dc_type),
        ("torus-norm", "|Y|: scaling law, positivity, determinant oracle", 1e-9, check_norm_upsilon),
        ("torus-gradient", "g(grad f, .) = df pointwise", 1e-10, check_gradient),
        (
            "torus-ricci-lie",
            "L_{grad log|Y|} omega = 2i ddbar log|Y| = Ric(omega,J)",
            1e-6,
            check_ricci_lie,
        ),
        ("torus-dphi-product", "d phi of the product model matches its closed form", 1e-6, check_dphi_product),
        ("torus-dphi-ccy", "d phi = |Y| omega^2 for the flat contact structure", 1e-10, check_dphi_ccy_flat),
        ("torus-torsion-product", "product torsion: tau0=tau1=tau2=0, tau3 closed form", 1e-6, lambda: _torsion(gp, "product")),
        ("torus-torsion-ccy", "contact torsion: tau0 = (6/7)|Y|, tau3 with curvature terms", 1e-6, lambda: _torsion(gc, "ccy")),
        ("torus-torsion-broken", "broken torsion: trace-corrected closed form", 1e-6, lambda: _torsion(gb, "broken")),
        ("torus-laplacian-product", "Delta psi = Lie-derivative closed form (product)", 1e-6, lambda: _laplacian(gp, "product")),
        ("torus-laplacian-ccy", "Delta psi with 4|Y|^2 dlog^eta^omega + 2|Y|^2 omega^2", 1e-6, lambda: _laplacian(gc, "ccy")),
        ("torus-laplacian-broken", "Delta psi with the trace-corrected bracket terms", 1e-6, lambda: _laplacian(gb, "broken")),
        ("torus-slices", "constructed slices satisfy the constraints and the direct coflow oracle", 1e-8, check_slices),
        ("torus-flat-residual", "trivial contact slice leaves exactly 2|Y|^2 omega^2", 1e-10, check_ccy_flat_zero_slice),
        ("torus-bidegree", "constructed product solutions have beta^(1,1) = 0 and Im(gamma)^(3,0)+(0,3) = 0", 1e-12, check_bidegree),
        ("torus-reeb", "Reeb contraction isolates the gamma-equation", 1e-9, check_reeb_contraction),
        ("torus-type-ii", "type II deformation: class preserved, positivity breach reported", 0.0, check_type_ii),
    ]
    return _run(checks)


# ---------------------------------------------------------------------------
# ode suite
# ---------------------------------------------------------------------------

def suite_ode():
    def check_rhs_values():
        worst = abs(ode.rhs(1.0, ode.AnsatzParams(1.0, 1.0)))
        worst = max(worst, abs(ode.rhs(1.0, ode.AnsatzParams(1.0, 0.0)) + 0.5))
        p = ode.AnsatzParams(1.0, 2.0)
        bstar = (p.epsilon / p.A) ** 0.2
        return max(worst, abs(ode.rhs(bstar, p)))

    def check_closed_form():
        p = ode.AnsatzParams(1.0, 0.0)
        T = ode.blowup_time(p)
        traj = ode.integrate(p, t_end=0.9 * T)
        worst = 0.0
        for t, b in zip(traj.times, traj.bs):
            cb = ode.closed_form_A0(t, 1.0).b
            worst = max(worst, abs(b - cb) / cb)
        # analytic ODE residual of the closed form on a t-grid
        for t in np.linspace(0.0, 0.9 * T, 50):
            s = 1.0 - 5.0 * t
            db_dt = -0.5 * s ** (1 / 10 - 1)
            worst = max(worst, abs(db_dt - ode.rhs(s ** (1 / 10), p)))
        return worst

    def check_conservation():
        worst = 0.0
        for A in (-1.0, 0.0, 0.5, 2.0):
            p = ode.AnsatzParams(1.0, A)
            traj = ode.integrate(p, t_end=0.05)
            for st in traj.states():
                worst = max(worst, abs(ode.state_a(st, p) * st.b**3 - p.epsilon))
        return worst

    def check_constant_drift():
        p = ode.AnsatzParams(1.0, 1.0)
        traj = ode.integrate(p, t_end=10.0)
        return max(abs(b - 1.0) for b in traj.bs)

    def check_implicit():
        worst = 0.0
        for A, eps in ((0.5, 1.0), (2.0, 1.0), (-1.0, 1.0)):
            p = ode.AnsatzParams(eps, A)
            traj = ode.integrate(p, t_end=1.0 if A < eps else 3.0)
            for st in traj.states():
                if st.b <= 1e-3 or abs(A * st.b**5 - eps) < 1e-12:
                    continue
                worst = max(worst, abs(ode.implicit_residual(st, p)))
        return worst

    def check_blowup_times():
        worst = 0.0
        for eps in (0.5, 1.0, 2.0):
            p = ode.AnsatzParams(eps, 0.0)
            T = ode.blowup_time(p)
            traj = ode.integrate(p, t_end=2.0 * T)
            Tn = ode.extrapolate_blowup(traj)
            worst = max(worst, abs(Tn - T) / T)
        p = ode.AnsatzParams(1.0, 0.5)
        T = ode.blowup_time(p)
        traj = ode.integrate(p, t_end=2.0 * T)
        worst = max(worst, abs(ode.extrapolate_blowup(traj) - T) / T)
        return worst

    def check_regime_table():
        worst = 0.0
        for eps in (0.5, 1.0, 2.0):
            for cond, A in (
                ("A<0", -1.0),
                ("A=0", 0.0),
                ("0<A<eps", 0.5 * eps),
                ("A=eps", eps),
                ("A>eps", 2.0 * eps),
            ):
                p = ode.AnsatzParams(eps, A)
                rep = ode.classify_regime(p)
                if rep.condition != cond:
                    return float("inf")
                traj = ode.integrate(p, t_end=0.02)
                db = traj.bs[-1] - traj.bs[0]
                mono = {"decreasing": db < 0, "constant": db == 0, "increasing": db > 0}[
                    rep.monotonicity
                ]
                if not mono:
                    return float("inf")
                if A > 0:
                    bstar = (eps / A) ** 0.2
                    if abs(rep.steady_state - bstar) > 1e-14:
                        return float("inf")
                    if ode.steady_state_slope(p) <= 0 or rep.stability != "unstable":
                        return float("inf")
                else:
                    if rep.steady_state is not None:
                        return float("inf")
                # monotonicity matches sign(A b^5 - eps) pointwise
                for st in traj.states():
                    s = ode.rhs(st.b, p)
                    if s != 0 and np.sign(s) != np.sign(A * st.b**5 - eps):
                        return float("inf")
        return worst

    def check_lambda():
        p = ode.AnsatzParams(1.0)
        st = ode.AnsatzState(t=0.0, b=1.0)
        worst = abs(ode.lambda_t(st, p) - 15.0 / 4.0)
        # |T|^2 consistency: (15/4) a^2 b^-4 with a = eps b^-3 squares to the
        # Lambda term (symbolic identity)
        a, b, eps = sym("a"), sym("b"), sym("eps")
        t_sq = a**2 * Fraction(15, 4) * sym("b", -4)
        subbed = t_sq.substitute({"a": eps * sym("b", -3)})
        want = eps**2 * Fraction(15, 4) * sym("b", -10)
        worst = max(worst, 0.0 if subbed == want else float("inf"))
        # |Rm|^2 recomposition
        p2 = ode.AnsatzParams(1.0, 0.0, c0=2.0, rm0_sq=3.0)
        st2 = ode.AnsatzState(t=0.0, b=0.7)
        want_rm = 0.7**-4 * 3.0 + 0.7**-20 * 2.0
        worst = max(worst, abs(ode.rm_sq(st2, p2) - want_rm))
        # Lambda^2 = |Rm|^2 + |T|^4 + |grad T|^2 recomposes from the pieces
        t4 = (15 / 4 * 0.7**-10) ** 2
        gradt = 2.0 * 0.7**-20
        worst = max(worst, abs(ode.lambda_t(st2, p2) - math.sqrt(want_rm + t4 + gradt)))
        return worst

    def check_singularity():
        p = ode.AnsatzParams(1.0, 0.0)
        T = ode.blowup_time(p)
        traj = ode.integrate(p, t_end=0.95 * T)
        series = [
            (T - t) * ode.lambda_t(st, p) for t, st in zip(traj.times, traj.states())
        ]
        worst = max(abs(v - 0.75) for v in series)
        full = ode.integrate(p, t_end=2.0 * T)
        rep = ode.classify_singularity(full, p, T_max=T)
        if rep.type != "TypeI" or abs(rep.T_max - 0.2) > 1e-6:
            return float("inf")
        pc = ode.AnsatzParams(1.0, 1.0)
        trc = ode.integrate(pc, t_end=5.0)
        repc = ode.classify_singularity(trc, pc)
        if repc.type != "none":
            return float("inf")
        return worst

    def check_u_mode():
        p = ode.AnsatzParams(1.0, 0.0)
        t_end = 0.15
        tb = ode.integrate(p, t_end=t_end)
        tu = ode.integrate(p, t_end=t_end, variable="u")
        exact = ode.closed_form_A0(t_end, 1.0).b
        return max(abs(tb.final_b - exact), abs(tu.final_b - exact))

    checks = [
        ("ode-rhs", "rhs zeros at the steady state and matches hand values", 1e-14, check_rhs_values),
        ("ode-closed-form", "A=0 trajectory matches the exact power-law to 1e-8 (t <= 0.9T)", 1e-8, check_closed_form),
        ("ode-conservation", "a b^3 = eps at every accepted step", 1e-12, check_conservation),
        ("ode-constant", "A=eps solution is constant with drift < 1e-10 over [0,10]", 1e-10, check_constant_drift),
        ("ode-implicit", "separable implicit relation holds along trajectories", 1e-6, check_implicit),
        ("ode-blowup", "collapse time recovered within 1e-4 relative", 1e-4, check_blowup_times),
        ("ode-regimes", "five-row regime table: steady states, stability, monotonicity", 0.0, check_regime_table),
        ("ode-lambda", "Lambda closed form, |T|^2 identity, |Rm|^2 recomposition", 1e-12, check_lambda),
        ("ode-singularity", "(T-t) Lambda constant = 3/4; Type I at T = 1/(5 eps^2); none for A=eps", 1e-6, check_singularity),
        ("ode-u-mode", "u = b^10 substitution integrator agrees with the b-integrator", 1e-8, check_u_mode),
    ]
    return _run(checks)


SUITES = {
    "algebra": suite_algebra,
    "g2": suite_g2,
    "torus": suite_torus,
    "ode": suite_ode,
}


def run_suite(name, **kwargs):
    if name == "all":
        out = []
        for key in ("algebra", "g2", "torus", "ode"):
            fn = SUITES[key]
            out.extend(fn(**kwargs) if key == "torus" else fn())
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    fn = SUITES[name]
    return fn(**kwargs) if name == "torus" else fn()
