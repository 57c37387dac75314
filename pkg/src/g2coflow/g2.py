"""G2-structure operations on a 7-dimensional model space.

Metric recovery from a positive 3-form phi via

    (X ⌟ phi) ^ (Y ⌟ phi) ^ phi = 6 g(X,Y) vol,

type decomposition of 2- and 3-forms, torsion-form extraction from
(d phi, d psi), the j operator, the full torsion 2-tensor

    T = tau0/4 g - tau1# ⌟ phi - 1/2 tau2 - 1/4 j(tau3),

and the Hodge Laplacian of psi for coclosed structures (Delta psi = d*d phi).

Works with float coefficients (general metrics) and with exact symbolic
coefficients for diagonal monomial metrics, which covers the contact
Calabi-Yau family phi_t = b^3 ReUpsilon + a b^2 eta ^ omega.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .exterior import (
    KForm,
    Metric,
    Vector,
    hodge_star,
    inner,
    interior,
    max_coeff_diff,
    sharp,
    wedge,
)
from .scalars import SymScalar, is_zero_scalar, sym

DIM = 7

#: Fiber axis of the contact model: eta = dx^7, base axes 1..6 with the
#: complex pairing (1,2), (3,4), (5,6).
FIBER_AXIS = 7

# ReUpsilon / ImUpsilon for Upsilon = (dx1+i dx2)^(dx3+i dx4)^(dx5+i dx6)
_RE_UPSILON = {(1, 3, 5): 1, (1, 4, 6): -1, (2, 3, 6): -1, (2, 4, 5): -1}
_IM_UPSILON = {(1, 3, 6): 1, (1, 4, 5): 1, (2, 3, 5): 1, (2, 4, 6): -1}
_KAHLER = {(1, 2): 1, (3, 4): 1, (5, 6): 1}

# Standard positive 3-form with fiber-first labelling; induces the
# identity metric and volume dx^1...7.
_STANDARD_PHI = {
    (1, 2, 3): 1,
    (1, 4, 5): 1,
    (1, 6, 7): 1,
    (2, 4, 6): 1,
    (2, 5, 7): -1,
    (3, 4, 7): -1,
    (3, 5, 6): -1,
}


def standard_phi(kind="exact"):
    coeffs = _STANDARD_PHI
    if kind == "float":
        coeffs = {k: float(v) for k, v in coeffs.items()}
    return KForm(DIM, 3, dict(coeffs))


def re_upsilon(kind="exact"):
    c = _RE_UPSILON if kind != "float" else {k: float(v) for k, v in _RE_UPSILON.items()}
    return KForm(DIM, 3, dict(c))


def im_upsilon(kind="exact"):
    c = _IM_UPSILON if kind != "float" else {k: float(v) for k, v in _IM_UPSILON.items()}
    return KForm(DIM, 3, dict(c))


def kahler_form(kind="exact"):
    c = _KAHLER if kind != "float" else {k: float(v) for k, v in _KAHLER.items()}
    return KForm(DIM, 2, dict(c))


def eta_form(kind="exact"):
    return KForm(DIM, 1, {(FIBER_AXIS,): 1.0 if kind == "float" else 1})


def ccy_phi(a=None, b=None):
    """Ansatz 3-form b^3 ReUpsilon + a b^2 eta ^ omega (symbolic by default)."""
    a = sym("a") if a is None else a
    b = sym("b") if b is None else b
    kind = "exact" if isinstance(a, SymScalar) or isinstance(b, SymScalar) else "float"
    rho = re_upsilon(kind)
    eo = wedge(eta_form(kind), kahler_form(kind))
    return rho.scaled(b**3) + eo.scaled(a * b**2)


def contact_differential(form, curvature=None):
    """Exterior derivative of a constant-coefficient form on the contact model.

    Implements d(eta) = omega with all base coordinate forms closed:
    d(c dx^I) = 0 unless the fiber axis lies in I, in which case
    d(c dx^(I' ∪ {7})) = (-1)^|I'| c dx^I' ^ omega.
    """
    omega = curvature
    if omega is None:
        omega = kahler_form() if form.kind != "float" else kahler_form("float")
    out = KForm.zero(DIM, min(form.degree + 1, DIM))
    for I, c in form.coeffs.items():
        if FIBER_AXIS not in I:
            continue
        base = tuple(i for i in I if i != FIBER_AXIS)
        sign = -1 if len(base) % 2 else 1
        term = wedge(KForm(DIM, len(base), {base: sign * c}, _normalized=True), omega)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# structure recovery
# ---------------------------------------------------------------------------

class DegeneratePhiError(ValueError):
    pass


def _contraction_matrix(phi):
    """B_ij with (e_i ⌟ phi) ^ (e_j ⌟ phi) ^ phi = B_ij dx^1..n."""
    n = phi.dim
    top = tuple(range(1, n + 1))
    cont = [interior(Vector.basis(n, i), phi) for i in range(1, n + 1)]
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            w = wedge(wedge(cont[i], cont[j]), phi)
            row.append(w.coeffs.get(top, 0))
        rows.append(row)
    return rows


def metric_from_phi(phi):
    """Recover (metric, volume form) from a positive 3-form.

    B = 6 g sqrt(det g) against the reference volume dx^1..7, so
    sqrt(det g) = (det B / 6^7)^(1/9) and g = B / (6 sqrt(det g)).
    """
    n = phi.dim
    B = _contraction_matrix(phi)
    if phi.kind == "sym":
        return _metric_from_phi_symbolic(B, n)
    if phi.kind in ("exact", "neutral"):
        exact = _metric_from_phi_exact(B, n)
        if exact is not None:
            return exact
    Bf = np.array([[float(x) for x in row] for row in B])
    detB = float(np.linalg.det(Bf))
    if detB <= 1e-8:
        raise DegeneratePhiError(f"det B = {detB:.3e} <= 1e-8")
    sqrt_det_g = (detB / 6**n) ** (1.0 / 9.0)
    gmat = Bf / (6.0 * sqrt_det_g)
    gmat = 0.5 * (gmat + gmat.T)  # B is symmetric up to float dust
    g = Metric([[float(x) for x in row] for row in gmat])
    if not g.is_positive_definite():
        raise DegeneratePhiError("recovered metric is not positive definite")
    vol = KForm.volume(n, sqrt_det_g)
    return g, vol


def _metric_from_phi_exact(B, n):
    """Exact rational recovery when det B / 6^n has a rational 9th root."""
    from .exterior import _bareiss_det
    from .scalars import rational_nth_root

    detB = _bareiss_det([[Fraction(x) for x in row] for row in B])
    if detB <= Fraction(1, 10**8):
        raise DegeneratePhiError(f"det B = {float(detB):.3e} <= 1e-8")
    sqrt_det_g = rational_nth_root(detB / Fraction(6**n), 9)
    if sqrt_det_g is None:
        return None  # fall back to the float path
    scale = Fraction(1) / (6 * sqrt_det_g)
    g = Metric([[Fraction(x) * scale for x in row] for row in B])
    if not g.is_positive_definite():
        raise DegeneratePhiError("recovered metric is not positive definite")
    return g, KForm.volume(n, sqrt_det_g)


def _metric_from_phi_symbolic(B, n):
    for i in range(n):
        for j in range(n):
            if i != j and not is_zero_scalar(B[i][j]):
                raise ValueError("symbolic metric recovery needs diagonal B")
    detB = SymScalar.constant(Fraction(1, 6**n))
    diag = []
    for i in range(n):
        d = B[i][i]
        if not isinstance(d, SymScalar):
            d = SymScalar.constant(d)
        diag.append(d)
        detB = detB * d
    sqrt_det_g = detB.root(9)
    scale = (SymScalar.constant(6) * sqrt_det_g).inverse()
    g = Metric.diagonal([d * scale for d in diag])
    vol = KForm.volume(n, sqrt_det_g)
    return g, vol


@dataclass
class G2Structure:
    phi: KForm
    metric: Metric
    vol: KForm
    psi: KForm

    @classmethod
    def from_phi(cls, phi):
        g, vol = metric_from_phi(phi)
        psi = hodge_star(phi, g)
        return cls(phi=phi, metric=g, vol=vol, psi=psi)

    def defining_relation_residual(self):
        """Max residual of (X⌟phi)^(Y⌟phi)^phi = 6 g(X,Y) vol over basis pairs."""
        n = self.phi.dim
        top = tuple(range(1, n + 1))
        volc = self.vol.coeffs.get(top, 0)
        B = _contraction_matrix(self.phi)
        worst = 0.0
        for i in range(n):
            for j in range(n):
                lhs = B[i][j]
                rhs = 6 * (self.metric[i + 1, j + 1] * volc)
                if isinstance(lhs, SymScalar) or isinstance(rhs, SymScalar):
                    diff = (lhs if isinstance(lhs, SymScalar) else SymScalar.constant(lhs)) - rhs
                    if not diff.is_zero:
                        return float("inf")
                else:
                    worst = max(worst, abs(float(lhs) - float(rhs)))
        return worst

    def validate(self, tol=1e-10):
        res = self.defining_relation_residual()
        if res > tol:
            raise ValueError(f"defining relation residual {res:.3e} > {tol}")
        pv = wedge(self.phi, self.psi)
        want = self.vol.scaled(7)
        if self.phi.kind == "sym":
            if pv != want:
                raise ValueError("phi ^ psi != 7 vol")
        elif max_coeff_diff(pv, want) > tol * max(1.0, want.max_abs()):
            raise ValueError("phi ^ psi != 7 vol")
        return self


def ccy_structure(a=None, b=None):
    """Symbolic (or float) G2 structure of the contact Calabi-Yau Ansatz."""
    return G2Structure.from_phi(ccy_phi(a, b))


# ---------------------------------------------------------------------------
# type decomposition
# ---------------------------------------------------------------------------

def decompose2(beta, s):
    """Split a 2-form into its 7- and 14-dimensional components.

    With T(beta) = *(phi ^ beta): eigenvalue +2 on the 7-part, -1 on the
    14-part, so P7 = (T+1)/3 and P14 = (2-T)/3.
    """
    t = hodge_star(wedge(s.phi, beta), s.metric)
    beta7 = (t + beta).divided_by_int(3)
    beta14 = (beta.scaled(2) - t).divided_by_int(3)
    return beta7, beta14


def _form_basis_index(dim, degree):
    return list(combinations(range(1, dim + 1), degree))


def form_to_vec(form, basis=None):
    basis = basis or _form_basis_index(form.dim, form.degree)
    return np.array([float(form.coeffs.get(I, 0)) for I in basis])


def vec_to_form(vec, dim, degree, basis=None):
    basis = basis or _form_basis_index(dim, degree)
    return KForm(dim, degree, {I: float(c) for I, c in zip(basis, vec) if c != 0.0})


def decompose3(gamma, s):
    """Split a 3-form into (gamma1, gamma7, gamma27).

    gamma1 is the phi-multiple, gamma7 the projection onto {X ⌟ psi},
    gamma27 the metric-orthogonal remainder.
    """
    g = s.metric
    phi_norm = inner(s.phi, s.phi, g)
    c1 = inner(gamma, s.phi, g) / phi_norm
    gamma1 = s.phi.scaled(c1)
    basis = [interior(Vector.basis(DIM, i), s.psi) for i in range(1, DIM + 1)]
    gram = np.array([[float(inner(u, v, g)) for v in basis] for u in basis])
    rhs = np.array([float(inner(gamma, v, g)) for v in basis])
    coeffs = np.linalg.solve(gram, rhs)
    gamma7 = KForm.zero(DIM, 3)
    for c, v in zip(coeffs, basis):
        gamma7 = gamma7 + v.scaled(float(c))
    gamma27 = gamma - gamma1 - gamma7
    return gamma1, gamma7, gamma27


# ---------------------------------------------------------------------------
# torsion
# ---------------------------------------------------------------------------

@dataclass
class TorsionForms:
    tau0: object
    tau1: KForm
    tau2: KForm
    tau3: KForm

    def reconstruct_dphi(self, s):
        """tau0 psi + 3 tau1 ^ phi + * tau3."""
        out = s.psi.scaled(self.tau0)
        if not self.tau1.is_zero:
            out = out + wedge(self.tau1, s.phi).scaled(3)
        return out + hodge_star(self.tau3, s.metric)

    def reconstruct_dpsi(self, s):
        """4 tau1 ^ psi + tau2 ^ phi."""
        out = wedge(self.tau1, s.psi).scaled(4)
        return out + wedge(self.tau2, s.phi)


class TorsionExtractionError(ValueError):
    pass


def _residual(a, b, sym_mode):
    if sym_mode:
        return 0.0 if a == b else float("inf")
    return max_coeff_diff(a, b)


def extract_torsion(s, dphi, dpsi, tol=1e-10):
    """Extract (tau0, tau1, tau2, tau3) from supplied (d phi, d psi).

    tau0 = (1/7) * (phi ^ dphi); tau1 is solved from the 7-dimensional
    component of dpsi spanned by {dx^i ^ psi}; tau2 inverts beta -> beta^phi
    on the 14-part of the remainder; tau3 = *(dphi - tau0 psi - 3 tau1^phi).
    The Fernandez-Gray reconstruction must hold within tol, otherwise the
    inputs are not the differentials of a G2-structure.
    """
    g = s.metric
    sym_mode = s.phi.kind == "sym" or dphi.kind == "sym"
    tau0_form = hodge_star(wedge(s.phi, dphi), g)
    tau0 = tau0_form.coeffs.get((), SymScalar({}) if sym_mode else 0.0)
    if sym_mode:
        if not isinstance(tau0, SymScalar):
            tau0 = SymScalar.constant(tau0)
        tau0 = tau0 * Fraction(1, 7)
    else:
        tau0 = float(tau0) / 7.0

    if dpsi.is_zero or (dpsi.kind != "sym" and dpsi.max_abs() < tol):
        tau1 = KForm.zero(DIM, 1)
        tau2 = KForm.zero(DIM, 2)
    else:
        if sym_mode:
            raise TorsionExtractionError(
                "symbolic extraction supports coclosed structures (dpsi = 0) only"
            )
        tau1, tau2 = _solve_tau12(s, dpsi, tol)

    rest = dphi - s.psi.scaled(tau0)
    if not tau1.is_zero:
        rest = rest - wedge(tau1, s.phi).scaled(3)
    tau3 = hodge_star(rest, g)

    tf = TorsionForms(tau0=tau0, tau1=tau1, tau2=tau2, tau3=tau3)
    res_phi = _residual(tf.reconstruct_dphi(s), dphi, sym_mode)
    res_psi = _residual(tf.reconstruct_dpsi(s), dpsi, sym_mode)
    # tau3 must be orthogonal to phi and to every X ⌟ psi (27-part purity)
    res_type = _tau3_type_residual(tau3, s, sym_mode)
    worst = max(res_phi, res_psi, res_type)
    if sym_mode:
        if worst > 0:
            raise TorsionExtractionError("inputs are not G2-compatible (exact check)")
    elif worst > tol * max(1.0, dphi.max_abs(), dpsi.max_abs()):
        raise TorsionExtractionError(
            f"reconstruction residual {worst:.3e} above tolerance {tol}"
        )
    return tf


def _tau3_type_residual(tau3, s, sym_mode):
    g = s.metric
    vals = [inner(tau3, s.phi, g)]
    for i in range(1, DIM + 1):
        vals.append(inner(tau3, interior(Vector.basis(DIM, i), s.psi), g))
    if sym_mode:
        for v in vals:
            sv = v if isinstance(v, SymScalar) else SymScalar.constant(v)
            if not sv.is_zero:
                return float("inf")
        return 0.0
    scale = max(1.0, float(inner(tau3, tau3, g)))
    return max(abs(float(v)) for v in vals) / scale


def _solve_tau12(s, dpsi, tol):
    g = s.metric
    # tau1 from the Gram system on w_i = dx^i ^ psi
    w = [wedge(KForm.basis(DIM, (i,), 1.0), s.psi) for i in range(1, DIM + 1)]
    gram = np.array([[float(inner(u, v, g)) for v in w] for u in w])
    rhs = np.array([float(inner(dpsi, v, g)) for v in w])
    c = np.linalg.solve(gram, rhs)
    tau1 = KForm(DIM, 1, {(i + 1,): float(c[i] / 4.0) for i in range(DIM)})

    # tau2 from the remainder, inverting beta -> beta ^ phi on Omega^2_14
    remainder = dpsi - wedge(tau1, s.psi).scaled(4)
    basis5 = _form_basis_index(DIM, 5)
    cols = []
    cand = []
    for ij in combinations(range(1, DIM + 1), 2):
        _, b14 = decompose2(KForm.basis(DIM, ij, 1.0), s)
        cand.append(b14)
        cols.append(form_to_vec(wedge(b14, s.phi), basis5))
    M = np.array(cols).T
    rhs5 = form_to_vec(remainder, basis5)
    sol, *_ = np.linalg.lstsq(M, rhs5, rcond=None)
    tau2 = KForm.zero(DIM, 2)
    for ck, bk in zip(sol, cand):
        tau2 = tau2 + bk.scaled(float(ck))
    resid = max_coeff_diff(wedge(tau2, s.phi), remainder)
    if resid > tol * max(1.0, dpsi.max_abs()):
        raise TorsionExtractionError(
            f"dpsi remainder is not of the form tau2 ^ phi (residual {resid:.3e})"
        )
    return tau1, tau2


# ---------------------------------------------------------------------------
# tensors
# ---------------------------------------------------------------------------

class SymTensor2:
    """7x7 scalar matrix; the full torsion has symmetric and skew parts."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        self.entries = tuple(tuple(r) for r in entries)

    @classmethod
    def zero(cls, n=DIM):
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def from_metric(cls, g):
        return cls(g.entries)

    @classmethod
    def from_2form(cls, beta, n=DIM):
        """Antisymmetric embedding: t_ij = beta(e_i, e_j)."""
        rows = [[0] * n for _ in range(n)]
        for (i, j), c in beta.coeffs.items():
            rows[i - 1][j - 1] = c
            rows[j - 1][i - 1] = -c
        return cls(rows)

    def __add__(self, other):
        return SymTensor2(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, s):
        return SymTensor2([[s * x for x in row] for row in self.entries])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i - 1][j - 1]

    @property
    def dim(self):
        return len(self.entries)

    def is_symmetric(self, tol=1e-10):
        n = self.dim
        for i in range(n):
            for j in range(i):
                d = self.entries[i][j] - self.entries[j][i]
                if isinstance(d, SymScalar):
                    if not d.is_zero:
                        return False
                elif abs(float(d)) > tol:
                    return False
        return True

    def norm_sq(self, g):
        """|T|^2 = T_ij T_kl g^ik g^jl."""
        n = self.dim
        total = None
        for i in range(n):
            for j in range(n):
                tij = self.entries[i][j]
                if is_zero_scalar(tij):
                    continue
                for k in range(n):
                    gik = g.inv(i + 1, k + 1)
                    if is_zero_scalar(gik):
                        continue
                    for l in range(n):
                        tkl = self.entries[k][l]
                        if is_zero_scalar(tkl):
                            continue
                        gjl = g.inv(j + 1, l + 1)
                        if is_zero_scalar(gjl):
                            continue
                        term = tij * tkl * gik * gjl
                        total = term if total is None else total + term
        return 0 if total is None else total

    def max_abs(self):
        return max(
            (abs(float(x)) for row in self.entries for x in row), default=0.0
        )


def j_operator(gamma, s):
    """j(gamma)(X,Y) = *((X ⌟ phi) ^ (Y ⌟ phi) ^ gamma); symmetric."""
    n = s.phi.dim
    cont = [interior(Vector.basis(n, i), s.phi) for i in range(1, n + 1)]
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            w = wedge(wedge(cont[i], cont[j]), gamma)
            val = hodge_star(w, s.metric).coeffs.get((), 0)
            rows[i][j] = val
            rows[j][i] = val
    return SymTensor2(rows)


def full_torsion(tf, s):
    """Full torsion tensor T = tau0/4 g - tau1# ⌟ phi - tau2/2 - j(tau3)/4."""
    sym_mode = s.phi.kind == "sym"
    quarter = Fraction(1, 4) if sym_mode else 0.25
    half = Fraction(1, 2) if sym_mode else 0.5
    t = SymTensor2.from_metric(s.metric).scaled(tf.tau0 * quarter)
    if not tf.tau1.is_zero:
        t1s = sharp(tf.tau1, s.metric)
        t = t - SymTensor2.from_2form(interior(t1s, s.phi))
    if not tf.tau2.is_zero:
        t = t - SymTensor2.from_2form(tf.tau2).scaled(half)
    t = t - j_operator(tf.tau3, s).scaled(quarter)
    return t


# ---------------------------------------------------------------------------
# Laplacian
# ---------------------------------------------------------------------------

def hodge_laplacian_psi(s, d, tol=1e-10):
    """Delta psi = d * d phi for coclosed structures.

    ``d`` is the model's exterior differential (a callback on KForms);
    the input must satisfy d psi = 0 within tol.
    """
    dpsi = d(s.psi)
    if not dpsi.is_zero:
        if dpsi.kind == "sym" or dpsi.max_abs() > tol:
            raise ValueError("structure is not coclosed: d psi != 0")
    return d(hodge_star(d(s.phi), s.metric))
