"""Time-slice residuals of the coflow characterization theorems.

A deformation slice carries the free data (f, f_dot, beta, gamma, alpha)
of the evolution Ansatz

    d omega / dt = -L_{grad log|Y|} omega + beta,
    d Upsilon / dt =  L_{grad log|Y|} Upsilon + gamma,
    (and for the broken family)  d eta / dt = L eta + alpha.

``constraint_residual`` evaluates LHS - RHS of the characterization
equations at one slice; ``coflow_residual_direct`` is the independent
oracle: it assembles d psi / dt from the Ansatz and subtracts the
machine-computed Delta psi (+ the modification), which must vanish
exactly when the constraint equations hold.

Time derivatives are supplied analytically (f_dot), never by numeric
time differencing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .forms import (
    CONTACT,
    PRODUCT,
    BasicForm,
    FiberedForm,
    form_max_diff,
    lie_derivative,
)
from .grid import BasicField
from .g2model import (
    ResidualReport,
    build_g2,
    laplacian_curvature_terms,
    laplacian_psi,
    modified_extra,
    trace_field,
)
from .kahler import dc, ddc, metric_of_omega

MODELS = (
    "product-lcf",
    "product-mlcf",
    "ccy-lcf",
    "ccy-mlcf",
    "broken-lcf",
    "broken-mlcf",
)


@dataclass
class DeformationSlice:
    """Free slice data; all fields basic. gamma is a complex 3-form."""

    f: BasicField
    f_dot: BasicField
    beta: BasicForm
    gamma: BasicForm
    alpha: BasicForm | None = None

    @classmethod
    def zero(cls, grid):
        return cls(
            f=BasicField.constant(grid, 0.0),
            f_dot=BasicField.constant(grid, 0.0),
            beta=BasicForm.zero(grid, 2),
            gamma=BasicForm.zero(grid, 3),
            alpha=BasicForm.zero(grid, 1),
        )


def _model_parts(model):
    base, flow = model.split("-")
    if base not in ("product", "ccy", "broken") or flow not in ("lcf", "mlcf"):
        raise ValueError(f"unknown model {model!r}")
    return base, flow


def build_model_g2(model, su3, slice_=None):
    """G2 data for a model at a slice (ccy uses eta_t = theta + d^c f)."""
    base, _ = _model_parts(model)
    if base == "product":
        return build_g2(su3, convention=PRODUCT)
    if base == "ccy":
        shift = dc(slice_.f) if slice_ is not None else None
        return build_g2(su3, convention=CONTACT, eta_shift=shift)
    return build_g2(su3, convention=CONTACT, eta_shift=None)


def _dlog_form(y):
    grid = y.grid
    logy = y.log()
    return BasicForm(grid, 1, {(a,): logy.deriv(a) for a in grid.active_axes})


def constraint_residual(model, slice_, su3, A=0.0):
    """LHS - RHS of the slice constraint equations; returns a ResidualReport
    plus the residual forms themselves.

    product-lcf is the A = 0 case of product-mlcf (both equations have an
    overall A factor, so the lcf residuals just assert beta ^ omega = 0 and
    Im(gamma) = 0).
    """
    base, flow = _model_parts(model)
    if flow == "lcf":
        A = 0.0
    if base == "ccy":
        expected = BasicForm.standard_kahler(su3.grid) + ddc(slice_.f)
        if form_max_diff(su3.omega, expected) > 1e-9:
            raise ValueError("model/slice shape mismatch: omega != dTheta + d d^c f")
    gd = build_model_g2(model, su3, slice_)
    grid = su3.grid
    y = gd.norm
    y2 = y * y
    dlog = _dlog_form(y)
    omega = su3.omega
    re_u = su3.re_upsilon()
    im_u = su3.im_upsilon()
    grad = gd.grad_log_norm()
    report = ResidualReport(model=model)
    forms = {}

    if base == "product":
        r_beta = slice_.beta.wedge(omega) + dlog.wedge(re_u) * ((1.0 / y) * A)
        r_gamma = slice_.gamma.imag_part() - dlog.wedge(omega) * (y * A)
        forms["beta"] = r_beta
        forms["gamma"] = r_gamma
        report.add("beta", "beta ^ omega = -(A/|Y|) dlog|Y| ^ Re(Upsilon)", form_max_diff(r_beta, BasicForm.zero(grid, 4)))
        report.add("gamma", "Im(gamma) = A |Y| dlog|Y| ^ omega", form_max_diff(r_gamma, BasicForm.zero(grid, 3)))
        return report, forms

    if base == "ccy":
        dcf = dc(slice_.f)
        dcfdot = dc(slice_.f_dot)
        lie_dcf = lie_derivative(grad, dcf)
        common = (
            -lie_dcf.wedge(im_u)
            - BasicForm.standard_kahler(grid).interior(grad).wedge(im_u)
            + dcfdot.wedge(im_u)
        )
        if flow == "lcf":
            rhs_beta = omega.wedge(omega) * (y2 * 2.0) + common
            rhs_gamma = dlog.wedge(omega) * (y2 * 4.0)
        else:
            rhs_beta = (
                omega.wedge(omega) * (y2 * -1.0)
                + omega.wedge(omega) * (y * A)
                - dlog.wedge(re_u) * ((1.0 / y) * A)
                + common
            )
            rhs_gamma = dlog.wedge(omega) * (y2 * -2.0) + dlog.wedge(omega) * (y * A)
        r_beta = slice_.beta.wedge(omega) - rhs_beta
        r_gamma = slice_.gamma.imag_part() - rhs_gamma
        forms["beta"] = r_beta
        forms["gamma"] = r_gamma
        report.add("beta", "beta ^ omega_t matches the coflow characterization", r_beta.max_abs())
        report.add("gamma", "Im(gamma) matches the curvature term", r_gamma.max_abs())
        return report, forms

    # broken family: the combined 4-form equation plus the alpha equation.
    # The curvature terms are shared with the Laplacian closed form (they
    # carry the [lam omega' - dTheta] bracket, lam = 3 when omega' = dTheta).
    rhs = laplacian_curvature_terms(gd, "broken")
    if flow == "mlcf":
        rhs = rhs + modified_extra(gd, A)
    alpha = slice_.alpha if slice_.alpha is not None else BasicForm.zero(grid, 1)
    lhs = (
        FiberedForm.from_basic(-alpha.wedge(im_u), CONTACT)
        + FiberedForm(BasicForm.zero(grid, 4), -slice_.gamma.imag_part(), CONTACT)
        + FiberedForm.from_basic(omega.wedge(slice_.beta), CONTACT)
    )
    r_main = lhs - rhs
    if flow == "lcf":
        r_alpha = alpha
        alpha_stmt = "alpha = 0"
    else:
        r_alpha = alpha - dlog * ((1.0 / y) * A)
        alpha_stmt = "alpha = (A/|Y|) dlog|Y|"
    forms["alpha"] = r_alpha
    forms["main"] = r_main
    report.add("alpha", alpha_stmt, r_alpha.max_abs())
    report.add(
        "main",
        "-alpha^ImY - eta^Im(gamma) + omega'^beta matches the bracket terms",
        r_main.max_abs(),
    )
    return report, forms


def time_derivative_psi(model, slice_, su3, gd=None):
    """d psi / dt assembled from the Ansatz at the slice (analytic in time)."""
    base, _ = _model_parts(model)
    gd = gd or build_model_g2(model, su3, slice_)
    grid = su3.grid
    im_u = su3.im_upsilon()
    omega = su3.omega
    grad = gd.grad_log_norm()
    # d omega/dt and Im(d Upsilon/dt) from the evolution system
    domega = -lie_derivative(grad, omega) + slice_.beta
    dim_u = lie_derivative(grad, im_u) + slice_.gamma.imag_part()
    eta_t = gd.eta_t()
    out = eta_t.wedge_basic(dim_u) * (-1.0)
    out = out + FiberedForm.from_basic(omega.wedge(domega), gd.convention)
    # (d eta_t/dt) ^ Im Upsilon
    if base == "ccy":
        deta = dc(slice_.f_dot)
        out = out + FiberedForm.from_basic(-deta.wedge(im_u), gd.convention)
    elif base == "broken":
        alpha = slice_.alpha if slice_.alpha is not None else BasicForm.zero(grid, 1)
        deta_basic = BasicForm.standard_kahler(grid).interior(grad) + alpha
        out = out + FiberedForm.from_basic(-deta_basic.wedge(im_u), gd.convention)
    return out


def coflow_residual_form(model, slice_, su3, A=0.0):
    """d psi/dt - Delta psi - modification as a fibered 5-form (the oracle)."""
    base, flow = _model_parts(model)
    gd = build_model_g2(model, su3, slice_)
    rhs = laplacian_psi(gd)
    if flow == "mlcf":
        rhs = rhs + modified_extra(gd, A)
    lhs = time_derivative_psi(model, slice_, su3, gd=gd)
    return lhs - rhs


def coflow_residual_direct(model, slice_, su3, A=0.0):
    """Independent oracle: max residual of d psi/dt = Delta psi + modification."""
    r = coflow_residual_form(model, slice_, su3, A)
    return r.max_abs()


# ---------------------------------------------------------------------------
# slice construction (for the construct-then-check acceptance path)
# ---------------------------------------------------------------------------

_TWO_BASIS = list(combinations(range(1, 7), 2))
_FOUR_BASIS = list(combinations(range(1, 7), 4))


def solve_beta_wedge(omega, rhs4, tol=1e-9):
    """Solve beta ^ omega = rhs pointwise (the Lefschetz map is invertible)."""
    grid = omega.grid
    M = np.zeros(grid.shape + (15, 15), dtype=complex)
    for col, ij in enumerate(_TWO_BASIS):
        col_form = BasicForm.constant(grid, 2, {ij: 1.0}).wedge(omega)
        for row, I in enumerate(_FOUR_BASIS):
            M[..., row, col] = col_form.field(I).data
    b = np.zeros(grid.shape + (15,), dtype=complex)
    for row, I in enumerate(_FOUR_BASIS):
        b[..., row] = rhs4.field(I).data
    sol = np.linalg.solve(M, b[..., None])[..., 0]
    out = {}
    for col, ij in enumerate(_TWO_BASIS):
        data = sol[..., col]
        if np.max(np.abs(data)) > 0:
            out[ij] = BasicField(grid, data)
    beta = BasicForm(grid, 2, out, _normalized=True)
    resid = form_max_diff(beta.wedge(omega), rhs4)
    if resid > tol * max(1.0, rhs4.max_abs()):
        raise ValueError(f"wedge solve failed (residual {resid:.2e})")
    return beta


def make_satisfying_slice(model, su3, A=0.0, f_dot=None):
    """Construct a slice satisfying the model's constraint equations.

    For the non-product families this targets the flat transverse case
    (constant |Y|); the product construction works for any su3.
    """
    base, flow = _model_parts(model)
    grid = su3.grid
    zero = DeformationSlice.zero(grid)
    y = norm = su3.norm()
    dlog = _dlog_form(norm)
    im_u = su3.im_upsilon()
    if f_dot is not None:
        zero.f_dot = f_dot

    if base == "product":
        Aeff = 0.0 if flow == "lcf" else A
        rhs_beta = dlog.wedge(su3.re_upsilon()) * ((1.0 / y) * -Aeff)
        beta = solve_beta_wedge(su3.omega, rhs_beta) if Aeff else BasicForm.zero(grid, 2)
        im_gamma = dlog.wedge(su3.omega) * (y * Aeff)
        gamma = im_gamma * 1j
        return DeformationSlice(zero.f, zero.f_dot, beta, gamma, BasicForm.zero(grid, 1))

    if not norm.is_constant(1e-12):
        raise ValueError("non-product slice construction targets the flat case")
    y0 = norm.mean().real
    omega = su3.omega

    if base == "ccy":
        dcfdot = dc(zero.f_dot)
        if flow == "lcf":
            rhs_beta = omega.wedge(omega) * (2.0 * y0**2) + dcfdot.wedge(im_u)
        else:
            rhs_beta = omega.wedge(omega) * (A * y0 - y0**2) + dcfdot.wedge(im_u)
        beta = solve_beta_wedge(omega, rhs_beta)
        return DeformationSlice(zero.f, zero.f_dot, beta, BasicForm.zero(grid, 3), BasicForm.zero(grid, 1))

    # broken, flat: alpha = 0, Im(gamma) = 0, omega' ^ beta = RED + EXTRA
    omega0 = BasicForm.standard_kahler(grid)
    lam = trace_field(omega0, su3.metric()).real_part()
    rhs_main = omega0.wedge(omega * lam - omega0) * (y0**2)
    if flow == "mlcf":
        rhs_main = rhs_main + omega0.wedge(omega) * (A * y0 - 3.0 * y0**2)
    beta = solve_beta_wedge(omega, rhs_main)
    return DeformationSlice(zero.f, zero.f_dot, beta, BasicForm.zero(grid, 3), BasicForm.zero(grid, 1))


# ---------------------------------------------------------------------------
# type II deformations
# ---------------------------------------------------------------------------

@dataclass
class TypeIIResult:
    eta_shift: BasicForm     # d^c h: the basic change of the contact form
    omega_prime: BasicForm   # dTheta + d d^c h
    positive: bool
    min_eigenvalue: float


def type_ii_deform(h, grid=None):
    """eta -> eta + d^c h; omega' = dTheta + d d^c h, basic class preserved.

    Positivity of omega' is checked per point and reported, not assumed.
    """
    grid = grid or h.grid
    shift = dc(h)
    omega_prime = BasicForm.standard_kahler(grid) + ddc(h)
    try:
        mf = metric_of_omega(omega_prime, require_positive=False)
        lam_min = mf.min_eigenvalue()
        positive = lam_min > 0
    except ValueError:
        positive, lam_min = False, float("nan")
    return TypeIIResult(shift, omega_prime, positive, lam_min)
