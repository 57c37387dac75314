"""Transverse Kahler operations on the flat-torus model.

The complex structure is the constant standard one pairing x^(2i-1) with
x^(2i); the metric of a positive (1,1)-form omega is g = omega(., J .).
Implements d^c = (i/2)(dbar - d) (so that d d^c f = i ddbar f), metric
gradients, the norm of the holomorphic volume form

    |Upsilon|^2_omega = |u|^2 / det(g_pq),

the transverse Ricci form 2 i ddbar log|Upsilon|_omega, and the Hodge
star of basic forms with a pointwise metric.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..exterior import complement, merge_sign
from .forms import BASE_DIM, BasicForm, VectorField, lie_derivative  # noqa: F401 (lie_derivative re-exported)
from .grid import BasicField

# J e_(2i-1) = e_(2i), J e_(2i) = -e_(2i-1)
J_MATRIX = np.zeros((6, 6))
for _i in range(3):
    J_MATRIX[2 * _i + 1, 2 * _i] = 1.0
    J_MATRIX[2 * _i, 2 * _i + 1] = -1.0


class MetricField:
    """Pointwise 6x6 metric over a grid, with cached inverse and minors."""

    def __init__(self, grid, mat):
        self.grid = grid
        self.mat = np.asarray(mat, dtype=float)
        if self.mat.shape != grid.shape + (6, 6):
            raise ValueError("metric array has wrong shape")
        self._inv = None
        self._det = None
        self._minors = {}

    @classmethod
    def flat(cls, grid):
        eye = np.broadcast_to(np.eye(6), grid.shape + (6, 6)).copy()
        return cls(grid, eye)

    @property
    def inv(self):
        if self._inv is None:
            self._inv = np.linalg.inv(self.mat)
        return self._inv

    @property
    def det(self):
        if self._det is None:
            self._det = np.linalg.det(self.mat)
        return self._det

    @property
    def sqrt_det(self):
        return np.sqrt(self.det)

    def minor(self, I, J):
        """det of the inverse-metric minor with rows I, cols J (1-based)."""
        key = (I, J)
        if key not in self._minors:
            rows = [i - 1 for i in I]
            cols = [j - 1 for j in J]
            sub = self.inv[..., rows, :][..., :, cols]
            self._minors[key] = np.linalg.det(sub) if len(I) else np.ones(self.grid.shape)
        return self._minors[key]

    def is_positive(self):
        for k in range(1, 7):
            if np.any(np.linalg.det(self.mat[..., :k, :k]) <= 0):
                return False
        return True

    def min_eigenvalue(self):
        return float(np.min(np.linalg.eigvalsh(self.mat)))

    def at(self, point):
        return self.mat[point] if self.grid.shape else self.mat


def omega_matrix(omega):
    """Dense antisymmetric array W[..., a, b] = omega(e_a, e_b)."""
    grid = omega.grid
    W = np.zeros(grid.shape + (6, 6), dtype=complex)
    for (i, j), f in omega.coeffs.items():
        W[..., i - 1, j - 1] = f.data
        W[..., j - 1, i - 1] = -f.data
    return W


def metric_of_omega(omega, tol=1e-9, require_positive=True):
    """Metric g(X, Y) = omega(X, J Y) of a positive (1,1)-form."""
    W = omega_matrix(omega)
    G = np.einsum("...ac,cb->...ab", W, J_MATRIX)
    asym = np.max(np.abs(G - np.swapaxes(G, -1, -2)))
    if asym > tol:
        raise ValueError(f"omega is not (1,1): metric asymmetry {asym:.2e}")
    if np.max(np.abs(G.imag)) > tol:
        raise ValueError("omega must be real")
    mf = MetricField(omega.grid, G.real)
    if require_positive and not mf.is_positive():
        raise ValueError("omega is not positive")
    return mf


def dc(f):
    """d^c f = (i/2)(dbar - d) f = (1/2) sum_i (f_x dy - f_y dx) per pair."""
    grid = f.grid
    out = {}
    for i in range(3):
        x_ax, y_ax = 2 * i + 1, 2 * i + 2
        fx = f.deriv(x_ax)
        fy = f.deriv(y_ax)
        if fy.max_abs() > 0:
            out[(x_ax,)] = out.get((x_ax,), BasicField.constant(grid, 0)) - fy * 0.5
        if fx.max_abs() > 0:
            out[(y_ax,)] = out.get((y_ax,), BasicField.constant(grid, 0)) + fx * 0.5
    return BasicForm(grid, 1, out, _normalized=True)


def ddc(f):
    """d d^c f = i ddbar f, a closed (1,1)-form."""
    return dc(f).d()


def gradient(f, mf):
    """Metric gradient: g(grad f, .) = df, solved pointwise."""
    grid = f.grid
    df = np.zeros(grid.shape + (6,), dtype=complex)
    for a in range(1, 7):
        df[..., a - 1] = f.deriv(a).data
    if np.max(np.abs(df.imag)) > 1e-9:
        raise ValueError("gradient needs a real field")
    v = np.linalg.solve(mf.mat, df.real[..., None])[..., 0]
    return VectorField(grid, [BasicField(grid, v[..., a]) for a in range(6)])


def hermitian_matrix(mf):
    """h_pq = G[2p-1,2q-1] + i G[2p-1,2q] from the real metric blocks."""
    G = mf.mat
    h = np.zeros(mf.grid.shape + (3, 3), dtype=complex)
    for p in range(3):
        for q in range(3):
            h[..., p, q] = G[..., 2 * p, 2 * q] + 1j * G[..., 2 * p, 2 * q + 1]
    return h


def hermitian_det(mf):
    """det(g_pq) via the Hermitian 3x3 blocks (per-point oracle)."""
    d = np.linalg.det(hermitian_matrix(mf))
    return BasicField(mf.grid, d)


def kahler_det(omega):
    """det(g_pq) as the coefficient ratio omega^3/3! over the flat volume."""
    w3 = omega.wedge(omega).wedge(omega)
    top = w3.field((1, 2, 3, 4, 5, 6))
    return top * (1.0 / 6.0)


def norm_upsilon(omega, u=1.0):
    """|Upsilon|_omega from |Upsilon|^2 = |u|^2 / det(g_pq); positive field."""
    det = kahler_det(omega)
    vals = det.data.real
    if np.any(vals <= 0) or det.max_imag() > 1e-9:
        raise ValueError("omega is not positive: det(g) <= 0 somewhere")
    return BasicField(omega.grid, np.sqrt(abs(u) ** 2 / vals))


def ricci_transverse(omega, u=1.0):
    """Transverse Ricci form Ric(omega, J) = 2 i ddbar log|Upsilon|_omega."""
    return ddc(norm_upsilon(omega, u).log()) * 2.0


def ricci_det_oracle(omega):
    """-i ddbar log det(g_pq): the determinant route to the Ricci form."""
    det = kahler_det(omega)
    return ddc(det.log()) * (-1.0)


# ---------------------------------------------------------------------------
# pointwise Hodge star of basic forms
# ---------------------------------------------------------------------------

def basic_star(form, mf):
    """Hodge star on the 6-torus with a pointwise metric, standard orientation."""
    k = form.degree
    if k > BASE_DIM:
        return BasicForm.zero(form.grid, 0)
    grid = form.grid
    sd = mf.sqrt_det
    out = {}
    subsets = list(combinations(range(1, 7), k))
    for J, field in form.coeffs.items():
        for I in subsets:
            m = mf.minor(J, I)
            if not np.any(m):
                continue
            Ic = complement(I, 6)
            sign = merge_sign(I, Ic)
            term = BasicField(grid, field.data * m * sd * sign)
            out[Ic] = out[Ic] + term if Ic in out else term
    return BasicForm(grid, 6 - k, out, _normalized=True).prune(0.0)


# ---------------------------------------------------------------------------
# type projections for the fixed J
# ---------------------------------------------------------------------------

def project_11(beta):
    """(1,1)-part of a 2-form: (B + J^T B J)/2."""
    B = omega_matrix(beta)
    BJ = np.einsum("ca,...cd,db->...ab", J_MATRIX, B, J_MATRIX)
    P = 0.5 * (B + BJ)
    return _form_from_matrix(beta.grid, P)


def project_20_02(beta):
    """(2,0)+(0,2)-part of a 2-form: (B - J^T B J)/2."""
    B = omega_matrix(beta)
    BJ = np.einsum("ca,...cd,db->...ab", J_MATRIX, B, J_MATRIX)
    P = 0.5 * (B - BJ)
    return _form_from_matrix(beta.grid, P)


def _form_from_matrix(grid, P):
    out = {}
    for a in range(1, 7):
        for b in range(a + 1, 7):
            data = P[..., a - 1, b - 1]
            if np.max(np.abs(data)) > 0:
                out[(a, b)] = BasicField(grid, data)
    return BasicForm(grid, 2, out, _normalized=True)


def project_30_03(gamma):
    """(3,0)+(0,3)-part of a 3-form:
    (G - G(J,J,.) - G(J,.,J) - G(.,J,J))/4."""
    grid = gamma.grid
    G = np.zeros(grid.shape + (6, 6, 6), dtype=complex)
    for (i, j, k), f in gamma.coeffs.items():
        for (a, b, c), s in _antisym_perms(i, j, k):
            G[..., a - 1, b - 1, c - 1] = s * f.data
    JJ = J_MATRIX
    t1 = np.einsum("da,eb,...dec->...abc", JJ, JJ, G)
    t2 = np.einsum("da,ec,...dbe->...abc", JJ, JJ, G)
    t3 = np.einsum("db,ec,...ade->...abc", JJ, JJ, G)
    P = 0.25 * (G - t1 - t2 - t3)
    out = {}
    for idx in combinations(range(1, 7), 3):
        data = P[..., idx[0] - 1, idx[1] - 1, idx[2] - 1]
        if np.max(np.abs(data)) > 0:
            out[idx] = BasicField(grid, data)
    return BasicForm(grid, 3, out, _normalized=True)


def _antisym_perms(i, j, k):
    from itertools import permutations

    base = (i, j, k)
    for perm in permutations(range(3)):
        inv = sum(1 for a in range(3) for b in range(a + 1, 3) if perm[a] > perm[b])
        yield tuple(base[p] for p in perm), (-1) ** inv
