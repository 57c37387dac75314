"""Dimension-generic exterior algebra (n <= 7).

Sparse k-forms over strictly increasing multi-indices with pluggable
scalar coefficients (exact rationals, symbolic Laurent monomial sums, or
floats), plus vectors, symmetric metrics, wedge and interior products,
metric inner products, and the Hodge star.

Axis labels are 1-based: a multi-index is a strictly increasing tuple of
integers in 1..n.  Coefficients of a single form share one scalar kind;
normalization drops exact zeros and fixes index order with the sign of
the sorting permutation.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from itertools import combinations

import numpy as np

from .scalars import (
    ScalarMixError,
    SymScalar,
    is_zero_scalar,
    join_kinds,
    rational_nth_root,
    scalar_kind,
)


class DimensionMismatchError(ValueError):
    pass


class DegreeMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------------
# multi-index helpers
# ---------------------------------------------------------------------------

def sort_index(indices):
    """Sort a sequence of axis labels.

    Returns (sorted tuple, permutation sign), or None when a label repeats.
    """
    idx = list(indices)
    sign = 1
    # insertion sort; n <= 7 so quadratic cost is irrelevant
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and idx[j - 1] == idx[j]:
            return None
    return tuple(idx), sign


def merge_sign(I, J):
    """Sign of sorting the concatenation of two disjoint sorted tuples."""
    inversions = 0
    i = 0
    for j_val in J:
        while i < len(I) and I[i] < j_val:
            i += 1
        inversions += len(I) - i
    return -1 if inversions % 2 else 1


def complement(I, n):
    s = set(I)
    return tuple(i for i in range(1, n + 1) if i not in s)


# ---------------------------------------------------------------------------
# KForm
# ---------------------------------------------------------------------------

class KForm:
    """Exterior k-form with sparse multi-index coefficients.

    Treat instances as immutable; all operations return new forms.
    """

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim, degree, coeffs=None, _normalized=False):
        if not 0 <= degree <= dim:
            raise ValueError(f"degree {degree} out of range for dim {dim}")
        self.dim = dim
        self.degree = degree
        if coeffs is None:
            self.coeffs = {}
        elif _normalized:
            self.coeffs = coeffs
        else:
            out = {}
            for raw, c in coeffs.items():
                if is_zero_scalar(c):
                    continue
                res = sort_index(raw)
                if res is None:
                    continue
                idx, sign = res
                if len(idx) != degree:
                    raise ValueError(f"index {raw} has wrong length for degree {degree}")
                if idx and (idx[0] < 1 or idx[-1] > dim):
                    raise ValueError(f"index {raw} outside 1..{dim}")
                val = out.get(idx)
                val = sign * c if val is None else val + sign * c
                if is_zero_scalar(val):
                    out.pop(idx, None)
                else:
                    out[idx] = val
            self.coeffs = out

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, dim, degree):
        return cls(dim, degree, {}, _normalized=True)

    @classmethod
    def basis(cls, dim, indices, coeff=1):
        return cls(dim, len(indices), {tuple(indices): coeff})

    @classmethod
    def scalar(cls, dim, value):
        return cls(dim, 0, {(): value})

    @classmethod
    def volume(cls, dim, coeff=1):
        return cls(dim, dim, {tuple(range(1, dim + 1)): coeff})

    # -- bookkeeping --------------------------------------------------------

    @property
    def kind(self):
        k = "neutral"
        for c in self.coeffs.values():
            k = join_kinds(k, scalar_kind(c))
        return k

    @property
    def is_zero(self):
        return not self.coeffs

    def get(self, indices):
        res = sort_index(indices)
        if res is None:
            return 0
        idx, sign = res
        c = self.coeffs.get(idx, 0)
        return -c if sign == -1 and not is_zero_scalar(c) else c

    def as_float(self):
        return KForm(
            self.dim,
            self.degree,
            {i: _to_float(c) for i, c in self.coeffs.items()},
            _normalized=True,
        )

    def map_coeffs(self, fn):
        out = {}
        for i, c in self.coeffs.items():
            v = fn(c)
            if not is_zero_scalar(v):
                out[i] = v
        return KForm(self.dim, self.degree, out, _normalized=True)

    # -- linear structure ----------------------------------------------------

    def __add__(self, other):
        self._check_same(other)
        join_kinds(self.kind, other.kind)
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            v = out.get(idx)
            v = c if v is None else v + c
            if is_zero_scalar(v):
                out.pop(idx, None)
            else:
                out[idx] = v
        return KForm(self.dim, self.degree, out, _normalized=True)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def scaled(self, s):
        join_kinds(self.kind, scalar_kind(s))
        return self.map_coeffs(lambda c: s * c)

    def __mul__(self, s):
        return self.scaled(s)

    __rmul__ = __mul__

    def divided_by_int(self, n):
        """Divide by an integer, staying in the form's scalar kind."""
        if self.kind == "float":
            return self.scaled(1.0 / n)
        return self.scaled(Fraction(1, n))

    def _check_same(self, other):
        if not isinstance(other, KForm):
            raise TypeError("expected a KForm")
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dim {other.dim} != {self.dim}")
        if other.degree != self.degree:
            raise DegreeMismatchError(f"degree {other.degree} != {self.degree}")

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        if not self.coeffs:
            return f"0 (deg {self.degree}, dim {self.dim})"
        parts = [
            f"({c})dx{''.join(map(str, idx))}" if idx else f"({c})"
            for idx, c in sorted(self.coeffs.items())
        ]
        return " + ".join(parts)

    def max_abs(self):
        """Largest coefficient magnitude (float forms)."""
        if not self.coeffs:
            return 0.0
        return max(abs(_to_float(c)) for c in self.coeffs.values())


def _to_float(c):
    if isinstance(c, SymScalar):
        raise ScalarMixError("symbolic scalar has no float value without assignments")
    if isinstance(c, complex):
        return c
    return float(c)


def max_coeff_diff(a, b):
    """Max absolute coefficient difference of two numeric forms."""
    a._check_same(b)
    keys = set(a.coeffs) | set(b.coeffs)
    out = 0.0
    for k in keys:
        out = max(out, abs(_to_float(a.coeffs.get(k, 0)) - _to_float(b.coeffs.get(k, 0))))
    return out


# ---------------------------------------------------------------------------
# Vector
# ---------------------------------------------------------------------------

class Vector:
    __slots__ = ("dim", "components")

    def __init__(self, components):
        self.components = tuple(components)
        self.dim = len(self.components)

    @classmethod
    def basis(cls, dim, axis):
        return cls([1 if i == axis else 0 for i in range(1, dim + 1)])

    def __getitem__(self, axis):
        return self.components[axis - 1]

    def __repr__(self):
        return f"Vector{self.components}"


# ---------------------------------------------------------------------------
# Metric
# ---------------------------------------------------------------------------

class Metric:
    """Symmetric n x n scalar matrix with a fixed orientation sign."""

    def __init__(self, entries, orientation=1):
        rows = tuple(tuple(r) for r in entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("metric must be square")
        for i in range(n):
            for j in range(i):
                if not _scalar_eq(rows[i][j], rows[j][i]):
                    raise ValueError("metric must be symmetric")
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.dim = n
        self.entries = rows
        self.orientation = orientation

    @classmethod
    def identity(cls, n, kind="exact"):
        one = 1.0 if kind == "float" else Fraction(1)
        zero = 0.0 if kind == "float" else Fraction(0)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values, orientation=1):
        values = list(values)
        n = len(values)
        zero = SymScalar({}) if any(isinstance(v, SymScalar) for v in values) else 0
        return cls(
            [[values[i] if i == j else zero for j in range(n)] for i in range(n)],
            orientation,
        )

    @cached_property
    def kind(self):
        k = "neutral"
        for row in self.entries:
            for c in row:
                k = join_kinds(k, scalar_kind(c))
        return k

    @cached_property
    def is_diagonal(self):
        return all(
            is_zero_scalar(self.entries[i][j])
            for i in range(self.dim)
            for j in range(self.dim)
            if i != j
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i - 1][j - 1]

    @cached_property
    def _numpy(self):
        return np.array([[_to_float(c) for c in row] for row in self.entries])

    @cached_property
    def det(self):
        if self.kind in ("float",):
            return float(np.linalg.det(self._numpy))
        if self.is_diagonal:
            out = self.entries[0][0]
            for i in range(1, self.dim):
                out = out * self.entries[i][i]
            return out
        return _bareiss_det([list(r) for r in self.entries])

    @cached_property
    def sqrt_det(self):
        d = self.det
        if isinstance(d, SymScalar):
            return d.root(2)
        if self.kind == "float":
            if d <= 0:
                raise ValueError("metric is not positive definite")
            return math.sqrt(d)
        r = rational_nth_root(Fraction(d), 2)
        if r is None:
            raise ValueError(
                f"det {d} has no exact square root; convert the metric to float"
            )
        return r

    @cached_property
    def inverse_entries(self):
        if self.is_diagonal:
            inv = []
            for i in range(self.dim):
                e = self.entries[i][i]
                if isinstance(e, SymScalar):
                    inv.append(e.inverse())
                elif self.kind == "float":
                    inv.append(1.0 / e)
                else:
                    inv.append(Fraction(1) / Fraction(e))
            return tuple(
                tuple(inv[i] if i == j else 0 for j in range(self.dim))
                for i in range(self.dim)
            )
        if self.kind == "float":
            try:
                inv = np.linalg.inv(self._numpy)
            except np.linalg.LinAlgError as exc:
                raise ValueError("metric is not invertible") from exc
            return tuple(tuple(float(x) for x in row) for row in inv)
        if self.kind == "sym":
            raise ValueError("symbolic metrics must be diagonal")
        return _fraction_inverse(self.entries)

    def inv(self, i, j):
        return self.inverse_entries[i - 1][j - 1]

    def is_positive_definite(self):
        """Leading principal minors test (numeric metrics only)."""
        m = self._numpy
        for k in range(1, self.dim + 1):
            if np.linalg.det(m[:k, :k]) <= 0:
                return False
        return True

    def volume_form(self):
        vol = KForm.volume(self.dim, self.sqrt_det)
        return vol if self.orientation == 1 else -vol


def _scalar_eq(x, y):
    if isinstance(x, SymScalar) or isinstance(y, SymScalar):
        sx = x if isinstance(x, SymScalar) else SymScalar.constant(x)
        return sx == y
    return x == y


def _bareiss_det(m):
    """Fraction-free determinant for exact entries."""
    n = len(m)
    m = [[Fraction(x) for x in row] for row in m]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _fraction_inverse(entries):
    n = len(entries)
    a = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(entries)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("metric is singular")
        a[col], a[pivot] = a[pivot], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


# ---------------------------------------------------------------------------
# Gram minors
# ---------------------------------------------------------------------------

def _small_det(g_at, rows, cols):
    k = len(rows)
    if k == 0:
        return 1
    if k == 1:
        return g_at(rows[0], cols[0])
    if k == 2:
        return g_at(rows[0], cols[0]) * g_at(rows[1], cols[1]) - g_at(
            rows[0], cols[1]
        ) * g_at(rows[1], cols[0])
    if k == 3:
        a, b, c = (g_at(rows[0], j) for j in cols)
        d, e, f = (g_at(rows[1], j) for j in cols)
        p, q, r = (g_at(rows[2], j) for j in cols)
        return a * (e * r - f * q) - b * (d * r - f * p) + c * (d * q - e * p)
    # Laplace expansion along the first row; k <= 4 in practice
    total = None
    for idx, col in enumerate(cols):
        sub = _small_det(g_at, rows[1:], cols[:idx] + cols[idx + 1 :])
        term = g_at(rows[0], col) * sub
        if idx % 2:
            term = -term
        total = term if total is None else total + term
    return total


def gram_minor_inverse(g, I, J):
    """det of the (I, J) minor of the inverse metric.

    Uses Jacobi's complementary-minor identity when that is cheaper:
    det(g^{-1}[I,J]) = (-1)^{sum I + sum J} det(g[J^c, I^c]) / det(g).
    """
    k = len(I)
    n = g.dim
    if g.is_diagonal:
        if I != J:
            return 0
        out = 1
        for i in I:
            out = out * g.inv(i, i)
        return out
    if k <= n - k:
        return _small_det(g.inv, I, J)
    Ic = complement(I, n)
    Jc = complement(J, n)
    sign = -1 if (sum(I) + sum(J)) % 2 else 1
    sub = _small_det(lambda i, j: g[i, j], Jc, Ic)
    d = g.det
    if isinstance(sub, SymScalar) or isinstance(d, SymScalar):
        raise ValueError("symbolic metrics must be diagonal")
    if g.kind == "float":
        return sign * sub / d
    return sign * Fraction(sub) / Fraction(d)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def wedge(a, b):
    """Exterior product a ^ b."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dim {a.dim} != {b.dim}")
    join_kinds(a.kind, b.kind)
    deg = a.degree + b.degree
    if deg > a.dim:
        return KForm.zero(a.dim, a.dim)  # zero; degree capped at n
    out = {}
    for I, ca in a.coeffs.items():
        si = set(I)
        for J, cb in b.coeffs.items():
            if si & set(J):
                continue
            res = sort_index(I + J)
            idx, sign = res
            c = ca * cb
            v = out.get(idx)
            v = sign * c if v is None else v + sign * c
            if is_zero_scalar(v):
                out.pop(idx, None)
            else:
                out[idx] = v
    return KForm(a.dim, deg, out, _normalized=True)


def interior(X, a):
    """Interior product X ⌟ a (degree-lowering antiderivation)."""
    if X.dim != a.dim:
        raise DimensionMismatchError(f"dim {X.dim} != {a.dim}")
    if a.degree == 0:
        raise DegreeMismatchError("interior product needs degree >= 1")
    out = {}
    for I, c in a.coeffs.items():
        for pos, axis in enumerate(I):
            x = X[axis]
            if is_zero_scalar(x):
                continue
            idx = I[:pos] + I[pos + 1 :]
            sign = -1 if pos % 2 else 1
            v = out.get(idx)
            term = sign * (x * c)
            v = term if v is None else v + term
            if is_zero_scalar(v):
                out.pop(idx, None)
            else:
                out[idx] = v
    return KForm(a.dim, a.degree - 1, out, _normalized=True)


def inner(a, b, g):
    """Metric inner product of two same-degree forms."""
    a._check_same(b)
    if g.dim != a.dim:
        raise DimensionMismatchError("metric dimension mismatch")
    if a.degree == 0:
        ca = a.coeffs.get((), 0)
        cb = b.coeffs.get((), 0)
        return ca * cb
    total = None
    for I, ca in a.coeffs.items():
        for J, cb in b.coeffs.items():
            m = gram_minor_inverse(g, I, J)
            if is_zero_scalar(m):
                continue
            term = ca * cb * m
            total = term if total is None else total + term
    if total is None:
        return SymScalar({}) if join_kinds(a.kind, b.kind) == "sym" else 0
    return total


def norm_sq(a, g):
    return inner(a, a, g)


def hodge_star(a, g):
    """Hodge star with respect to metric g and its orientation.

    Satisfies a ^ *b = <a,b> vol_g and ** = (-1)^{k(n-k)} for Riemannian
    signature.  Symbolic coefficients require a diagonal metric whose
    entries are single monomials with exact square roots.
    """
    n = a.dim
    if g.dim != n:
        raise DimensionMismatchError("metric dimension mismatch")
    k = a.degree
    if g.kind == "sym" or a.kind == "sym":
        return _hodge_star_symbolic(a, g)
    sd = g.sqrt_det
    orient = g.orientation
    out = {}
    all_k = list(combinations(range(1, n + 1), k)) if not g.is_diagonal else None
    for Iin, c in a.coeffs.items():
        candidates = (Iin,) if g.is_diagonal else all_k
        for I in candidates:
            m = gram_minor_inverse(g, Iin, I)
            if is_zero_scalar(m):
                continue
            Ic = complement(I, n)
            sign = merge_sign(I, Ic) * orient
            term = sign * (c * m * sd)
            v = out.get(Ic)
            v = term if v is None else v + term
            if is_zero_scalar(v):
                out.pop(Ic, None)
            else:
                out[Ic] = v
    return KForm(n, n - k, out, _normalized=True)


def _hodge_star_symbolic(a, g):
    if not g.is_diagonal:
        raise ValueError("symbolic Hodge star needs a diagonal metric")
    n = a.dim
    h = []
    for i in range(1, n + 1):
        e = g[i, i]
        if not isinstance(e, SymScalar):
            e = SymScalar.constant(e)
        h.append(e.root(2))
    out = {}
    for I, c in a.coeffs.items():
        Ic = complement(I, n)
        coeff = SymScalar.constant(1)
        for j in Ic:
            coeff = coeff * h[j - 1]
        for i in I:
            coeff = coeff * h[i - 1].inverse()
        sign = merge_sign(I, Ic) * g.orientation
        term = sign * (coeff * c)
        v = out.get(Ic)
        v = term if v is None else v + term
        if is_zero_scalar(v):
            out.pop(Ic, None)
        else:
            out[Ic] = v
    return KForm(n, n - a.degree, out, _normalized=True)


def sharp(alpha, g):
    """Raise the index of a 1-form."""
    if alpha.degree != 1:
        raise DegreeMismatchError("sharp needs a 1-form")
    comps = []
    for i in range(1, g.dim + 1):
        total = None
        for (j,), c in alpha.coeffs.items():
            m = g.inv(i, j)
            if is_zero_scalar(m):
                continue
            term = c * m
            total = term if total is None else total + term
        comps.append(0 if total is None else total)
    return Vector(comps)


def flat(X, g):
    """Lower the index of a vector."""
    out = {}
    for i in range(1, g.dim + 1):
        total = None
        for j in range(1, g.dim + 1):
            xj = X[j]
            if is_zero_scalar(xj):
                continue
            e = g[i, j]
            if is_zero_scalar(e):
                continue
            term = xj * e
            total = term if total is None else total + term
        if total is not None and not is_zero_scalar(total):
            out[(i,)] = total
    return KForm(g.dim, 1, out, _normalized=True)
