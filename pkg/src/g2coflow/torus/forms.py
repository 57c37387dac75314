"""Differential forms with field coefficients on the 6-torus base, and the
fibered split beta1 + theta ^ beta2 over the circle direction.

The fibered exterior derivative follows the split rule

    d(beta1 + theta ^ beta2) = d_B beta1 + dtheta ^ beta2 - theta ^ d_B beta2

with dtheta = omega0 (contact convention, theta = eta) or dtheta = 0
(product convention, theta = dr).
"""

from __future__ import annotations

from ..exterior import KForm, sort_index
from .grid import BasicField

CONTACT = "contact"
PRODUCT = "product"

BASE_DIM = 6
FIBER_AXIS = 7

#: Standard Kahler form dx12 + dx34 + dx56 (the curvature of the contact fiber).
OMEGA0_INDICES = ((1, 2), (3, 4), (5, 6))


class BasicForm:
    """k-form on the base with BasicField coefficients (sparse)."""

    __slots__ = ("grid", "degree", "coeffs")

    def __init__(self, grid, degree, coeffs=None, _normalized=False):
        # degree 7 is allowed as a formal zero (no length-7 index fits in 1..6),
        # so that fibered 7-forms have a basic slot
        if not 0 <= degree <= BASE_DIM + 1:
            raise ValueError(f"degree {degree} out of range")
        self.grid = grid
        self.degree = degree
        if coeffs is None:
            self.coeffs = {}
        elif _normalized:
            self.coeffs = coeffs
        else:
            out = {}
            for raw, field in coeffs.items():
                res = sort_index(raw)
                if res is None:
                    continue
                idx, sign = res
                if len(idx) != degree or (idx and idx[-1] > BASE_DIM):
                    raise ValueError(f"bad index {raw} for degree {degree}")
                term = field if sign == 1 else -field
                out[idx] = out[idx] + term if idx in out else term
            self.coeffs = out

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, grid, degree):
        return cls(grid, degree, {}, _normalized=True)

    @classmethod
    def constant(cls, grid, degree, index_values):
        return cls(
            grid,
            degree,
            {idx: BasicField.constant(grid, v) for idx, v in index_values.items()},
        )

    @classmethod
    def standard_kahler(cls, grid):
        return cls.constant(grid, 2, {idx: 1.0 for idx in OMEGA0_INDICES})

    @classmethod
    def holomorphic_volume(cls, grid, u=1.0):
        """u dz1 ^ dz2 ^ dz3 with constant u (complex coefficients)."""
        coeffs = {
            (1, 3, 5): 1, (1, 3, 6): 1j, (1, 4, 5): 1j, (1, 4, 6): -1,
            (2, 3, 5): 1j, (2, 3, 6): -1, (2, 4, 5): -1, (2, 4, 6): -1j,
        }
        return cls.constant(grid, 3, {k: u * v for k, v in coeffs.items()})

    # -- structure ----------------------------------------------------------

    def field(self, idx):
        return self.coeffs.get(tuple(idx)) or BasicField.constant(self.grid, 0.0)

    def prune(self, tol=0.0):
        out = {i: f for i, f in self.coeffs.items() if f.max_abs() > tol}
        return BasicForm(self.grid, self.degree, out, _normalized=True)

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for idx, f in other.coeffs.items():
            out[idx] = out[idx] + f if idx in out else f
        return BasicForm(self.grid, self.degree, out, _normalized=True)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.map_fields(lambda f: -f)

    def __mul__(self, s):
        """Scale by a number or a BasicField."""
        return self.map_fields(lambda f: f * s)

    __rmul__ = __mul__

    def map_fields(self, fn):
        return BasicForm(
            self.grid, self.degree, {i: fn(f) for i, f in self.coeffs.items()},
            _normalized=True,
        )

    def _check(self, other):
        if other.grid != self.grid or other.degree != self.degree:
            raise ValueError("form mismatch")

    def real_part(self):
        return self.map_fields(lambda f: f.real_part())

    def imag_part(self):
        return self.map_fields(lambda f: f.imag_part())

    def max_abs(self):
        return max((f.max_abs() for f in self.coeffs.values()), default=0.0)

    # -- calculus ---------------------------------------------------------

    def d(self):
        """Base exterior derivative, spectral in each active axis."""
        if self.degree >= BASE_DIM:
            return BasicForm.zero(self.grid, BASE_DIM + 1)
        out = {}
        for idx, f in self.coeffs.items():
            for axis in self.grid.active_axes:
                if axis in idx:
                    continue
                df = f.deriv(axis)
                if df.max_abs() == 0.0:
                    continue
                res = sort_index((axis,) + idx)
                new, sign = res
                term = df if sign == 1 else -df
                out[new] = out[new] + term if new in out else term
        return BasicForm(self.grid, self.degree + 1, out, _normalized=True)

    def wedge(self, other):
        if other.grid != self.grid:
            raise ValueError("grid mismatch")
        deg = self.degree + other.degree
        if deg > BASE_DIM:
            return BasicForm.zero(self.grid, min(deg, BASE_DIM + 1))
        out = {}
        for I, fa in self.coeffs.items():
            si = set(I)
            for J, fb in other.coeffs.items():
                if si & set(J):
                    continue
                idx, sign = sort_index(I + J)
                term = fa * fb
                if sign == -1:
                    term = -term
                out[idx] = out[idx] + term if idx in out else term
        return BasicForm(self.grid, deg, out, _normalized=True)

    def interior(self, vf):
        """vf ⌟ form for a transverse vector field."""
        if self.degree == 0:
            raise ValueError("degree 0 has no interior product")
        out = {}
        for I, f in self.coeffs.items():
            for pos, axis in enumerate(I):
                comp = vf.components[axis - 1]
                if comp is None:
                    continue
                idx = I[:pos] + I[pos + 1 :]
                term = f * comp
                if pos % 2:
                    term = -term
                out[idx] = out[idx] + term if idx in out else term
        return BasicForm(self.grid, self.degree - 1, out, _normalized=True)

    def at(self, point, dim=BASE_DIM):
        """Evaluate to a numeric KForm at a grid multi-index."""
        return KForm(
            dim,
            self.degree,
            {i: f.at(point) for i, f in self.coeffs.items()},
        )

    def __repr__(self):
        return f"BasicForm(deg {self.degree}, {len(self.coeffs)} comps, max {self.max_abs():.3g})"


def form_max_diff(a, b):
    keys = set(a.coeffs) | set(b.coeffs)
    out = 0.0
    for k in keys:
        out = max(out, (a.field(k) - b.field(k)).max_abs())
    return out


class VectorField:
    """Transverse vector field; components indexed by base axis."""

    __slots__ = ("grid", "components")

    def __init__(self, grid, components):
        comps = list(components)
        if len(comps) != BASE_DIM:
            raise ValueError("six components required")
        self.grid = grid
        self.components = [
            c if (c is None or isinstance(c, BasicField)) else BasicField.constant(grid, c)
            for c in comps
        ]

    def max_abs(self):
        return max((c.max_abs() for c in self.components if c is not None), default=0.0)


class FiberedForm:
    """beta1 + theta ^ beta2 with basic coefficient forms."""

    __slots__ = ("basic", "fiber", "convention")

    def __init__(self, basic, fiber, convention=CONTACT):
        if basic.degree == 0:
            if fiber is not None:
                raise ValueError("degree-0 forms have no fiber part")
        else:
            if fiber is None:
                fiber = BasicForm.zero(basic.grid, basic.degree - 1)
            elif basic.degree != fiber.degree + 1:
                raise ValueError("fiber part must have degree one less than basic part")
        self.basic = basic
        self.fiber = fiber
        self.convention = convention

    @classmethod
    def from_basic(cls, form, convention=CONTACT):
        return cls(form, None, convention)

    @classmethod
    def theta(cls, grid, convention=CONTACT):
        """The fiber 1-form itself (eta or dr)."""
        one = BasicForm.constant(grid, 0, {(): 1.0})
        return cls(BasicForm.zero(grid, 1), one, convention)

    @property
    def degree(self):
        return self.basic.degree

    @property
    def grid(self):
        return self.basic.grid

    def _check(self, other):
        if other.grid != self.grid or other.degree != self.degree:
            raise ValueError("fibered form mismatch")
        if other.convention != self.convention:
            raise ValueError("mixed fiber conventions")

    def __add__(self, other):
        self._check(other)
        fiber = None
        if self.fiber is not None or other.fiber is not None:
            fa = self.fiber or BasicForm.zero(self.grid, self.degree - 1)
            fb = other.fiber or BasicForm.zero(self.grid, self.degree - 1)
            fiber = fa + fb
        return FiberedForm(self.basic + other.basic, fiber, self.convention)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FiberedForm(
            -self.basic, -self.fiber if self.fiber is not None else None, self.convention
        )

    def __mul__(self, s):
        return FiberedForm(
            self.basic * s,
            self.fiber * s if self.fiber is not None else None,
            self.convention,
        )

    __rmul__ = __mul__

    def d(self):
        """Fibered exterior derivative with the convention's curvature."""
        if self.degree >= 7:
            return FiberedForm(
                BasicForm.zero(self.grid, 7), BasicForm.zero(self.grid, 6),
                self.convention,
            )
        basic = self.basic.d()
        fiber = BasicForm.zero(self.grid, self.degree)
        if self.fiber is not None:
            if self.convention == CONTACT:
                basic = basic + BasicForm.standard_kahler(self.grid).wedge(self.fiber)
            fiber = -self.fiber.d()
        return FiberedForm(basic, fiber if self.degree + 1 >= 1 else None, self.convention)

    def wedge_basic(self, other):
        """self ^ (basic form)."""
        deg = self.degree + other.degree
        if deg > 7:
            return FiberedForm(
                BasicForm.zero(self.grid, 7), BasicForm.zero(self.grid, 6),
                self.convention,
            )
        basic = self.basic.wedge(other)
        if deg == 0:
            return FiberedForm(basic, None, self.convention)
        fiber = (
            self.fiber.wedge(other)
            if self.fiber is not None
            else BasicForm.zero(self.grid, deg - 1)
        )
        return FiberedForm(basic, fiber, self.convention)

    def wedge(self, other):
        """Fibered wedge: (b1 + t a1) ^ (b2 + t a2); the t^t term drops."""
        if isinstance(other, BasicForm):
            return self.wedge_basic(other)
        deg = min(self.degree + other.degree, 7)
        basic = self.basic.wedge(other.basic)
        if deg == 0:
            return FiberedForm(basic, None, self.convention)
        fiber = BasicForm.zero(self.grid, deg - 1)
        if self.fiber is not None:
            fiber = fiber + self.fiber.wedge(other.basic)
        if other.fiber is not None:
            cross = self.basic.wedge(other.fiber)
            if self.degree % 2:
                cross = -cross
            fiber = fiber + cross
        return FiberedForm(basic, fiber, self.convention)

    def interior(self, vf):
        """Interior product with a transverse vector field.

        X ⌟ (b1 + theta ^ b2) = X ⌟ b1 - theta ^ (X ⌟ b2) since X ⌟ theta = 0.
        """
        if self.degree == 0:
            raise ValueError("degree 0 has no interior product")
        basic = self.basic.interior(vf)
        if self.degree - 1 == 0:
            return FiberedForm(basic, None, self.convention)
        if self.fiber.degree >= 1:
            fiber = -self.fiber.interior(vf)
        else:
            fiber = BasicForm.zero(self.grid, self.degree - 2)
        return FiberedForm(basic, fiber, self.convention)

    def reeb_contraction(self):
        """xi ⌟ F = the fiber part (eta(xi) = 1, xi ⌟ basic = 0)."""
        return self.fiber

    def max_abs(self):
        out = self.basic.max_abs()
        if self.fiber is not None:
            out = max(out, self.fiber.max_abs())
        return out

    def at(self, point):
        """Evaluate to a 7-dimensional KForm; theta becomes dx^7."""
        coeffs = {}
        for I, f in self.basic.coeffs.items():
            coeffs[I] = f.at(point)
        if self.fiber is not None:
            for I, f in self.fiber.coeffs.items():
                sign = -1 if len(I) % 2 else 1
                coeffs[I + (FIBER_AXIS,)] = sign * f.at(point)
        return KForm(7, self.degree, coeffs)

    def real_part(self):
        return FiberedForm(
            self.basic.real_part(),
            self.fiber.real_part() if self.fiber is not None else None,
            self.convention,
        )

    def __repr__(self):
        nf = len(self.fiber.coeffs) if self.fiber is not None else 0
        return f"FiberedForm(deg {self.degree}, basic {len(self.basic.coeffs)}, fiber {nf})"


def fibered_max_diff(a, b):
    out = form_max_diff(a.basic, b.basic)
    fa, fb = a.fiber, b.fiber
    if fa is None and fb is None:
        return out
    za = fa if fa is not None else BasicForm.zero(a.grid, a.degree - 1)
    zb = fb if fb is not None else BasicForm.zero(b.grid, b.degree - 1)
    return max(out, form_max_diff(za, zb))


def lie_derivative(vf, form):
    """Cartan formula L_X = d(X ⌟ .) + X ⌟ d(.) for basic or fibered forms."""
    if isinstance(form, BasicForm) and form.degree == 0:
        return form.d().interior(vf)
    return form.interior(vf).d() + form.d().interior(vf)
