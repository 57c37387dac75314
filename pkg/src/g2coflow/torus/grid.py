"""Uniform periodic grids on [0, 2pi)^6 and spectrally-differentiated fields.

A field is sampled over a small set of *active* axes (at most 3) and is
constant along the others; this keeps the memory of a 6-torus model at
desk scale while differentiation stays exact on every represented
Fourier mode.  Nonlinear products are evaluated through zero-padded
transforms so that represented low modes are never corrupted.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


class Grid:
    """Sampling grid over active axes (1-based labels in 1..6)."""

    def __init__(self, active_axes=(1, 3), n=16):
        axes = tuple(sorted(set(int(a) for a in active_axes)))
        if any(a < 1 or a > 6 for a in axes):
            raise ValueError("active axes must lie in 1..6")
        if len(axes) > 3:
            raise ValueError("at most 3 active axes are supported")
        if n < 4 or n % 2:
            raise ValueError("grid size must be even and >= 4")
        self.active_axes = axes
        self.n = n
        self.shape = (n,) * len(axes) if axes else ()

    @property
    def size(self):
        return int(np.prod(self.shape)) if self.shape else 1

    def axis_position(self, axis):
        """Array dimension of a 1..6 axis, or None when inactive."""
        try:
            return self.active_axes.index(axis)
        except ValueError:
            return None

    def coordinate(self, axis):
        """Coordinate values of an axis, broadcast to the grid shape."""
        pos = self.axis_position(axis)
        if pos is None:
            return np.zeros(self.shape)
        x = np.arange(self.n) * (TWO_PI / self.n)
        shape = [1] * len(self.shape)
        shape[pos] = self.n
        return np.broadcast_to(x.reshape(shape), self.shape).copy()

    def wavenumbers(self, pos):
        return np.fft.fftfreq(self.n, d=1.0 / self.n)

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.active_axes == other.active_axes
            and self.n == other.n
        )

    def __hash__(self):
        return hash((self.active_axes, self.n))

    def __repr__(self):
        return f"Grid(axes={self.active_axes}, n={self.n})"


def _pad_spectrum(c, factor=2):
    if c.ndim == 0:
        return c
    n = c.shape[0]
    m = factor * n
    cs = np.fft.fftshift(c)
    out = np.zeros((m,) * c.ndim, dtype=complex)
    lo = (m - n) // 2
    out[tuple(slice(lo, lo + n) for _ in range(c.ndim))] = cs
    return np.fft.ifftshift(out)

def _crop_spectrum(c, n):
    if c.ndim == 0:
        return c
    m = c.shape[0]
    cs = np.fft.fftshift(c)
    lo = (m - n) // 2
    out = np.fft.ifftshift(cs[tuple(slice(lo, lo + n) for _ in range(c.ndim))]).copy()
    # zero the unpaired Nyquist planes so real fields stay real
    for axis in range(out.ndim):
        sl = [slice(None)] * out.ndim
        sl[axis] = n // 2
        out[tuple(sl)] = 0.0
    return out


class BasicField:
    """Scalar field on a Grid, stored as complex point values."""

    __slots__ = ("grid", "data")

    def __init__(self, grid, data):
        self.grid = grid
        arr = np.asarray(data, dtype=complex)
        if arr.shape != grid.shape:
            arr = np.broadcast_to(arr, grid.shape).copy()
        self.data = arr

    # -- constructors --------------------------------------------------

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.shape, complex(value)))

    @classmethod
    def from_function(cls, grid, fn):
        """Sample fn(x1, ..., x6) with coordinate arrays."""
        coords = [grid.coordinate(a) for a in range(1, 7)]
        return cls(grid, fn(*coords))

    @classmethod
    def from_modes(cls, grid, modes):
        """Build from {(k1..k6): coefficient} Fourier data (inactive k must be 0)."""
        total = np.zeros(grid.shape, dtype=complex)
        coords = {a: grid.coordinate(a) for a in grid.active_axes}
        for kvec, coeff in modes.items():
            if len(kvec) != 6:
                raise ValueError("mode vectors have six entries")
            phase = np.zeros(grid.shape)
            for a in range(1, 7):
                k = kvec[a - 1]
                if k == 0:
                    continue
                if a not in coords:
                    raise ValueError(f"mode on inactive axis {a}")
                phase = phase + k * coords[a]
            total = total + complex(coeff) * np.exp(1j * phase)
        return cls(grid, total)

    # -- arithmetic ------------------------------------------------------

    def _wrap(self, data):
        return BasicField(self.grid, data)

    def _coerce(self, other):
        if isinstance(other, BasicField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.data
        return complex(other)

    def __add__(self, other):
        return self._wrap(self.data + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.data - self._coerce(other))

    def __rsub__(self, other):
        return self._wrap(self._coerce(other) - self.data)

    def __neg__(self):
        return self._wrap(-self.data)

    def __mul__(self, other):
        if isinstance(other, BasicField):
            return self._wrap(self._dealiased_product(self.data, self._coerce(other)))
        return self._wrap(self.data * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.data / self._coerce(other))

    def __rtruediv__(self, other):
        return self._wrap(self._coerce(other) / self.data)

    def _dealiased_product(self, a, b):
        if a.ndim == 0:
            return a * b
        ca = _pad_spectrum(np.fft.fftn(a) / a.size)
        cb = _pad_spectrum(np.fft.fftn(b) / b.size)
        va = np.fft.ifftn(ca) * ca.size
        vb = np.fft.ifftn(cb) * cb.size
        cp = np.fft.fftn(va * vb) / va.size
        return np.fft.ifftn(_crop_spectrum(cp, a.shape[0])) * a.size

    # -- calculus -----------------------------------------------------------

    def deriv(self, axis):
        """Spectral d/dx_axis; zero along inactive axes.

        The unpaired Nyquist mode is dropped (its derivative is not
        representable on the grid), the standard collocation convention.
        """
        pos = self.grid.axis_position(axis)
        if pos is None:
            return BasicField.constant(self.grid, 0.0)
        c = np.fft.fft(self.data, axis=pos)
        k = self.grid.wavenumbers(pos).copy()
        k[self.grid.n // 2] = 0.0
        shape = [1] * self.data.ndim
        shape[pos] = self.grid.n
        c = c * (1j * k.reshape(shape))
        return self._wrap(np.fft.ifft(c, axis=pos))

    # -- pointwise maps --------------------------------------------------------

    def log(self):
        if np.any(self.data.real <= 0) or np.max(np.abs(self.data.imag)) > 1e-9:
            raise ValueError("log requires a positive real field")
        return self._wrap(np.log(self.data.real).astype(complex))

    def sqrt(self):
        if np.any(self.data.real < 0) or np.max(np.abs(self.data.imag)) > 1e-9:
            raise ValueError("sqrt requires a nonnegative real field")
        return self._wrap(np.sqrt(self.data.real).astype(complex))

    def conj(self):
        return self._wrap(np.conj(self.data))

    def real_part(self):
        return self._wrap(self.data.real.astype(complex))

    def imag_part(self):
        return self._wrap(self.data.imag.astype(complex))

    # -- reductions ----------------------------------------------------------

    def max_abs(self):
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def mean(self):
        return complex(np.mean(self.data))

    def max_imag(self):
        return float(np.max(np.abs(self.data.imag)))

    def at(self, point):
        """Value at a grid multi-index (tuple over active axes)."""
        return complex(self.data[point]) if self.grid.shape else complex(self.data)

    def is_constant(self, tol=1e-13):
        return float(np.max(np.abs(self.data - self.data.flat[0]))) <= tol

    def spectrum(self):
        """Normalized Fourier coefficients (same shape as data)."""
        if not self.grid.shape:
            return self.data.copy()
        return np.fft.fftn(self.data) / self.data.size

    def __repr__(self):
        return f"BasicField({self.grid}, max|.|={self.max_abs():.3g})"
