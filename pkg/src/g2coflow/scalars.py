"""Scalar coefficient arithmetic.

Form coefficients come in three variants:

* exact rationals (``int`` / ``fractions.Fraction``),
* :class:`SymScalar`, an exact Laurent polynomial in named formal symbols
  with rational coefficients (carries the parameters a, b, eps, A, Y, ...),
* machine floats (complex allowed).

Exact and symbolic values combine freely, both being exact.  Combining a
float with an exact rational or a symbolic value raises
:class:`ScalarMixError`: the exact identity suites must never silently
degrade to floating point.  Plain ``int`` is kind-neutral and scales
anything.
"""

from __future__ import annotations

import numbers
from fractions import Fraction


class ScalarMixError(TypeError):
    """Raised when exact/symbolic and floating scalars are mixed."""


def scalar_kind(x):
    """Classify a scalar as 'neutral' (int), 'exact', 'sym' or 'float'."""
    if isinstance(x, SymScalar):
        return "sym"
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return "neutral"
    if isinstance(x, Fraction):
        return "exact"
    if isinstance(x, numbers.Number):
        return "float"
    raise TypeError(f"not a scalar: {x!r}")


def join_kinds(k1, k2):
    """Resulting kind of a binary operation; raises on exact/float mixes."""
    if k1 == "neutral":
        return k2
    if k2 == "neutral":
        return k1
    if k1 == k2:
        return k1
    pair = {k1, k2}
    if pair == {"exact", "sym"}:
        return "sym"
    raise ScalarMixError(f"cannot mix {k1} and {k2} scalars")


def is_zero_scalar(x):
    if isinstance(x, SymScalar):
        return x.is_zero
    return x == 0


def integer_nth_root(m, k):
    """Exact k-th root of a nonnegative integer, or None."""
    if m < 0:
        raise ValueError("negative radicand")
    if m in (0, 1):
        return m
    r = round(m ** (1.0 / k))
    for cand in range(max(1, r - 2), r + 3):
        if cand**k == m:
            return cand
    return None


def rational_nth_root(q, k):
    """Exact k-th root of a Fraction, or None. Odd k handles negatives."""
    q = Fraction(q)
    sign = 1
    if q < 0:
        if k % 2 == 0:
            return None
        sign, q = -1, -q
    num = integer_nth_root(q.numerator, k)
    den = integer_nth_root(q.denominator, k)
    if num is None or den is None:
        return None
    return sign * Fraction(num, den)


# A monomial key: sorted tuple of (symbol, exponent) with nonzero exponents.
_ONE = ()


def _mul_keys(k1, k2):
    exps = dict(k1)
    for name, e in k2:
        e2 = exps.get(name, 0) + e
        if e2:
            exps[name] = e2
        else:
            exps.pop(name)
    return tuple(sorted(exps.items()))


class SymScalar:
    """Exact Laurent polynomial over named symbols, Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        cleaned = {}
        if terms:
            for key, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff:
                    cleaned[key] = cleaned.get(key, Fraction(0)) + coeff
                    if not cleaned[key]:
                        del cleaned[key]
        self.terms = cleaned

    # -- constructors ---------------------------------------------------

    @classmethod
    def constant(cls, value):
        return cls({_ONE: Fraction(value)})

    @classmethod
    def symbol(cls, name, exp=1, coeff=1):
        if exp == 0:
            return cls.constant(coeff)
        return cls({((name, exp),): Fraction(coeff)})

    @classmethod
    def monomial(cls, coeff, powers):
        key = tuple(sorted((n, e) for n, e in powers.items() if e))
        return cls({key: Fraction(coeff)})

    # -- predicates ------------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_monomial(self):
        return len(self.terms) == 1

    @property
    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and _ONE in self.terms)

    def constant_value(self):
        if not self.terms:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError(f"not a constant: {self}")
        return self.terms[_ONE]

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, SymScalar):
            return other
        k = scalar_kind(other)
        if k == "float":
            raise ScalarMixError("cannot mix symbolic and float scalars")
        return SymScalar.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + c
        return SymScalar(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __neg__(self):
        return SymScalar({k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = _mul_keys(k1, k2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return SymScalar(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("integer powers only")
        if k < 0:
            return self.inverse() ** (-k)
        out = SymScalar.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def inverse(self):
        if not self.is_monomial:
            raise ValueError(f"can only invert monomials, got {self}")
        ((key, coeff),) = self.terms.items()
        inv_key = tuple((n, -e) for n, e in key)
        return SymScalar({tuple(sorted(inv_key)): Fraction(1) / coeff})

    def root(self, k):
        """Exact k-th root of a monomial."""
        if not self.is_monomial:
            raise ValueError(f"can only take roots of monomials, got {self}")
        ((key, coeff),) = self.terms.items()
        c = rational_nth_root(coeff, k)
        if c is None:
            raise ValueError(f"coefficient {coeff} has no exact {k}-th root")
        powers = {}
        for name, e in key:
            if e % k:
                raise ValueError(f"exponent of {name} not divisible by {k}")
            powers[name] = e // k
        return SymScalar.monomial(c, powers)

    # -- structural operations --------------------------------------------

    def substitute(self, mapping):
        """Replace symbols by SymScalar/Fraction/int values."""
        out = SymScalar({})
        for key, coeff in self.terms.items():
            term = SymScalar.constant(coeff)
            for name, e in key:
                if name in mapping:
                    val = mapping[name]
                    if not isinstance(val, SymScalar):
                        val = SymScalar.constant(val)
                    term = term * val**e
                else:
                    term = term * SymScalar.symbol(name, e)
            out = out + term
        return out

    def dt(self, dot_map):
        """Formal time derivative: d/dt of each symbol given by dot_map."""
        out = SymScalar({})
        for key, coeff in self.terms.items():
            for i, (name, e) in enumerate(key):
                if name not in dot_map:
                    continue
                rest = {n: ee for n, ee in key}
                rest[name] = e - 1
                dot = dot_map[name]
                if not isinstance(dot, SymScalar):
                    dot = SymScalar.constant(dot)
                out = out + SymScalar.monomial(coeff * e, rest) * dot
        return out

    def to_float(self, values=None):
        """Numeric value given float assignments for every symbol."""
        values = values or {}
        total = 0.0
        for key, coeff in self.terms.items():
            t = float(coeff)
            for name, e in key:
                t *= float(values[name]) ** e
            total += t
        return total

    # -- comparison / display ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, SymScalar):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == SymScalar.constant(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, coeff in sorted(self.terms.items()):
            factors = [] if coeff == 1 and key else [str(coeff)]
            for name, e in key:
                factors.append(name if e == 1 else f"{name}^{e}")
            parts.append("*".join(factors) if factors else str(coeff))
        return " + ".join(parts)


def sym(name, exp=1):
    """Shorthand for a single formal symbol."""
    return SymScalar.symbol(name, exp)


def sfrac(p, q=1):
    return Fraction(p, q)
