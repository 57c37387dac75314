"""Exact graded algebra of invariant forms on a contact Calabi-Yau model.

Generators: the contact form eta, the transverse Kahler form omega, and
rho = Re(Upsilon), sigma = Im(Upsilon) with unit-norm Upsilon.  Relations
(all enforced on normalization):

    eta^eta = 0,   rho^omega = sigma^omega = 0,   rho^rho = sigma^sigma = 0,
    rho^sigma = (2/3) omega^3,   omega^4 = 0,
    total degree <= 7, basic degree <= 6.

Elements are graded sums of monomials eta^d omega^p rho^q sigma^r with
exact Laurent-polynomial coefficients in the formal parameters
(a, b, eps, A, Y, ...).  The differential implements the contact rule
d(eta) = omega or the product rule d(theta) = 0; the Hodge star is taken
with respect to the scaled metric a^2 eta^2 + b^2 g_D, whose volume form
is a b^6 eta ^ omega^3 / 6.

Everything is exact rational arithmetic; no floats enter this module.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import ScalarMixError, SymScalar, scalar_kind, sym

# Basis monomial key: (d, p, q, r) with d, q, r in {0,1} and 0 <= p <= 3.
_GEN_DEGREE = {"eta": 1, "omega": 2, "rho": 3, "sigma": 3}

CONTACT = "contact"
PRODUCT = "product"


def _key_degree(key):
    d, p, q, r = key
    return d + 2 * p + 3 * q + 3 * r


def _as_sym(x):
    if isinstance(x, SymScalar):
        return x
    if scalar_kind(x) == "float":
        raise ScalarMixError("the invariant-form algebra is exact; floats not allowed")
    return SymScalar.constant(x)


class AlgebraElement:
    """Exact element of the invariant-form algebra."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        cleaned = {}
        if terms:
            for key, coeff in terms.items():
                coeff = _as_sym(coeff)
                if coeff.is_zero:
                    continue
                prev = cleaned.get(key)
                val = coeff if prev is None else prev + coeff
                if val.is_zero:
                    cleaned.pop(key, None)
                else:
                    cleaned[key] = val
        self.terms = cleaned

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def scalar(cls, value):
        return cls({(0, 0, 0, 0): _as_sym(value)})

    @classmethod
    def monomial(cls, d=0, p=0, q=0, r=0, coeff=1):
        if d not in (0, 1) or q not in (0, 1) or r not in (0, 1) or not 0 <= p <= 3:
            raise ValueError(f"invalid monomial ({d},{p},{q},{r})")
        if (q or r) and p:
            return cls.zero()  # rho^omega = sigma^omega = 0
        if q and r:
            # rho ^ sigma = (2/3) omega^3
            return cls({(d, 3, 0, 0): _as_sym(coeff) * Fraction(2, 3)})
        return cls({(d, p, q, r): _as_sym(coeff)})

    # -- predicates ------------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    def degree(self):
        """Homogeneous degree, or None for mixed/zero elements."""
        degs = {_key_degree(k) for k in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def coefficient(self, d, p, q, r):
        return self.terms.get((d, p, q, r), SymScalar({}))

    # -- linear structure ---------------------------------------------------

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            prev = out.get(key)
            val = c if prev is None else prev + c
            if val.is_zero:
                out.pop(key, None)
            else:
                out[key] = val
        return AlgebraElement(out)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, s):
        s = _as_sym(s)
        return AlgebraElement({k: s * c for k, c in self.terms.items()})

    def __rmul__(self, s):
        if isinstance(s, AlgebraElement):
            return NotImplemented
        return self.scaled(s)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((k, hash(c)) for k, c in self.terms.items()))

    # -- product ---------------------------------------------------------

    def __mul__(self, other):
        """Graded-commutative wedge with the Def-3.1 relations applied."""
        if not isinstance(other, AlgebraElement):
            return self.scaled(other)
        out = AlgebraElement.zero()
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                term = _mul_monomials(k1, k2, c1 * c2)
                if term is not None:
                    out = out + term
        return out

    # -- calculus ----------------------------------------------------------

    def d(self, convention=CONTACT):
        """Exterior derivative: d(eta) = omega (contact) or 0 (product)."""
        if convention == PRODUCT:
            return AlgebraElement.zero()
        if convention != CONTACT:
            raise ValueError(f"unknown convention {convention!r}")
        out = AlgebraElement.zero()
        for (d, p, q, r), c in self.terms.items():
            if d == 0 or p + 1 > 3:
                continue  # omega, rho, sigma are closed; omega^4 = 0
            out = out + AlgebraElement.monomial(0, p + 1, q, r, c)
        return out

    def star(self, a, b):
        """Hodge star of the metric a^2 eta^2 + b^2 g_D (orthonormal coframe
        a eta, b x transverse frame), volume a b^6 eta ^ omega^3 / 6."""
        a = _as_sym(a) if not isinstance(a, SymScalar) else a
        b = _as_sym(b) if not isinstance(b, SymScalar) else b
        if not (a.is_monomial and b.is_monomial):
            raise ValueError("star parameters must be nonzero monomials")
        out = AlgebraElement.zero()
        for key, c in self.terms.items():
            image, factor = _STAR_TABLE[key]
            coeff = c * factor(a, b)
            out = out + AlgebraElement({image: coeff})
        return out

    def time_derivative(self, dot_map):
        """Coefficient-wise formal time derivative (generators are rigid)."""
        return AlgebraElement(
            {k: c.dt(dot_map) for k, c in self.terms.items() if not c.dt(dot_map).is_zero}
        )

    def substitute(self, mapping):
        return AlgebraElement({k: c.substitute(mapping) for k, c in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "0"
        names = []
        for (d, p, q, r), c in sorted(self.terms.items()):
            gens = []
            if d:
                gens.append("eta")
            if p:
                gens.append("omega" if p == 1 else f"omega^{p}")
            if q:
                gens.append("rho")
            if r:
                gens.append("sigma")
            mono = "^".join(gens) if gens else "1"
            names.append(f"({c}) {mono}")
        return " + ".join(names)


def _mul_monomials(k1, k2, coeff):
    d1, p1, q1, r1 = k1
    d2, p2, q2, r2 = k2
    if d1 + d2 > 1 or q1 + q2 > 1 or r1 + r2 > 1:
        return None  # eta^eta = rho^rho = sigma^sigma = 0
    # Koszul sign: order odd letters as written, sort to eta < rho < sigma.
    letters = []
    if d1:
        letters.append(0)
    if q1:
        letters.append(1)
    if r1:
        letters.append(2)
    if d2:
        letters.append(0)
    if q2:
        letters.append(1)
    if r2:
        letters.append(2)
    inversions = sum(
        1
        for i in range(len(letters))
        for j in range(i + 1, len(letters))
        if letters[i] > letters[j]
    )
    if inversions % 2:
        coeff = -coeff
    d, p, q, r = d1 + d2, p1 + p2, q1 + q2, r1 + r2
    if (q or r) and p:
        return None
    if q and r:
        p, q, r = p + 3, 0, 0
        coeff = coeff * Fraction(2, 3)
    if p > 3:
        return None
    return AlgebraElement({(d, p, q, r): coeff})


def _star_factor(ea, eb, const):
    const = Fraction(const)

    def factor(a, b):
        out = SymScalar.constant(const)
        if ea:
            out = out * a**ea
        if eb:
            out = out * b**eb
        return out

    return factor


# Star of each basis monomial for g = a^2 eta^2 + b^2 g_D:
#   *1 = (a b^6/6) eta omega^3,  *eta = (b^6/6a) omega^3,
#   *omega = (a b^2/2) eta omega^2,  *rho = -a eta sigma,  *sigma = a eta rho,
#   *(eta omega) = (b^2/2a) omega^2,  *omega^2 = (2a/b^2) eta omega,
#   *(eta rho) = sigma/a,  *(eta sigma) = -rho/a,
#   *(eta omega^2) = (2/(a b^2)) omega,  *omega^3 = (6a/b^6) eta,
#   *(eta omega^3) = 6/(a b^6).
_STAR_TABLE = {
    (0, 0, 0, 0): ((1, 3, 0, 0), _star_factor(1, 6, Fraction(1, 6))),
    (1, 0, 0, 0): ((0, 3, 0, 0), _star_factor(-1, 6, Fraction(1, 6))),
    (0, 1, 0, 0): ((1, 2, 0, 0), _star_factor(1, 2, Fraction(1, 2))),
    (0, 0, 1, 0): ((1, 0, 0, 1), _star_factor(1, 0, -1)),
    (0, 0, 0, 1): ((1, 0, 1, 0), _star_factor(1, 0, 1)),
    (1, 1, 0, 0): ((0, 2, 0, 0), _star_factor(-1, 2, Fraction(1, 2))),
    (0, 2, 0, 0): ((1, 1, 0, 0), _star_factor(1, -2, 2)),
    (1, 0, 1, 0): ((0, 0, 0, 1), _star_factor(-1, 0, 1)),
    (1, 0, 0, 1): ((0, 0, 1, 0), _star_factor(-1, 0, -1)),
    (1, 2, 0, 0): ((0, 1, 0, 0), _star_factor(-1, -2, 2)),
    (0, 3, 0, 0): ((1, 0, 0, 0), _star_factor(1, -6, 6)),
    (1, 3, 0, 0): ((0, 0, 0, 0), _star_factor(-1, -6, 6)),
}


# -- named generators --------------------------------------------------------

def eta():
    return AlgebraElement.monomial(d=1)


def omega(p=1):
    return AlgebraElement.monomial(p=p)


def rho():
    return AlgebraElement.monomial(q=1)


def sigma():
    return AlgebraElement.monomial(r=1)


def one():
    return AlgebraElement.scalar(1)


def ansatz_phi(a=None, b=None):
    """phi_t = b^3 rho + a b^2 eta ^ omega."""
    a = sym("a") if a is None else _as_sym(a)
    b = sym("b") if b is None else _as_sym(b)
    return rho().scaled(b**3) + (eta() * omega()).scaled(a * b**2)


def ansatz_psi(a=None, b=None):
    """psi_t = -a b^3 eta ^ sigma + (1/2) b^4 omega^2."""
    a = sym("a") if a is None else _as_sym(a)
    b = sym("b") if b is None else _as_sym(b)
    return (eta() * sigma()).scaled(-(a * b**3)) + omega(2).scaled(
        b**4 * Fraction(1, 2)
    )


# -- high-level operations ----------------------------------------------------

class NotCoclosedError(ValueError):
    pass


def laplacian_coclosed(phi, a, b, convention=CONTACT):
    """d * d phi, which is the Hodge Laplacian of psi = * phi when d psi = 0."""
    psi = phi.star(a, b)
    if not psi.d(convention).is_zero:
        raise NotCoclosedError("d(*phi) != 0; Laplacian shortcut needs coclosedness")
    return phi.d(convention).star(a, b).d(convention)


def scalar_torsion(phi, a, b, convention=CONTACT):
    """tau0 = (1/7) * (phi ^ d phi)."""
    top = phi * phi.d(convention)
    starred = top.star(a, b)
    return starred.coefficient(0, 0, 0, 0) * Fraction(1, 7)


def modified_term(phi, tau0, A=None, convention=CONTACT):
    """d((A - 7/2 tau0) phi): the coflow correction with constant A."""
    A = sym("A") if A is None else _as_sym(A)
    tau0 = _as_sym(tau0)
    factor = A - tau0 * Fraction(7, 2)
    return phi.scaled(factor).d(convention)


def verify_identity(lhs, rhs):
    """Exact comparison; returns (equal, residual element)."""
    residual = lhs - rhs
    return residual.is_zero, residual


def coflow_evolution_residuals(A=None, eps=None):
    """Exact residuals of the Ansatz coflow system.

    Writes the flow equation d psi_t / dt = Delta psi_t + d((A - 7/2 tau0) phi_t)
    with formal symbols adot, bdot adjoined, and returns:

    * ``omega2``: coefficient equation on omega^2, equal to
      (1/2) d(b^4)/dt - a (A b^2 - a),
    * ``eta_sigma``: coefficient equation on eta ^ sigma, equal to
      -d(a b^3)/dt,
    * ``full``: the full form-valued residual after substituting
      a = eps b^-3 and bdot = (eps/2) b^-9 (A b^5 - eps),

    the last of which must be identically zero.
    """
    a, b = sym("a"), sym("b")
    adot, bdot = sym("adot"), sym("bdot")
    A = sym("A") if A is None else _as_sym(A)
    eps = sym("eps") if eps is None else _as_sym(eps)

    phi = ansatz_phi(a, b)
    psi = phi.star(a, b)
    dpsi_dt = psi.time_derivative({"a": adot, "b": bdot})
    rhs = laplacian_coclosed(phi, a, b) + modified_term(phi, scalar_torsion(phi, a, b), A)
    residual = dpsi_dt - rhs

    omega2_eq = residual.coefficient(0, 2, 0, 0)
    eta_sigma_eq = residual.coefficient(1, 0, 0, 1)

    bdot_expr = eps * Fraction(1, 2) * sym("b", -9) * (A * sym("b", 5) - eps)
    subs = {"a": eps * sym("b", -3), "adot": SymScalar.constant(-3) * eps * sym("b", -4) * bdot_expr,
            "bdot": bdot_expr}
    full = residual.substitute(subs)
    return {"omega2": omega2_eq, "eta_sigma": eta_sigma_eq, "full": full}
