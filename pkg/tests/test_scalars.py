from fractions import Fraction

import pytest

from g2coflow.scalars import (
    ScalarMixError,
    SymScalar,
    integer_nth_root,
    join_kinds,
    rational_nth_root,
    scalar_kind,
    sym,
)


def test_kinds():
    assert scalar_kind(3) == "neutral"
    assert scalar_kind(Fraction(1, 2)) == "exact"
    assert scalar_kind(0.5) == "float"
    assert scalar_kind(sym("a")) == "sym"


def test_join_kinds():
    assert join_kinds("neutral", "float") == "float"
    assert join_kinds("exact", "sym") == "sym"
    with pytest.raises(ScalarMixError):
        join_kinds("float", "sym")
    with pytest.raises(ScalarMixError):
        join_kinds("exact", "float")


def test_sym_arithmetic():
    a, b = sym("a"), sym("b")
    expr = (a + b) * (a - b)
    assert expr == a**2 - b**2
    assert (a * b) * (a * b) == a**2 * b**2
    assert (2 * a - a - a).is_zero
    assert (a + 1) - 1 == a


def test_float_mixing_rejected():
    a = sym("a")
    with pytest.raises(ScalarMixError):
        a + 0.5
    with pytest.raises(ScalarMixError):
        a * 1.5


def test_laurent_inverse_and_root():
    m = SymScalar.monomial(Fraction(4, 9), {"a": 2, "b": -4})
    assert m.inverse() * m == SymScalar.constant(1)
    r = m.root(2)
    assert r * r == m
    assert r == SymScalar.monomial(Fraction(2, 3), {"a": 1, "b": -2})
    with pytest.raises(ValueError):
        (sym("a") + 1).inverse()
    with pytest.raises(ValueError):
        sym("a").root(2)  # exponent 1 not divisible


def test_substitute_and_dt():
    a, b = sym("a"), sym("b")
    eps = sym("eps")
    expr = a * b**3
    subbed = expr.substitute({"a": eps * sym("b", -3)})
    assert subbed == eps
    ddt = expr.dt({"a": sym("adot"), "b": sym("bdot")})
    assert ddt == sym("adot") * b**3 + 3 * a * b**2 * sym("bdot")


def test_negative_powers():
    b = sym("b")
    assert b**-9 == SymScalar.symbol("b", -9)
    assert b**-9 * b**9 == SymScalar.constant(1)


def test_roots():
    assert integer_nth_root(2**30, 10) == 8
    assert integer_nth_root(37, 3) is None
    assert rational_nth_root(Fraction(8, 27), 3) == Fraction(2, 3)
    assert rational_nth_root(Fraction(-8, 27), 3) == Fraction(-2, 3)
    assert rational_nth_root(Fraction(-4, 9), 2) is None
    assert rational_nth_root(Fraction(5, 7), 2) is None


def test_to_float():
    a = sym("a")
    assert (a**2 + 1).to_float({"a": 3.0}) == 10.0
