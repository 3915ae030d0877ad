from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arcforge.fields import GF, QQ, parse_field
from arcforge.polynomials import ParseError, PolyRing, RingMismatch

R = PolyRing(QQ, ["x", "y", "z"])

terms = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
    st.fractions(min_value=-5, max_value=5, max_denominator=7),
    max_size=5,
)


@given(terms)
def test_format_parse_roundtrip(t):
    p = R.from_dict(t)
    assert R.parse(p.format()) == p


@given(terms, terms, terms)
def test_ring_axioms(a, b, c):
    A, B, C = R.from_dict(a), R.from_dict(b), R.from_dict(c)
    assert (A + B) * C == A * C + B * C
    assert A * B == B * A
    assert (A - A).is_zero()


def test_format_texture():
    p = R.parse("3/2*x^2*y - y^3 - 5/7*x + 1/3")
    assert p.format() == "3/2*x^2*y - y^3 - 5/7*x + 1/3"


def test_parse_error_reports_column():
    with pytest.raises(ParseError) as info:
        R.parse("x + * y")
    assert info.value.col >= 1
    with pytest.raises(ParseError):
        R.parse("x^y")
    with pytest.raises(ParseError):
        R.parse("w + 1")


def test_parameters_as_coefficients():
    K = parse_field("QQ(a)")
    S = PolyRing(K, ["x"])
    p = S.parse("a*x^2 + (a+1)*x")
    assert p.degree("x") == 2
    assert p.coeff((1,)) == K.parameter("a") + 1


def test_ring_mismatch():
    S = PolyRing(QQ, ["u"])
    with pytest.raises(RingMismatch):
        R.gen("x") + S.gen("u")


def test_calculus_and_substitution():
    p = R.parse("x^3*y + 2*y*z")
    assert p.diff("x") == R.parse("3*x^2*y")
    assert p.subs({"y": R.parse("x")}) == R.parse("x^4 + 2*x*z")
    assert p.coefficients_in("y")[1] == R.parse("x^3 + 2*z")
    F = PolyRing(GF(3), ["x"])
    assert F.parse("x^3").diff("x").is_zero()
