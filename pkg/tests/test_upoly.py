from fractions import Fraction

from hypothesis import given, strategies as st

from arcforge import upoly
from arcforge.fields import GF, QQ, parse_field

small = st.lists(st.integers(-5, 5), min_size=1, max_size=6)


def qq(cs):
    return upoly.trim([Fraction(c) for c in cs])


@given(small, small)
def test_divmod_identity(a, b):
    A, B = qq(a), qq(b)
    if not B:
        return
    q, r = upoly.divmod_(A, B)
    assert upoly.add(upoly.mul(q, B), r) == A
    assert upoly.degree(r) < upoly.degree(B)


@given(small, small)
def test_xgcd_bezout(a, b):
    A, B = qq(a), qq(b)
    if not A and not B:
        return
    g, s, t = upoly.xgcd(A, B)
    assert upoly.add(upoly.mul(s, A), upoly.mul(t, B)) == g
    assert not upoly.rem(A, g) and not upoly.rem(B, g)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3), st.integers(1, 3))
def test_radical_counts_distinct_roots_over_qq(roots, mult):
    p = [QQ.one]
    for r in roots:
        for _ in range(mult):
            p = upoly.mul(p, [QQ(-r), QQ.one])
    assert upoly.distinct_root_count(p, QQ) == len(set(roots))


def test_radical_char_p_inseparable():
    F = GF(3)
    p = [F(-1), F(0), F(0), F(1)]  # x^3 - 1 = (x - 1)^3
    rad, K = upoly.radical(p, F)
    assert upoly.degree(rad) == 1
    K = parse_field("GF(3)(u)")
    u = K.parameter("u")
    q = [-u, K.zero, K.zero, K.one]  # x^3 - u, purely inseparable
    assert upoly.distinct_root_count(q, K) == 1


def test_taylor_shift_and_hasse():
    a = [QQ(c) for c in (1, 2, 3)]
    shifted = upoly.taylor_shift(a, QQ(2))
    # coefficients of a(2 + y) are Hasse derivatives at 2
    for k, c in enumerate(shifted):
        assert c == upoly.evaluate(upoly.hasse_derivative(a, k), QQ(2))


def test_irreducibility_and_finite_field():
    F = GF(2)
    assert upoly.is_irreducible_mod_p([F(1), F(1), F(1)], F)
    assert not upoly.is_irreducible_mod_p([F(1), F(0), F(1)], F)
    m = upoly.first_irreducible(GF(5), 6)
    assert upoly.degree(m) == 6 and upoly.is_irreducible_mod_p(m, GF(5))
