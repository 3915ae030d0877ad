from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arcforge import upoly
from arcforge.fields import (GF, QQ, FieldError, Mod, TowerField, ZeroDivisorSplit, field_with_parameters,
                             fresh_name, over_roots, parse_field)

PRIMES = [2, 3, 5, 7, 101]


@given(st.sampled_from(PRIMES), st.integers(), st.integers(), st.integers())
def test_mod_ring_axioms(p, a, b, c):
    x, y, z = Mod(a, p), Mod(b, p), Mod(c, p)
    assert (x + y) * z == x * z + y * z
    assert x - x == 0
    assert int(x * y) == (a * b) % p


@given(st.sampled_from(PRIMES), st.integers(min_value=1))
def test_mod_inverse(p, a):
    x = Mod(a, p)
    if a % p:
        assert x * x.inverse() == 1
    else:
        with pytest.raises(ZeroDivisionError):
            x.inverse()


def test_prime_field_basics():
    F = GF(5)
    assert F.order == 5
    assert sorted(int(e) for e in F.elements()) == [0, 1, 2, 3, 4]
    assert F.pth_root(F(3)) ** 5 == F(3)
    with pytest.raises(FieldError):
        GF(6)


def test_parse_field_variants():
    assert parse_field("QQ") == QQ
    assert parse_field("GF(7)") == GF(7)
    K = parse_field("QQ(a1, a2)")
    assert K.parameters == ("a1", "a2")
    L = parse_field("GF(3)(u)")
    assert L.characteristic == 3
    with pytest.raises(FieldError):
        parse_field("RR")


def test_fraction_field_arithmetic_and_format():
    K = parse_field("QQ(a)")
    a = K.parameter("a")
    x = (a + 1) / (a - 1)
    assert x * (a - 1) == a + 1
    assert K.format(K(Fraction(3, 2))) == "3/2"
    assert not K.decide_zero(a)
    assert K.decide_zero(a - a)


def test_fraction_field_pth_root_and_frobenius():
    K = parse_field("GF(3)(u)")
    u = K.parameter("u")
    assert K.pth_root(u**3 + 1) == u + 1
    assert K.pth_root(u) is None
    K2 = K.frobenius_extension()
    r = K2.pth_root(K2(u))
    assert r is not None and r**3 == K2(u)


def test_field_with_parameters():
    K = field_with_parameters(QQ, ["Y"])
    assert K.parameters == ("Y",)
    K2 = field_with_parameters(K, ["Z"])
    assert K2.parameters == ("Y", "Z")


def test_tower_inverse_and_split():
    T = TowerField(QQ, "z", [QQ(-1), QQ(0), QQ(1)])  # z^2 - 1 is not irreducible
    z = T.gen
    assert (z * z) == T.one
    with pytest.raises(ZeroDivisorSplit) as info:
        (z - 1).inverse()
    sp = info.value
    assert upoly.mul(sp.factor, sp.cofactor) == upoly.monic([QQ(-1), QQ(0), QQ(1)])


def test_tower_field_of_irreducible():
    T = TowerField(QQ, "i", [QQ(1), QQ(0), QQ(1)])
    i = T.gen
    assert i * i == -T.one
    assert (1 + i) * (1 + i).inverse() == T.one
    assert T.format(1 + i) in ("i + 1", "1 + i")


def test_over_roots_splits_reducible_modulus():
    def probe(K, r):
        # asks whether r = 1; forces a split on z^2 - 1
        return K.decide_zero(r - 1)

    res = over_roots(probe, QQ, [QQ(-1), QQ(0), QQ(1)], "z")
    assert sum(w for w, _, _ in res) == 2
    assert sorted(r for _, _, r in res) == [False, True]


def test_over_roots_linear():
    res = over_roots(lambda K, r: r, QQ, [QQ(-3), QQ(1)], "z")
    assert res == [(1, QQ, QQ(3))]


def test_finite_field_extension():
    F = upoly.finite_field(5, 2)
    assert F.order == 25
    elems = list(F.elements())
    assert len(set(elems)) == 25
    nz = [e for e in elems if e != F.zero]
    assert all(e ** 24 == F.one for e in nz)


def test_fresh_name():
    assert fresh_name("z", ["x"]) == "z"
    assert fresh_name("z", ["z", "z1"]) == "z2"
