import time

import pytest
from hypothesis import given, settings, strategies as st

from arcforge.fields import GF, QQ, parse_field
from arcforge.groebner import groebner_basis, nilpotency_index
from arcforge.jets import (ArcNotOnScheme, BudgetExceeded, affine, arc_eval, brute_force_jets, hs_prolong, jet_derivative,
                           jet_ideal, jet_name, jet_space, make_arc, ord_ideal, ord_poly)
from arcforge.polynomials import PolyRing
from arcforge.series import INFINITE, AtLeast, Finite

R = PolyRing(QQ, ["x", "y"])


def test_jet_names():
    assert jet_name("x", 3) == "x3"
    assert jet_name("x1", 3) == "x1_3"
    js = jet_space(R, 2)
    assert js.ring.names == ("x0", "x1", "x2", "y0", "y1", "y2")


def test_prolong_square():
    assert [p.format() for p in hs_prolong(R.parse("x^2"), 2)] == ["x0^2", "2*x0*x1", "2*x0*x2 + x1^2"]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_frobenius_pattern(p):
    S = PolyRing(GF(p), ["x"])
    pro = hs_prolong(S.parse(f"x^{p}"), p * p)
    js = jet_space(S, p * p)
    for i, h in enumerate(pro):
        if i % p == 0:
            assert h == js.var("x", i // p) ** p
        else:
            assert h.is_zero()


polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-3, 3).filter(bool),
                        min_size=1, max_size=4)


@settings(max_examples=30)
@given(polys, st.integers(1, 3))
def test_derivation_generates_prolongations(t, i):
    f = R.from_dict(t)
    m = 4
    pro = hs_prolong(f, m)
    js = jet_space(R, m)
    # D^(i) f^(0) = f^(i) for the universal Hasse-Schmidt derivation
    assert jet_derivative(pro[0], i, js) == pro[i]


@settings(max_examples=30)
@given(polys, polys, st.lists(st.integers(-2, 2), min_size=1, max_size=4),
       st.lists(st.integers(-2, 2), min_size=1, max_size=4))
def test_ord_is_additive(a, b, xs, ys):
    f, g = R.from_dict(a), R.from_dict(b)
    alpha = make_arc(R, {"x": xs, "y": ys})
    assert ord_poly(f * g, alpha) == ord_poly(f, alpha) + ord_poly(g, alpha)


@settings(max_examples=30)
@given(polys, st.lists(st.integers(-2, 2), min_size=2, max_size=4), st.integers(0, 3))
def test_prolongation_matches_arc_substitution(t, xs, m):
    f = R.from_dict(t)
    alpha = make_arc(R, {"x": xs, "y": [1, 1]})
    point = alpha.jet_point(m)
    s = arc_eval(f, alpha)
    for i, h in enumerate(hs_prolong(f, m)):
        assert h.evaluate(point, QQ.one) == s[i]


def test_ord_ideal_conventions():
    alpha = make_arc(R, {"x": [0, 1], "y": [0, 0, 1]})
    assert ord_ideal([R.parse("x*y")], alpha) == Finite(3)
    assert ord_ideal([R.parse("x"), R.parse("y")], alpha) == Finite(1)
    assert ord_ideal([R.parse("1")], alpha) == Finite(0)
    with pytest.raises(ValueError):
        ord_ideal([], alpha)
    inexact = make_arc(R, {"x": [0, 0], "y": [0, 0]}, precision=1, exact=False)
    assert ord_poly(R.parse("x"), inexact) == AtLeast(2)
    assert ord_poly(R.parse("x - x"), alpha) == INFINITE


def test_arc_on_scheme_validation():
    X = affine(QQ, ["x", "y"], ["x*y"])
    make_arc(X.ring, {"x": [0, 1]}, scheme=X)
    with pytest.raises(ArcNotOnScheme):
        make_arc(X.ring, {"x": [0, 1], "y": [0, 1]}, scheme=X)


def test_parametric_arc_format():
    K = parse_field("QQ(a1,a2)")
    a = make_arc(PolyRing(K, ["x"]), {"x": [0, "a1", "a2"]}, field=K)
    assert a.format() == "x = [0, a1, a2]; precision = 2; exact = true"


def test_brute_force_matches_truncated_arcs():
    X = affine(GF(3), ["x", "y"], ["x*y"])
    pts = brute_force_jets(X, 1)
    assert len(pts) == 21
    assert pts == sorted(pts)
    with pytest.raises(BudgetExceeded):
        brute_force_jets(X, 6, budget=1000)


def test_node_jet_ideal_contains_nilpotent_square():
    X = affine(QQ, ["x", "y"], ["x*y"])
    I = jet_ideal(X, 1)
    js = jet_space(X.ring, 1)
    g = js.ring.parse("x0*y1")
    assert not groebner_basis(I).contains(g)
    assert nilpotency_index(g, I, 4) == 2


def test_prolong_runtime():
    f = R.parse("x^2")
    start = time.perf_counter()
    hs_prolong(f, 2)
    assert time.perf_counter() - start < 0.05
