from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from arcforge.discrepancy import (DiscrepancyError, MonomialValuation, chart, chart_ord_E, edim_stable,
                                  embcodim_upper_bound, jacobian_det_order, krull_dimension, mather_log_discrepancy,
                                  mj_log_discrepancy, monomial_mather, random_weight_family, semicontinuity_check,
                                  weighted_blowup_chart)
from arcforge.fields import QQ, parse_field
from arcforge.jets import affine, make_arc, ord_poly
from arcforge.polynomials import PolyRing
from arcforge.series import INFINITE, Finite

CUSP = chart(QQ, ["u", "v"], ["x", "y"], {"x": "u^2*(v+1)", "y": "u^3*(v+1)^2"})
C = affine(QQ, ["x", "y"], ["x^3 - y^2"])
NORMAL = chart(QQ, ["u"], ["x", "y"], ["u^2", "u^3"])


def test_cusp_chart_values():
    T = CUSP.target
    assert chart_ord_E(CUSP, T.parse("x")) == Finite(2)
    assert chart_ord_E(CUSP, T.parse("y^2 - x^3")) == Finite(6)
    assert CUSP.pullback(T.parse("y^2 - x^3")) == CUSP.source.parse("u^6*(v+1)^3*v")
    assert jacobian_det_order(CUSP) == Finite(4)
    assert mather_log_discrepancy(CUSP) == 5 == monomial_mather((2, 3))


def test_identity_and_blowup_charts():
    ident = chart(QQ, ["u", "v"], ["x", "y"], ["u", "v"])
    assert chart_ord_E(ident, ident.target.parse("x")) == Finite(1)
    assert jacobian_det_order(ident) == Finite(0)
    blow = chart(QQ, ["u", "v"], ["x", "y"], ["u", "u*v"])
    assert jacobian_det_order(blow) == Finite(1)
    assert mather_log_discrepancy(blow) == 2


def test_curve_normalization():
    assert jacobian_det_order(NORMAL) == Finite(1)
    assert mather_log_discrepancy(NORMAL) == 2
    assert mj_log_discrepancy(NORMAL, C) == -1
    assert edim_stable(NORMAL, 0, C) == 2


def test_node_branch():
    N = affine(QQ, ["x", "y"], ["x*y"])
    b = chart(QQ, ["u"], ["x", "y"], ["u", "0"])
    assert mather_log_discrepancy(b) == 1
    assert mj_log_discrepancy(b, N) == 0


def test_chart_must_land_on_scheme():
    bad = chart(QQ, ["u"], ["x", "y"], ["u", "u"])
    with pytest.raises(DiscrepancyError):
        mj_log_discrepancy(bad, C)


def test_degenerate_chart_rejected():
    flat = chart(QQ, ["u", "v"], ["x", "y"], ["u", "u"])
    assert jacobian_det_order(flat) == INFINITE
    with pytest.raises(DiscrepancyError):
        mather_log_discrepancy(flat)


coprime = st.tuples(st.integers(1, 9), st.integers(1, 9)).filter(lambda ab: gcd(*ab) == 1)


@given(coprime)
def test_weighted_chart_agrees_with_weights(ab):
    ch = weighted_blowup_chart(QQ, ab)
    T = ch.target
    assert chart_ord_E(ch, T.parse("x")) == Finite(ab[0])
    assert chart_ord_E(ch, T.parse("y")) == Finite(ab[1])
    assert mather_log_discrepancy(ch) == monomial_mather(ab, ch) == sum(ab)


@given(coprime)
def test_smooth_case_mj_equals_mather(ab):
    ch = weighted_blowup_chart(QQ, ab)
    A2 = affine(QQ, ["x", "y"])
    assert mj_log_discrepancy(ch, A2) == mather_log_discrepancy(ch)


polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-3, 3).filter(bool),
                        min_size=1, max_size=4)


@settings(max_examples=40)
@given(polys, st.integers(1, 3))
def test_arc_realizes_q_times_ord_E(t, q):
    K = parse_field("QQ(a1,a2)")
    ch = chart(K, ["u", "v"], ["x", "y"], {"x": "u^2*(v+1)", "y": "u^3*(v+1)^2"})
    g = ch.target.from_dict(t)
    src = PolyRing(K, ["u", "v"])
    lift = make_arc(src, {"u": [0] * q + ["a1"], "v": ["a2"]}, field=K)
    alpha = lift.compose(ch.images, ch.target)
    assert ord_poly(g, alpha) == q * chart_ord_E(ch, g)


def test_monomial_examples():
    assert monomial_mather((1, 1, 1, 1)) == 4
    assert monomial_mather((1,)) == 1
    assert edim_stable(MonomialValuation((2, 3)), 3) == 8
    assert edim_stable(MonomialValuation((1, 1)), 0) == 2
    with pytest.raises(DiscrepancyError):
        MonomialValuation((0, 1))


def test_semicontinuity_examples():
    rep = semicontinuity_check([(1, 1), (2, 1), (2, 3)])
    assert rep.ok and rep.c_values == [1, 3, 2]
    assert semicontinuity_check([(1, 1)]).checks == []
    assert semicontinuity_check([(1, 2), (2, 1)]).checks == []


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_semicontinuity_random_families(seed, n):
    fam = random_weight_family(n, 20, seed)
    rep = semicontinuity_check(fam)
    assert rep.ok
    for c in rep.checks:
        if c["w"] != c["w_prime"]:
            assert c["mather"] > c["mather_prime"]


def test_embcodim_bounds():
    K = parse_field("QQ(a1,a2)")
    alpha = make_arc(C.ring, {"x": [0, 0, 1], "y": [0, 0, 0, 1]})
    assert embcodim_upper_bound(C, alpha) == Finite(3)
    A2 = affine(QQ, ["x", "y"])
    assert embcodim_upper_bound(A2, make_arc(A2.ring, {"x": [3, 1], "y": [0, 2]})) == Finite(0)
    N = affine(K, ["x", "y"], ["x*y"])
    branch = make_arc(N.ring, {"x": [0, "-a1", "-a2"]}, field=K)
    assert embcodim_upper_bound(N, branch) == Finite(1)
    # the branch y = 0 as the component
    assert embcodim_upper_bound(N, branch, component=["y"]) == Finite(0)


def test_krull_dimension():
    assert krull_dimension(affine(QQ, ["x", "y", "z"], ["x*y", "x*z"])) == 2
    assert krull_dimension(affine(QQ, ["x", "y"], ["x", "y"])) == 0
