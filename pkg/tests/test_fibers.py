import pytest
from hypothesis import given, settings, strategies as st

from arcforge.fibers import (CoverPresentation, FiberError, arc_fiber_count, fiber_bound_check, jet_fiber_oracle,
                             plane_cover, sepdeg_morphism, series_roots_count, univariate_cover)
from arcforge.fields import GF, QQ, parse_field
from arcforge.series import TruncatedSeries, series


def count(K, g, beta, plane=False, **kw):
    f = plane_cover(K, g) if plane else univariate_cover(K, g)
    return arc_fiber_count(f, series(K, beta), 8, **kw)


@pytest.mark.parametrize("beta,expected", [([0, 0, 1], 2), ([0, 1], 0), ([1, 1], 2), ([0], 1), ([0, 0, 0, 1], 0),
                                           ([0, 0, 0, 0, 3], 2)])
def test_square_cover(beta, expected):
    fc = count(QQ, "x^2", beta)
    assert (fc.count, fc.censored) == (expected, False)


def test_cubic_cover_branches():
    assert count(QQ, "x^3 - 3*x", [0, 1]).count == 3
    assert count(QQ, "x^3 - 3*x", [2, 1]).count == 1   # double root at -1 with slope 1/2
    assert count(QQ, "x^3 - 3*x", [2, 0, 1]).count == 3
    assert count(QQ, "x^3", [0, 0, 0, 2]).count == 3


def test_algebraic_roots_by_dynamic_evaluation():
    fc = count(QQ, "x^2", [2, 1])
    assert fc.count == 2
    fc = count(QQ, "x^4 - 4*x^2 + 4", [0, 0, 1])   # (x^2 - 2)^2 = t^2
    assert fc.count == 4 and not fc.censored


def test_inseparable_frobenius_cover():
    F = GF(3)
    assert count(F, "x^3", [0, 0, 0, 1]).count == 1
    assert count(F, "x^3", [0, 1]).count == 0
    assert count(F, "x^3", [1, 0, 0, 1, 0, 0, 2]).count == 1
    assert sepdeg_morphism(univariate_cover(F, "x^3")) == 1


def test_plane_cover():
    assert count(QQ, "x^2 - y^3", [0, 1], plane=True).count == 0
    assert count(QQ, "x^2 - y^3", [0, 0, 1], plane=True).count == 2
    assert sepdeg_morphism(plane_cover(QQ, "x^2 - y^3")) == 2
    with pytest.raises(FiberError):
        plane_cover(QQ, "x*y^2 - 1")


def test_censoring_by_precision():
    f = univariate_cover(QQ, "x^2")
    beta = TruncatedSeries(QQ, [0, 0, 0], 2, exact=False)
    fc = arc_fiber_count(f, beta)
    assert fc.censored
    beta = TruncatedSeries(QQ, [0, 0, 1], 2, exact=False)
    fc = arc_fiber_count(f, beta)
    assert (fc.count, fc.censored) == (2, False)


def test_zero_polynomial_rejected():
    with pytest.raises(FiberError):
        series_roots_count([series(QQ, [0]), series(QQ, [0])])


def test_separable_degree():
    assert sepdeg_morphism(univariate_cover(QQ, "x^3 - 3*x")) == 3
    K = parse_field("GF(2)")
    assert sepdeg_morphism(univariate_cover(K, "x^4 + x^2")) == 2


COVERS = [(QQ, "x^2", False), (QQ, "x^3", False), (QQ, "x^3 - 3*x", False), (QQ, "x^2 - y^3", True),
          (GF(3), "x^2", False), (GF(5), "x^3 - 3*x", False), (GF(3), "x^3", False), (GF(5), "x^5", False),
          (GF(5), "x^2 - y^3", True)]


@settings(max_examples=80)
@given(st.sampled_from(COVERS), st.lists(st.integers(-2, 2), min_size=1, max_size=9))
def test_count_bounded_by_separable_degree(cover, beta):
    K, g, plane = cover
    f = plane_cover(K, g) if plane else univariate_cover(K, g)
    rep = fiber_bound_check(f, series(K, beta), 8)
    assert rep.ok


ORACLE_COVERS = [(GF(5), "x^2", False, 2), (GF(3), "x^2", False, 2), (GF(3), "x^2 - y^3", True, 2),
                 (GF(5), "x^3", False, 2), (GF(3), "x^3", False, 1), (GF(2), "x^2", False, 1)]


@settings(max_examples=25)
@given(st.sampled_from(ORACLE_COVERS), st.lists(st.integers(0, 4), min_size=1, max_size=6))
def test_oracle_agrees_with_series_count(cover, beta):
    K, g, plane, k = cover
    f = plane_cover(K, g) if plane else univariate_cover(K, g)
    b = series(K, beta)
    fc = arc_fiber_count(f, b, 8)
    if fc.censored:
        return
    # distinct roots only have distinct m-jets once m reaches their separation order
    m = max(2, fc.separation)
    assert jet_fiber_oracle(f, b, m, extension_degree=k) == fc.count


def test_separation_order():
    assert count(GF(3), "x^2 - y^3", [0, 0, 0, 0, 1], plane=True).separation == 6
    assert count(QQ, "x^3 - 3*x", [2, 0, 1]).separation == 1
    assert count(QQ, "x^2", [1, 1]).separation == 0


def test_oracle_counts_jets_not_roots_below_separation():
    f = plane_cover(GF(3), "x^2 - y^3")
    b = series(GF(3), [0, 0, 0, 0, 1])
    assert jet_fiber_oracle(f, b, 3) == 1
    assert jet_fiber_oracle(f, b, 6) == 2


def test_oracle_cubic_over_f5_sextic_extension():
    f = univariate_cover(GF(5), "x^3 - 3*x")
    b = series(GF(5), [1, 1])
    assert jet_fiber_oracle(f, b, 2, extension_degree=6) == arc_fiber_count(f, b).count


def test_oracle_level_sees_late_obstructions():
    # x^2 = t^9 has no series root, but every low jet of 0 survives to t^8
    f = plane_cover(GF(3), "x^2 - y^3")
    b = series(GF(3), [0, 0, 0, 1])
    assert arc_fiber_count(f, b, 8).count == 0
    assert jet_fiber_oracle(f, b, 1, slack=4) == 1
    assert jet_fiber_oracle(f, b, 1) == 0
