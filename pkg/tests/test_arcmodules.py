import random

import pytest
from hypothesis import given, settings, strategies as st

from arcforge.arcmodules import (MorphismError, _Local, SeriesMatrix, cotangent_kernel, fitting_order, matrix_fitting_order,
                                 morphism, projection_search, ramification_classify, random_series_matrix,
                                 series_smith_form, torsion_dimension, differentials_pullback)
from arcforge.fields import GF, QQ, parse_field
from arcforge.jets import affine, make_arc
from arcforge.series import INFINITE, AtLeast, Finite, TruncatedSeries, series

K = parse_field("QQ(a1,a2)")


def double_cover():
    X = affine(K, ["x"])
    Y = affine(K, ["y"])
    return morphism(X, Y, ["x^2"])


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.sampled_from([QQ, GF(5)]))
def test_smith_route_equals_minors_route(seed, F):
    A = random_series_matrix(random.Random(seed), F)
    S = series_smith_form(A, transforms=False)
    # ord Fitt^r = length of the torsion part, r the free rank
    assert torsion_dimension(A) == matrix_fitting_order(A, S.free_rank)
    assert matrix_fitting_order(A, S.free_rank - 1).is_infinite or S.free_rank == 0


def _matmul(X, Y):
    out = []
    for row in X:
        new = []
        for j in range(len(Y[0])):
            acc = row[0] * Y[0][j]
            for k in range(1, len(Y)):
                acc = acc + row[k] * Y[k][j]
            new.append(acc)
        out.append(new)
    return out


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_smith_transforms(seed):
    A = random_series_matrix(random.Random(seed), QQ, max_size=3)
    S = series_smith_form(A)
    M = [[_Local.from_series(s) for s in row] for row in A.entries]
    D = _matmul(_matmul(S.left, M), S.right)
    for i in range(A.nrows):
        for j in range(A.ncols):
            if i != j:
                assert D[i][j].order().is_infinite
    for k, o in enumerate(S.invariant_orders):
        assert D[k][k].order() == o
    RI = _matmul(S.right, S.right_inverse)
    one, zero = _Local(QQ, [QQ.one]), _Local(QQ, [])
    for i in range(A.ncols):
        for j in range(A.ncols):
            assert (RI[i][j] - (one if i == j else zero)).order().is_infinite


def test_smith_censoring():
    F = QQ
    A = SeriesMatrix(F, [[TruncatedSeries(F, [0, 0, 0], 2, exact=False), TruncatedSeries(F, [0, 0, 0, 1], 3, exact=False)]])
    S = series_smith_form(A)
    assert S.censored
    assert S.invariant_orders == [AtLeast(3)]
    B = SeriesMatrix(F, [[TruncatedSeries(F, [0, 1, 0], 2, exact=False)]])
    assert series_smith_form(B).invariant_orders == [Finite(1)]


def test_cusp_differentials():
    X = affine(QQ, ["x", "y"], ["x^3 - y^2"])
    alpha = make_arc(X.ring, {"x": [0, 0, 1], "y": [0, 0, 0, 1]}, scheme=X)
    P = differentials_pullback(X, alpha)
    assert torsion_dimension(P) == Finite(3)
    assert fitting_order(X, 1, alpha) == Finite(3)
    res = projection_search(X, alpha, 1)
    assert res.order == Finite(3)
    assert res.matrix == [[1, 0]]


def test_double_cover_equality_case_exact_and_truncated():
    f = double_cover()
    for exact in (True, False):
        alpha = make_arc(f.source.ring, {"x": [0, "a1", "a2"]}, precision=2 if exact else 6, exact=exact, field=K)
        rep = cotangent_kernel(f, alpha)
        assert rep.kernel_dim == Finite(1)
        assert rep.bound == Finite(1)
        assert rep.x_smooth_at_origin and rep.etale_at_generic
        assert rep.equality_expected


def test_ramification_trichotomy():
    f = double_cover()
    R = f.source.ring
    unit = make_arc(R, {"x": [1, "a1"]}, field=K)
    c = ramification_classify(f, unit)
    assert (c.omega, c.verdict) == (Finite(0), "unramified")
    for q in (1, 2, 3):
        arc = make_arc(R, {"x": [0] * q + ["a1", "a2"]}, field=K)
        c = ramification_classify(f, arc)
        assert (c.omega, c.verdict) == (Finite(q), "ramified_closed")
        assert "not lft" in c.message
    X2 = affine(K, ["x", "y"])
    g = morphism(X2, affine(K, ["u", "v"]), ["x", "x*y"])
    axis = make_arc(X2.ring, {"x": [0], "y": ["a1", "a2"]}, field=K)
    c = ramification_classify(g, axis)
    assert (c.omega, c.verdict) == (INFINITE, "ramified_generic")


def test_censored_classification_is_indeterminate():
    f = double_cover()
    arc = make_arc(f.source.ring, {"x": [0, 0]}, precision=1, exact=False, field=K)
    assert ramification_classify(f, arc).verdict == "indeterminate"


def test_cusp_to_line():
    C = affine(QQ, ["x", "y"], ["x^3 - y^2"])
    f = morphism(C, affine(QQ, ["z"]), ["x"])
    alpha = make_arc(C.ring, {"x": [0, 0, 1], "y": [0, 0, 0, 1]}, scheme=C)
    rep = cotangent_kernel(f, alpha)
    assert rep.kernel_dim == Finite(0)
    assert rep.bound == Finite(3)
    assert rep.refined_bound == Finite(0)
    assert not rep.x_smooth_at_origin


def test_morphism_validation():
    C = affine(QQ, ["x", "y"], ["x*y"])
    D = affine(QQ, ["u"], ["u"])
    with pytest.raises(MorphismError):
        morphism(C, D, ["x"])
    morphism(C, D, ["x*y"])
