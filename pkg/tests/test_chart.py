import random

import pytest
from hypothesis import given, settings, strategies as st

from dgcalc import (DgChart, DgMorphism, check_morphism, classical_locus_ideal, compose, identity,
                    is_classical_point, is_fibration_at, product, product_with_projections,
                    validate_chart)
from dgcalc.chart import point_chart
from dgcalc.errors import (ChainConditionError, CohomologicalError, DegreeError, MissingAssignmentError,
                           NameClashError, NonClassicalPointError, UniverseMismatchError)
from dgcalc.graded_poly import format_polynomial

from randgen import random_chart, random_morphism

seeds = st.integers(0, 2**32 - 1)


def test_validate_examples():
    ok = DgChart("A", ["x"], [("xi", -1)], {"xi": "x^2"})
    assert validate_chart(ok)
    bad = DgChart("B", ["x"], [("xi", -1)], {"xi": "xi"}, validate=False)
    diag = validate_chart(bad)
    assert not diag and diag.kind == "degree violation" and diag.generator == "xi"
    bad2 = DgChart("C", ["x"], [("xi1", -1), ("eta", -2)], {"eta": "xi1", "xi1": "x"}, validate=False)
    diag = validate_chart(bad2)
    assert not diag and diag.kind == "D^2 failure" and diag.generator == "eta"
    with pytest.raises(CohomologicalError):
        DgChart("C", ["x"], [("xi1", -1), ("eta", -2)], {"eta": "xi1", "xi1": "x"})
    with pytest.raises(DegreeError):
        DgChart("B", ["x"], [("xi", -1)], {"xi": "xi"})


def test_name_clash():
    with pytest.raises(NameClashError):
        DgChart("A", ["x"], [("x", -1)], {})


def test_amplitude():
    assert DgChart("A", ["x"], [], {}).amplitude == 0
    assert DgChart("A", ["x"], [("a", -1), ("b", -3)], {}).amplitude == 3


def test_morphism_examples():
    src = DgChart("S", ["x"], [("xi", -1)], {"xi": "x"})
    tgt = DgChart("T", ["y"], [("eta", -1)], {"eta": "y^2"})
    good = DgMorphism("f", src, tgt, {"y": "x", "eta": "xi*x"})
    assert check_morphism(good)
    bad = DgMorphism("g", src, tgt, {"y": "x", "eta": "xi"}, validate=False)
    diag = check_morphism(bad)
    assert not diag and diag.kind == "chain condition" and diag.generator == "eta"
    with pytest.raises(ChainConditionError):
        DgMorphism("g", src, tgt, {"y": "x", "eta": "xi"})
    wrong_degree = DgMorphism("h", src, tgt, {"y": "xi"}, validate=False)
    assert check_morphism(wrong_degree).kind == "degree violation"
    assert check_morphism(identity(src))


def test_compose_examples():
    X = DgChart("X", ["x"], [], {})
    Y = DgChart("Y", ["y"], [], {})
    Z = DgChart("Z", ["z"], [], {})
    g = DgMorphism("g", X, Y, {"y": "x^2"})
    f = DgMorphism("f", Y, Z, {"z": "y + 1"})
    h = compose(g, f)
    assert h.source == X and h.target == Z
    assert format_polynomial(h.images["z"]) == "x^2 + 1"
    assert compose(identity(X), g) == g
    assert compose(g, identity(Y)) == g
    with pytest.raises(UniverseMismatchError):
        compose(f, g)


def test_product_examples():
    M = DgChart("M", ["x"], [("xi", -1)], {"xi": "x"})
    assert product(M, point_chart()) == M
    N = DgChart("N", ["y"], [("eta", -1), ("zeta", -2)], {"eta": "y"})
    P = product_with_projections(M, N)
    ideal = classical_locus_ideal(P.chart)
    assert sorted(map(format_polynomial, ideal.generators)) == ["x", "y"]
    assert P.chart.amplitude == 2
    assert check_morphism(P.first) and check_morphism(P.second)
    probes = [{"x": 0, "y": 0}]
    assert is_fibration_at(P.first, probes) and is_fibration_at(P.second, probes)
    with pytest.raises(NameClashError):
        product(M, M)
    renamed = product(M, M, rename={"x": "x2", "xi": "xi2"})
    assert set(renamed.generators) == {"x", "x2", "xi", "xi2"}
    assert validate_chart(renamed)


def test_classical_locus_examples():
    K = DgChart("K", ["x"], [("xi", -1)], {"xi": "x"})
    assert list(map(format_polynomial, classical_locus_ideal(K).generators)) == ["x"]
    Z = DgChart("Z", ["x"], [("xi", -1)], {})
    assert not any(classical_locus_ideal(Z).generators)
    assert is_classical_point(Z, {"x": 5})
    T = DgChart("T", ["x"], [("xi1", -1), ("xi2", -1), ("eta", -2)],
                {"xi1": "x", "xi2": "x", "eta": "xi1 - xi2"})
    assert list(map(format_polynomial, classical_locus_ideal(T).generators)) == ["x", "x"]
    Q = DgChart("Q", ["x"], [("xi", -1)], {"xi": "x^2 - 1"})
    assert is_classical_point(Q, {"x": 1})
    assert not is_classical_point(Q, {"x": 0})
    with pytest.raises(MissingAssignmentError):
        is_classical_point(Q, {})


def test_fibration_examples():
    XY = DgChart("XY", ["x", "y"], [], {})
    X = DgChart("X", ["x"], [], {})
    pr = DgMorphism("pr", XY, X, {"x": "x"})
    assert is_fibration_at(pr, [{"x": 0, "y": 0}, {"x": 2, "y": -1}])
    sq = DgMorphism("sq", X, X, {"x": "x^2"})
    check = is_fibration_at(sq, [{"x": 1}, {"x": 0}])
    assert not check and check.probe == {"x": 0} and check.degree == 0
    K = DgChart("K", ["x"], [("xi", -1)], {"xi": "x"})
    with pytest.raises(NonClassicalPointError):
        is_fibration_at(identity(K), [{"x": 1}])


def test_fiber_rank_condition():
    A = DgChart("A", ["x"], [("a", -1), ("b", -1)], {})
    B = DgChart("B", ["x"], [("c", -1)], {})
    assert is_fibration_at(DgMorphism("f", A, B, {"x": "x", "c": "a + x*b"}), [{"x": 0}])
    check = is_fibration_at(DgMorphism("g", A, B, {"x": "x", "c": "x*b"}), [{"x": 1}, {"x": 0}])
    assert not check and check.degree == 1 and check.probe == {"x": 0}


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_classical_points_map_to_classical_points(seed):
    f, probe = random_morphism(random.Random(seed))
    assert is_classical_point(f.source, probe)
    assert is_classical_point(f.target, f.map_point(probe))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_random_morphisms_are_valid(seed):
    f, _ = random_morphism(random.Random(seed))
    assert check_morphism(f)
    assert compose(identity(f.source), f) == f
    assert compose(f, identity(f.target)) == f


@settings(max_examples=100, deadline=None)
@given(seeds, seeds)
def test_product_ideal_is_union(s1, s2):
    a = random_chart(random.Random(s1), "A", base_names=("x", "y"))
    b = random_chart(random.Random(s2), "B", base_names=("u", "v"))
    b = b.renamed("B")
    rename = {g: f"{g}_b" for g in b.generators}
    ab = product(a, b, rename=rename)
    assert validate_chart(ab)
    assert ab.amplitude == max(a.amplitude, b.amplitude)
    got = sorted(map(format_polynomial, classical_locus_ideal(ab).generators))
    ren = product(point_chart(), b, rename=rename)
    want = sorted(map(format_polynomial, classical_locus_ideal(a).generators)) + \
        list(map(format_polynomial, classical_locus_ideal(ren).generators))
    assert got == sorted(want)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_dropping_top_generator(seed):
    c = random_chart(random.Random(seed))
    top = c.fibers_of_degree(-c.amplitude)[-1]
    keep = [(g, d) for g, d in c.fibers if g != top]
    sub = DgChart("S", c.base, keep, {g: format_polynomial(c.d(g)) for g, _ in keep})
    assert validate_chart(sub)
    assert sub.amplitude <= c.amplitude


def test_map_point_requires_assignment():
    f, probe = random_morphism(random.Random(3))
    with pytest.raises(MissingAssignmentError):
        f.map_point({})

