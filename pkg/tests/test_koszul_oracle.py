import os
import random

import pytest
from hypothesis import given, settings, strategies as st

from dgcalc import (DgChart, TruncationSpec, bounded_cohomology, classical_locus_ideal,
                    homogeneous_degree, koszul, validate_chart)
from dgcalc.derived import chart_isomorphism
from dgcalc.errors import CohomologicalError, DegreeError, InputError, NameClashError, OracleLimitError
from dgcalc.graded_poly import format_polynomial
from dgcalc.oracle import MAX_BASIS_ENV

from randgen import random_base_poly, random_chart, random_closed
from sympy_oracle import standard_monomial_count

seeds = st.integers(0, 2**32 - 1)

LINE = DgChart("A", ["x"], [], {})
PLANE = DgChart("A2", ["x", "y"], [], {})
ODD = DgChart("O", [], [("xi", -1)], {})


def test_koszul_line():
    K = koszul(LINE, [("x", "xi")])
    assert K.degree_of("xi") == -1 and format_polynomial(K.d("xi")) == "x"
    assert [format_polynomial(g) for g in classical_locus_ideal(K).generators] == ["x"]


def test_koszul_odd_element_gets_even_generator():
    K = koszul(ODD, [("xi", "eta")])
    assert K.degree_of("eta") == -2 and K.d("eta") == K.var("xi")
    assert validate_chart(K)


def test_koszul_errors():
    K = DgChart("K", ["x"], [("xi", -1)], {"xi": "x"})
    with pytest.raises(CohomologicalError):
        koszul(K, [("xi", "eta")])
    with pytest.raises(DegreeError):
        koszul(K, [("x + xi", "eta")])
    with pytest.raises(NameClashError):
        koszul(K, [("x", "xi")])
    with pytest.raises(NameClashError):
        koszul(LINE, [("x", "a"), ("x^2", "a")])


def test_koszul_is_iterable():
    once = koszul(PLANE, [("x", "a"), ("y^2", "b")])
    twice = koszul(koszul(PLANE, [("x", "a")]), [("y^2", "b")])
    assert once == twice


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_iteration_order_isomorphism(seed):
    rng = random.Random(seed)
    A = random_chart(rng, "A", max_amplitude=2, max_fibers=2)
    a1 = random_closed(rng, A, 0) if rng.random() < 0.3 else random_base_poly(rng, A.universe)
    a2 = random_closed(rng, A, -1) or random_base_poly(rng, A.universe)
    e1 = (format_polynomial(a1), "k1", 0)
    e2 = (format_polynomial(a2), "k2", 0 if a2.is_zero else homogeneous_degree(a2))
    first = koszul(koszul(A, [e1]), [e2])
    second = koszul(koszul(A, [e2]), [e1])
    iso = chart_isomorphism(first, second, {g: g for g in first.generators})
    assert iso.forward.source == first and iso.backward.source == second


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_h0_ideal_matches_degree_zero_elements(seed):
    rng = random.Random(seed)
    A = random_chart(rng, "A", max_amplitude=1, max_fibers=2)
    elems = [random_base_poly(rng, A.universe) for _ in range(rng.randint(1, 3))]
    K = koszul(A, [(a, f"k{i}", 0) for i, a in enumerate(elems)])
    want = list(classical_locus_ideal(A).generators) + elems
    got = list(classical_locus_ideal(K).generators)
    assert sorted(map(format_polynomial, got)) == sorted(format_polynomial(p.embed(A.universe)) for p in want)


CASES = [
    ("K(x)", LINE, ["x"], ["x"]),
    ("K(x,y)", PLANE, ["x", "y"], ["x", "y"]),
    ("K(x^2)", LINE, ["x^2"], ["x"]),
]


@pytest.mark.parametrize("label,base,elements,variables", CASES, ids=[c[0] for c in CASES])
def test_h0_is_truncated_quotient(label, base, elements, variables):
    K = koszul(base, [(a, f"k{i}") for i, a in enumerate(elements)])
    res = bounded_cohomology(K, TruncationSpec(6, -2))
    assert res.stable
    assert res[0] == standard_monomial_count(elements, variables, 6)
    assert res[-1] == res[-2] == 0


def test_odd_regular_element():
    K = koszul(ODD, [("xi", "eta")])
    res = bounded_cohomology(K, TruncationSpec(6, -4))
    assert res.stable
    assert res.dims == {0: 1, -1: 0, -2: 0, -3: 0, -4: 0}


def test_koszul_of_plane_degree_window_exact():
    K = koszul(PLANE, [("x", "a"), ("y", "b")])
    assert bounded_cohomology(K, TruncationSpec(3, -2)).dims == {0: 1, -1: 0, -2: 0}


def test_unit_element_acyclic():
    for base in (LINE, PLANE):
        K = koszul(base, [("1", "u")])
        res = bounded_cohomology(K, TruncationSpec(4, -3))
        assert res.stable and set(res.dims.values()) == {0}


def test_non_regular_pair_has_negative_cohomology():
    K = koszul(LINE, [("x", "a"), ("x", "b")])
    res = bounded_cohomology(K, TruncationSpec(5, -2))
    assert res.stable and res[0] == 1 and res[-1] > 0


WEIGHTED = [
    ("K(x)", LINE, ["x"], {"x": 1, "k0": 1}),
    ("K(x,y)", PLANE, ["x", "y"], {"x": 1, "y": 1, "k0": 1, "k1": 1}),
    ("K(x^2)", LINE, ["x^2"], {"x": 1, "k0": 2}),
    ("K(x^2,y^3)", PLANE, ["x^2", "y^3"], {"x": 1, "y": 1, "k0": 2, "k1": 3}),
]


@pytest.mark.parametrize("label,base,elements,weights", WEIGHTED, ids=[c[0] for c in WEIGHTED])
def test_per_weight_dims_independent_of_truncation(label, base, elements, weights):
    K = koszul(base, [(a, f"k{i}") for i, a in enumerate(elements)])
    variables = list(base.base)
    for w in range(0, 6):
        seen = set()
        for d in range(w, w + 3):
            res = bounded_cohomology(K, TruncationSpec(d, -2, weight=w, weights=weights))
            seen.add(tuple(sorted(res.dims.items())))
            assert res[0] == standard_monomial_count(elements, variables, d, weights, w)
            assert res[-1] == res[-2] == 0
        assert len(seen) == 1


def test_weight_requires_homogeneous_differential():
    K = koszul(LINE, [("x^2 + x", "k")])
    with pytest.raises(InputError):
        bounded_cohomology(K, TruncationSpec(3, -1, weight=1))


def test_bad_truncation():
    with pytest.raises(InputError):
        TruncationSpec(-1, 0)
    with pytest.raises(InputError):
        TruncationSpec(2, 1)


def test_basis_cap(monkeypatch):
    K = koszul(PLANE, [("x", "a"), ("y", "b")])
    with pytest.raises(OracleLimitError):
        bounded_cohomology(K, TruncationSpec(30, -2, max_basis=50))
    monkeypatch.setenv(MAX_BASIS_ENV, "10")
    with pytest.raises(OracleLimitError):
        bounded_cohomology(K, TruncationSpec(6, -2))
    monkeypatch.delenv(MAX_BASIS_ENV)
    assert bounded_cohomology(K, TruncationSpec(6, -2)).stable


def test_inhomogeneous_element():
    # Q[x]/(1 + x) is one-dimensional and 1 + x is regular
    K = koszul(LINE, [("1 + x", "k")])
    for d in range(1, 5):
        res = bounded_cohomology(K, TruncationSpec(d, -1))
        assert res.stable and res.dims == {0: 1, -1: 0}


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_random_chart_oracle_runs_and_kernel_bounds(seed):
    c = random_chart(random.Random(seed), max_amplitude=2, max_fibers=2, base_names=("x",))
    res = bounded_cohomology(c, TruncationSpec(3, -2))
    assert all(h >= 0 for h in res.dims.values())
    assert all(h >= 0 for h in res.next_dims.values())
    assert res.stable == (res.dims == res.next_dims)


def test_env_cap_parsing(monkeypatch):
    monkeypatch.setenv(MAX_BASIS_ENV, "not a number")
    K = koszul(LINE, [("x", "k")])
    assert bounded_cohomology(K, TruncationSpec(2, -1)).dims == {0: 1, -1: 0}
    assert os.environ[MAX_BASIS_ENV] == "not a number"
