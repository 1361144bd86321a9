import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dgcalc import (INHOMOGENEOUS, ZERO_POLYNOMIAL, GradedVariable, Universe, add,
                    evaluate_at_core, homogeneous_degree, left_partial, mul)
from dgcalc.errors import DegreeError, MissingAssignmentError, UniverseMismatchError
from dgcalc.graded_poly import format_polynomial

from randgen import SIGN_UNIVERSE, random_homogeneous

U = SIGN_UNIVERSE
seeds = st.integers(0, 2**32 - 1)
degrees = st.sampled_from([0, -1, -2, -3])


def word_normal_form(u: Universe, word: list[str]):
    """Sort a word of variables by bubble sort, tracking the Koszul sign.

    Returns (sign, exponent tuple); sign 0 when an odd variable repeats.
    """
    word = list(word)
    sign = 1
    key = {v.name: (v.degree, v.name) for v in u.variables}
    for i in range(len(word)):
        for j in range(len(word) - 1 - i):
            a, b = word[j], word[j + 1]
            if key[a] > key[b]:
                if u.variable(a).odd and u.variable(b).odd:
                    sign = -sign
                word[j], word[j + 1] = b, a
    for a, b in zip(word, word[1:]):
        if a == b and u.variable(a).odd:
            return 0, None
    exps = [0] * len(u)
    for w in word:
        exps[u.index(w)] += 1
    return sign, tuple(exps)


def test_sign_matches_word_sorting_oracle():
    rng = random.Random(7)
    for _ in range(2000):
        word = [rng.choice(U.names) for _ in range(rng.randint(0, 5))]
        p = U.const(1)
        for w in word:
            p = p * U.var(w)
        sign, exps = word_normal_form(U, word)
        if sign == 0:
            assert p.is_zero
        else:
            assert dict(p.items()) == {exps: Fraction(sign)}


def test_product_examples():
    u = Universe.of(x=0, xi1=-1, xi2=-1, eta=-2)
    xi1, xi2, eta = u.var("xi1"), u.var("xi2"), u.var("eta")
    assert (xi1 * xi1).is_zero
    assert xi2 * xi1 == -(xi1 * xi2)
    assert format_polynomial(xi2 * xi1) == "-xi1*xi2"
    assert eta * xi1 == xi1 * eta
    assert format_polynomial(xi1 * eta) == "eta*xi1"


def test_add_examples():
    u = Universe.of(x=0, y=0, xi1=-1, xi2=-1)
    x, y, xi1, xi2 = (u.var(n) for n in ("x", "y", "xi1", "xi2"))
    assert add(x, u.zero()) == x
    assert add(xi1 * xi2, xi2 * xi1).is_zero
    assert add(x + y, x - y) == x.scale(2)


def test_left_partial_examples():
    u = Universe.of(x=0, xi1=-1, xi2=-1)
    x, xi1, xi2 = u.var("x"), u.var("xi1"), u.var("xi2")
    assert left_partial(xi2 * xi1, "xi1") == -xi2
    assert left_partial(x ** 3 + x.scale(2), "x") == (x ** 2).scale(3) + 2
    assert left_partial(x * xi1 * xi2, "xi1") == x * xi2


def test_evaluate_at_core_examples():
    u = Universe.of(x=0, xi=-1, xi2=-1)
    x, xi = u.var("x"), u.var("xi")
    assert evaluate_at_core(x ** 2 + x * xi, {"x": 3}) == 9
    assert evaluate_at_core(xi * u.var("xi2"), {"x": 1}) == 0
    assert evaluate_at_core(u.const(5), {"x": 0}) == 5
    with pytest.raises(MissingAssignmentError):
        evaluate_at_core(x, {})


def test_homogeneous_degree_examples():
    u = Universe.of(x=0, xi1=-1)
    x, xi1 = u.var("x"), u.var("xi1")
    assert homogeneous_degree(x * xi1) == -1
    assert homogeneous_degree(x + xi1) is INHOMOGENEOUS
    assert homogeneous_degree(u.zero()) is ZERO_POLYNOMIAL


def test_positive_degree_rejected():
    with pytest.raises(DegreeError):
        GradedVariable("z", 1)


def test_universe_mismatch():
    a, b = Universe.of(x=0), Universe.of(y=0)
    with pytest.raises(UniverseMismatchError):
        mul(a.var("x"), b.var("y"))
    with pytest.raises(UniverseMismatchError):
        add(a.var("x"), b.var("y"))


def test_zero_coefficient_never_stored():
    x = U.var("x")
    assert not dict((x - x).items())
    assert (x - x) == U.zero() == 0


@settings(max_examples=200, deadline=None)
@given(seeds, degrees, degrees, degrees)
def test_associativity(seed, a, b, c):
    rng = random.Random(seed)
    p, q, r = (random_homogeneous(rng, U, d) for d in (a, b, c))
    assert mul(mul(p, q), r) == mul(p, mul(q, r))
    assert (p * q * r).terms() == (p * (q * r)).terms()


@settings(max_examples=200, deadline=None)
@given(seeds, degrees, degrees)
def test_graded_commutativity(seed, a, b):
    rng = random.Random(seed)
    p, q = random_homogeneous(rng, U, a), random_homogeneous(rng, U, b)
    assert mul(p, q) == mul(q, p).scale((-1) ** (a * b))


@settings(max_examples=200, deadline=None)
@given(seeds, st.sampled_from([-1, -3]))
def test_odd_nilpotence(seed, a):
    p = random_homogeneous(random.Random(seed), U, a)
    assert mul(p, p).is_zero


@settings(max_examples=200, deadline=None)
@given(seeds, degrees, degrees, st.sampled_from(SIGN_UNIVERSE.names))
def test_leibniz_left_partial(seed, a, b, v):
    rng = random.Random(seed)
    p, q = random_homogeneous(rng, U, a), random_homogeneous(rng, U, b)
    dv = U.degree_of(v)
    assert left_partial(p * q, v) == left_partial(p, v) * q + (p * left_partial(q, v)).scale((-1) ** (dv * a))


@settings(max_examples=200, deadline=None)
@given(seeds, degrees, degrees)
def test_degree_additivity(seed, a, b):
    rng = random.Random(seed)
    p, q = random_homogeneous(rng, U, a), random_homogeneous(rng, U, b)
    pq = p * q
    if pq:
        assert homogeneous_degree(pq) == a + b


@settings(max_examples=100, deadline=None)
@given(seeds, degrees)
def test_left_partial_degree(seed, a):
    rng = random.Random(seed)
    p = random_homogeneous(rng, U, a)
    for v in U.variables:
        d = left_partial(p, v.name)
        if d:
            assert homogeneous_degree(d) == a - v.degree
