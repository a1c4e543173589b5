from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from tlpoly.core_math import Poly
from tlpoly.graph_fam import SizeLimitError
from tlpoly.seq_fam import (
    SHEFFER_PRESETS,
    Series,
    ShefferSpec,
    exp_series,
    partitions_count,
    partitions_depth,
    partitions_polynomial_part,
    partitions_quasipoly,
    partitions_scaled_twolevel,
    partitions_scaled_values,
    series_arith,
    sheffer_codegree_poly,
    sheffer_poly,
    sheffer_preset,
    sheffer_twolevel,
)

N = Poly.x()


# -- independent oracles --------------------------------------------------------

@lru_cache(maxsize=None)
def stirling2(n, k):
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def bern(m):
    # sum_{k<=m} C(m+1, k) B_k = 0, B_0 = 1  (gives B_1 = -1/2)
    if m == 0:
        return Fraction(1)
    return -sum(math.comb(m + 1, k) * bern(k) for k in range(m)) / (m + 1)


def falling(q):
    p = Poly.const(1)
    for j in range(q):
        p = p * Poly([-j, 1])
    return p


def hermite_prob(q):
    a, b = Poly.const(1), N
    if q == 0:
        return a
    for k in range(1, q):
        a, b = b, N * b - a.scale(k)
    return b


def bernoulli_poly(q):
    return Poly([math.comb(q, k) * bern(k) for k in range(q, -1, -1)])


def naive_partitions(n, q):
    # partitions of n into exactly q positive parts, non-increasing
    def rec(left, parts, cap):
        if parts == 0:
            return 1 if left == 0 else 0
        return sum(rec(left - p, parts - 1, p) for p in range(1, min(left, cap) + 1))
    return rec(n, q, n)


def series_strategy(const):
    return st.lists(st.integers(-4, 4), min_size=5, max_size=5).map(
        lambda cs: Series.of([const] + cs, 5))


# -- series engine --------------------------------------------------------------

def test_series_examples():
    t = Series.t(4)
    assert t.exp().coeffs == tuple(Fraction(1, math.factorial(k)) for k in range(5))
    one = Series.one(3)
    assert (one + Series.t(3)).log().coeffs == (0, 1, Fraction(-1, 2), Fraction(1, 3))
    shifted = Series.of(exp_series(3).coeffs[1:], 2)
    assert shifted.inverse().coeffs == (1, Fraction(-1, 2), Fraction(1, 12))


def test_series_preconditions():
    with pytest.raises(ValueError):
        Series.of([0, 1], 3).inverse()
    with pytest.raises(ValueError):
        Series.of([2, 1], 3).log()
    with pytest.raises(ValueError):
        Series.of([1, 1], 3).exp()
    with pytest.raises(ValueError):
        Series.of([1, 1], 3).compose(Series.of([1, 1], 3))
    with pytest.raises(ValueError):
        series_arith("sqrt", Series.one(2))


@given(series_strategy(0))
def test_exp_log_roundtrip(a):
    assert a.exp().log() == a


@given(series_strategy(1))
def test_log_exp_and_inverse(a):
    assert a.log().exp() == a
    assert series_arith("mul", a, a.inverse()) == Series.one(5)


@given(series_strategy(1), st.integers(0, 4))
def test_series_pow_is_repeated_product(a, k):
    want = Series.one(5)
    for _ in range(k):
        want = want * a
    assert series_arith("pow", a, k) == want


# -- Sheffer ------------------------------------------------------------------------

def test_sheffer_spec_validation():
    T = 3
    with pytest.raises(ValueError):
        ShefferSpec(Series.of([0, 1], T), Series.t(T))
    with pytest.raises(ValueError):
        ShefferSpec(Series.one(T), Series.of([1, 1], T))
    with pytest.raises(ValueError):
        ShefferSpec(Series.one(T), Series.of([0, 0, 1], T))
    with pytest.raises(ValueError):
        sheffer_preset("laguerre", 3)


def test_sheffer_examples():
    assert sheffer_poly(sheffer_preset("falling_factorial", 3), 3) == falling(3)
    assert sheffer_poly(sheffer_preset("touchard", 2), 2) == N * N + N
    spec = ShefferSpec(Series.of([3, 1], 4), Series.t(4))
    assert sheffer_poly(spec, 0) == Poly.const(3)
    with pytest.raises(ValueError):
        sheffer_poly(sheffer_preset("touchard", 2), 5)


def test_sheffer_presets_against_independent_families():
    T = 9
    for q in range(T):
        assert sheffer_poly(sheffer_preset("falling_factorial", T), q) == falling(q)
        assert sheffer_poly(sheffer_preset("touchard", T), q) == Poly(
            [stirling2(q, k) for k in range(q + 1)])
        assert sheffer_poly(sheffer_preset("hermite", T), q) == hermite_prob(q)
        assert sheffer_poly(sheffer_preset("bernoulli", T), q) == bernoulli_poly(q)


def test_sheffer_codegree_examples():
    spec = sheffer_preset("falling_factorial", 10)
    phi1, rep = sheffer_codegree_poly(spec, 1, range(0, 5), range(5, 9))
    assert rep.ok
    assert all(phi1(q) == -math.comb(q, 2) for q in range(12))
    assert [phi1(q) for q in range(2, 7)] == [-1, -3, -6, -10, -15]
    phi1, rep = sheffer_codegree_poly(sheffer_preset("touchard", 10), 1, range(0, 5), range(5, 9))
    assert rep.ok and all(phi1(q) == math.comb(q, 2) for q in range(12))
    for name in SHEFFER_PRESETS:
        phi0, rep = sheffer_codegree_poly(sheffer_preset(name, 6), 0, [0, 1], [2, 3, 4])
        assert rep.ok and phi0 == Poly.const(1)


@pytest.mark.parametrize("name", SHEFFER_PRESETS)
def test_sheffer_fits_verify_for_small_codegree(name):
    spec = sheffer_preset(name, 12)
    for r in range(5):
        phi, rep = sheffer_codegree_poly(spec, r, range(0, 2 * r + 1), range(2 * r + 1, 2 * r + 4))
        assert rep.ok, rep.to_json()
        assert phi.degree <= 2 * r


def test_sheffer_underdetermined_fit_is_an_error():
    spec = sheffer_preset("touchard", 8)
    _, rep = sheffer_codegree_poly(spec, 2, [0, 1, 2], [3, 4])
    assert not rep.ok


def test_sheffer_twolevel_table():
    tl, rep = sheffer_twolevel(sheffer_preset("touchard", 12), 3, range(0, 7), range(7, 10))
    assert rep.ok
    # codegree r of the Touchard polynomial is S(q, q-r)
    for r in range(4):
        assert all(tl.phi(r, 0)(q) == stirling2(q, q - r) for q in range(r, 11))


def test_sheffer_scaled_by_b1():
    T = 8
    spec = ShefferSpec(Series.one(T), Series.t(T).scale(2))
    phi0, rep = sheffer_codegree_poly(spec, 0, [0, 1], [2, 3])
    assert rep.ok and phi0 == Poly.const(1)


# -- partitions -----------------------------------------------------------------------

def test_partition_count_examples():
    assert partitions_count(3, 2) == 1
    assert partitions_count(6, 3) == 3
    assert partitions_count(5, 7) == 0
    assert partitions_count(0, 0) == 1
    with pytest.raises(ValueError):
        partitions_count(-1, 2)


def test_partition_count_against_enumeration():
    for n in range(0, 16):
        for q in range(0, 7):
            assert partitions_count(n, q) == naive_partitions(n, q), (n, q)


def test_partitions_quasipoly_examples():
    f2 = partitions_quasipoly(2)
    assert f2.period == 2
    assert f2.constituents[0] == N.scale(Fraction(1, 2))
    assert f2.constituents[1] == N.scale(Fraction(1, 2)) - Poly.const(Fraction(1, 2))
    f3 = partitions_quasipoly(3)
    tail = [0, -1, -4, 3, -4, -1]
    assert f3.period == 6
    for i in range(6):
        assert f3.constituents[i] == (N * N + Poly.const(tail[i])).scale(Fraction(1, 12))
    f4 = partitions_quasipoly(4)
    tail4 = [0, 5, -20, -27, 32, -11, -36, 5, 16, -27, -4, -11]
    for i in range(12):
        lin = 0 if i % 2 == 0 else -9
        want = (N ** 3 + (N * N).scale(3) + N.scale(lin) + Poly.const(tail4[i])).scale(Fraction(1, 144))
        assert f4.constituents[i] == want


def test_partitions_quasipoly_matches_counts():
    for q in range(1, 7):
        f = partitions_quasipoly(q)
        for n in range(1 if q == 1 else 0, 61):
            assert f(n) == partitions_count(n, q), (q, n)


def test_partitions_quasipoly_guard():
    with pytest.raises(SizeLimitError):
        partitions_quasipoly(7)
    with pytest.raises(ValueError):
        partitions_quasipoly(0)


def test_polynomial_part_examples():
    p3 = partitions_polynomial_part(3)
    assert p3.coeff(2) == Fraction(1, 12) and p3.coeff(1) == 0
    assert partitions_polynomial_part(2).coeff(1) == Fraction(1, 2)
    p4 = partitions_polynomial_part(4)
    assert p4.coeff(3) == Fraction(1, 144) and p4.coeff(2) == Fraction(3, 144)


def test_polynomial_part_fixes_top_coefficients():
    for q in range(3, 7):
        f = partitions_quasipoly(q)
        part = partitions_polynomial_part(q)
        rows = f.periodic_coeffs(q - 1)
        for r in range(partitions_depth(q) + 1):
            assert len(set(rows[r])) == 1, (q, r)
            assert rows[r][0] == part.coeff(q - 1 - r), (q, r)


def test_scaled_partitions_table():
    vals = partitions_scaled_values(0, range(1, 9))
    assert set(vals.values()) == {1}
    tl, rep = partitions_scaled_twolevel(1, range(3, 7), range(7, 10))
    assert rep.ok, rep.to_json()
    assert tl.phi(0, 0) == Poly.const(1)
    assert all(tl.phi(1, 0)(q) == Fraction(q * (q - 1) * (q - 3), 4) for q in range(3, 12))
    assert tl.depth(3) == 1 and tl.depth(4) == 1 and tl.depth(5) == 2


def test_scaled_partitions_depth_exclusion():
    # r = 2 only counts q with floor((q-1)/2) >= 2, so q = 3, 4 are skipped
    tl, rep = partitions_scaled_twolevel(2, range(1, 12), range(12, 14))
    assert rep.ok, rep.to_json()
    assert rep.fitted[(2, 0)][1] == len([q for q in range(1, 12) if q >= 5])
