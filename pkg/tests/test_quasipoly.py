from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import quasipolys
from tlpoly.core_math import Poly
from tlpoly.quasipoly import (
    FitError,
    InsufficientSamples,
    QuasiPoly,
    qp_arith,
    qp_compose_poly,
    qp_eval,
    qp_fit,
    qp_minimal_period,
)
from tlpoly.seq_fam import partitions_count

X = Poly.x()
H = Fraction(1, 2)
FLOOR_HALF = QuasiPoly([X.scale(H), X.scale(H) - H])
CEIL_HALF = QuasiPoly([X.scale(H), X.scale(H) + H])
SIGN = QuasiPoly.periodic([1, -1])
# p_3(n) = (1/12)(n^2 + [0,-1,-4,3,-4,-1]_6)
P3 = QuasiPoly([(X * X + c).scale(Fraction(1, 12)) for c in (0, -1, -4, 3, -4, -1)])


def test_eval_examples():
    assert qp_eval(FLOOR_HALF, 7) == 3
    assert qp_eval(P3, 6) == 3
    assert qp_eval(QuasiPoly([Poly()]), 11) == 0
    assert [P3(n) for n in range(40)] == [partitions_count(n, 3) for n in range(40)]


def test_negative_n_uses_mathematical_mod():
    assert FLOOR_HALF(-3) == -2
    assert SIGN(-1) == -1


def test_arith_examples():
    assert qp_minimal_period(qp_arith("add", FLOOR_HALF, CEIL_HALF)) == QuasiPoly([X])
    assert qp_minimal_period(qp_arith("mul", SIGN, SIGN)) == QuasiPoly([Poly.const(1)])
    scaled = qp_arith("scale", P3, 12)
    assert [c.coeff(0) for c in scaled.constituents] == [0, -1, -4, 3, -4, -1]
    with pytest.raises(ValueError):
        qp_arith("pow", P3, 2)


def test_minimal_period_examples():
    assert qp_minimal_period(QuasiPoly([X * X] * 4)) == QuasiPoly([X * X])
    assert qp_minimal_period(QuasiPoly.periodic([1, -1] * 3)).period == 2
    # p_4 displayed with an inner period-2 linear term still needs period 12
    tail = [0, 5, -20, -27, 32, -11, -36, 5, 16, -27, -4, -11]
    p4 = QuasiPoly([
        (X ** 3 + 3 * X * X + (0 if i % 2 == 0 else -9) * X + tail[i]).scale(Fraction(1, 144))
        for i in range(12)
    ])
    assert qp_minimal_period(p4).period == 12
    assert [p4(n) for n in range(60)] == [partitions_count(n, 4) for n in range(60)]


def test_compose_examples():
    assert qp_compose_poly(FLOOR_HALF, X + 1) == CEIL_HALF
    assert qp_compose_poly(QuasiPoly([X * X]), 2 * X + 1) == QuasiPoly([Poly([1, 4, 4])])
    assert qp_minimal_period(qp_compose_poly(SIGN, 2 * X)) == QuasiPoly([Poly.const(1)])
    with pytest.raises(ValueError):
        qp_compose_poly(SIGN, X.scale(H))


def test_fit_examples():
    assert qp_fit([(n, n // 2) for n in range(10)], 1, 2, 0) == FLOOR_HALF
    fitted = qp_fit([(n, partitions_count(n, 3)) for n in range(3, 41)], 2, 6, 0)
    assert fitted == P3
    with pytest.raises(FitError) as exc:
        qp_fit([(n, partitions_count(n, 3)) for n in range(0, 41)], 2, 2, 0)
    err = exc.value
    assert err.expected == partitions_count(err.n, 3) and err.got != err.expected
    with pytest.raises(InsufficientSamples):
        qp_fit([(n, n) for n in range(3)], 1, 2, 0)


def test_json_round_trip_is_byte_identical():
    s = P3.dumps()
    assert QuasiPoly.from_json(__import__("json").loads(s)).dumps() == s


@given(quasipolys(), quasipolys())
def test_mul_evaluates_pointwise(f, g):
    h = qp_arith("mul", f, g)
    assert all(h(n) == f(n) * g(n) for n in range(0, 101, 7))


@given(quasipolys())
def test_minimal_period_idempotent_and_faithful(f):
    m = qp_minimal_period(f)
    assert qp_minimal_period(m) == m
    assert f.period % m.period == 0
    assert all(m(n) == f(n) for n in range(0, 201, 3))


@given(quasipolys(max_degree=3, max_period=4))
def test_fit_recovers_known(f):
    deg = int(f.degree) if f.degree >= 0 else 0
    samples = [(n, f(n)) for n in range((deg + 2) * f.period)]
    assert qp_fit(samples, deg, f.period, 0).minimal_period() == f.minimal_period()
