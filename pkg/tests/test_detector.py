from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tlpoly import catalog
from tlpoly.closedforms import closedform_Kqq, rising_factorial
from tlpoly.core_math import Poly
from tlpoly.detector import (
    DetectConfig,
    NoPeriodFound,
    compare_tables,
    detect_two_level,
    fit_quasipoly,
    period_search,
    table_values,
)
from tlpoly.twolevel import DepthExpr, OracleHandle, TwoLevelQP

Q = Poly.x()


def oracle(name):
    return catalog.oracle_for(catalog.parse_spec(name))


def default_config(name, **over):
    spec = catalog.parse_spec(name)
    d = catalog.FAMILIES[name].defaults(spec.params)
    kw = dict(q_fit=d.fit, q_test=d.test, R=d.R, degree_bound=d.degree_bound,
              periods=d.periods, depth=d.depth, bound_kind=d.bound_kind)
    kw.update(over)
    return DetectConfig(**kw)


# -- configuration ------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ValueError):
        DetectConfig([1, 2, 3], [3, 4], 1)
    with pytest.raises(ValueError):
        DetectConfig([], [4], 1)
    with pytest.raises(ValueError):
        DetectConfig([1], [4], -1)
    with pytest.raises(ValueError):
        DetectConfig([1], [4], 1, periods=[2, 3])
    with pytest.raises(ValueError):
        DetectConfig([1], [4], 1, periods=[1])
    cfg = DetectConfig([3, 1, 2], [5, 4], 2)
    assert cfg.q_fit == [1, 2, 3] and cfg.periods == [1, 1, 1]
    assert cfg.to_json()["degree_bounds"] == [0, 2, 4]


# -- positive runs --------------------------------------------------------------------

def test_binomial_power_recovers_binomials():
    cfg = DetectConfig(range(0, 5), range(5, 8), 3, degree_bound=lambda r: r)
    tl, rep = detect_two_level(oracle("binomial-power"), cfg)
    assert rep.ok, rep.to_json()
    for r in range(4):
        assert tl.phi(r, 0) == Poly.binomial(r)
    assert tl.degree_g == Q


def test_knights_detection_passes():
    cfg = DetectConfig([2, 3, 4], [5], 2, degree_bound=lambda r: r + 2)
    tl, rep = detect_two_level(oracle("knights"), cfg)
    assert rep.ok, rep.to_json()
    assert tl.phi(0, 0) == Poly.const(1)
    assert tl.phi(1, 0).is_zero()
    assert all(tl.phi(2, 0)(q) == -9 * math.comb(q, 2) for q in range(8))


def test_grid_with_bond_coefficients():
    tl, rep = detect_two_level(oracle("grid-chromatic"), default_config("grid-chromatic"))
    assert rep.ok, rep.to_json()
    assert tl.phi(1, 0) == -(Q * Q).scale(2) + Q.scale(2)
    assert tl.phi(2, 0) == Poly([0, 1, 1, -4, 2])


def test_quasi_periodic_rows():
    # queens q = 3 has period 2 from n = 0; the top rows stay constant per class
    cfg = DetectConfig([0, 1, 2], [3], 1, periods=[1, 1])
    _, rep = detect_two_level(oracle("queens"), cfg)
    assert rep.ok, rep.to_json()


@pytest.mark.parametrize("name", catalog.family_names())
def test_catalog_defaults_pass(name):
    tl, rep = detect_two_level(oracle(name), default_config(name))
    assert rep.ok, rep.to_json()
    assert rep.checked


# -- negative controls -------------------------------------------------------------

def test_cycle_depth_one_too_deep_fails():
    cfg = default_config("cq-chromatic", depth=DepthExpr.affine(1, -1))
    _, rep = detect_two_level(oracle("cq-chromatic"), cfg)
    assert not rep.ok
    # the observed coefficient at r = q - 1 is off from (-1)^r C(q, r) by (-1)^q
    for q in (3, 4):  # R = 3 reaches r = q - 1 only for these
        r = q - 1
        assert rep.observed[(q, r, 0)] - (-1) ** r * math.comb(q, r) == (-1) ** q
    ok_cfg = default_config("cq-chromatic")
    assert detect_two_level(oracle("cq-chromatic"), ok_cfg)[1].ok


def test_grid_two_fit_points_cannot_pin_the_rows():
    cfg = DetectConfig([2, 3], [4], 2, degree_bound=lambda r: 2 * r)
    _, rep = detect_two_level(oracle("grid-chromatic"), cfg)
    assert not rep.ok
    assert {m.r for m in rep.mismatches} == {1, 2}
    assert all(m.q == 4 for m in rep.mismatches)


def test_missing_test_points_is_an_error():
    cfg = DetectConfig(range(3, 9), [9], 3, degree_bound=lambda r: r,
                       depth=DepthExpr.affine(1, -2))
    _, rep = detect_two_level(oracle("cq-chromatic"), cfg)
    assert rep.ok
    # the only held-out q is 4, whose depth stops at r = 2, so row 3 is never checked
    cfg = DetectConfig([5, 6, 7], [4], 3, degree_bound=lambda r: r,
                       depth=DepthExpr.affine(1, -2))
    _, rep = detect_two_level(oracle("cq-chromatic"), cfg)
    assert any("unverified" in e for e in rep.errors)


def test_wrong_period_hypothesis_surfaces_as_error():
    sidon = oracle("sidon")
    cfg = DetectConfig([3], [4], 1, degree_bound=lambda r: 4)
    bare = OracleHandle("sidon", {}, sidon.fn, degree_fn=sidon.degree_fn)
    _, rep = detect_two_level(bare, cfg)
    assert not rep.ok and rep.errors


def test_degree_bound_violation_is_an_error():
    cfg = DetectConfig(range(0, 6), range(6, 8), 2, degree_bound=lambda r: r)
    _, rep = detect_two_level(oracle("rising-factorial"), cfg)
    assert any("exceeds bound" in e for e in rep.errors)


def test_corrupted_table_fails_comparison():
    good = rising_factorial(2)
    rows = [list(r) for r in good.table]
    rows[2][0] = rows[2][0] + Poly.const(1)
    bad = TwoLevelQP(good.degree_g, good.depth, good.R, good.periods, rows, "corrupt")
    rep = compare_tables(good, bad)
    assert not rep.ok
    assert [(m.r, m.i) for m in rep.mismatches] == [(2, 0)]


def test_degree_mismatch_in_comparison():
    a = rising_factorial(1)
    b = TwoLevelQP(2 * Q, a.depth, a.R, a.periods, a.table)
    assert compare_tables(a, b).errors


def test_oracle_without_degree_needs_config_degree():
    bare = OracleHandle("sq", {}, lambda q, n: n ** q)
    with pytest.raises(ValueError):
        detect_two_level(bare, DetectConfig([0, 1], [2], 0))
    _, rep = detect_two_level(bare, DetectConfig([0, 1], [2], 0, degree_g=Q))
    assert rep.ok


# -- comparisons against closed forms --------------------------------------------

def test_kqq_closed_form_against_detected_small_q():
    cfg = DetectConfig(range(0, 4), [4], 1, degree_bound=lambda r: 3 * r)
    detected, rep = detect_two_level(oracle("kqq-chromatic"), cfg)
    assert rep.ok, rep.to_json()
    assert compare_tables(closedform_Kqq(1), detected).ok


def test_kqq_closed_form_against_detected_default():
    detected, rep = detect_two_level(oracle("kqq-chromatic"), default_config("kqq-chromatic"))
    assert rep.ok
    assert compare_tables(closedform_Kqq(2), detected).ok


def test_rising_factorial_closed_form_against_detected():
    detected, rep = detect_two_level(oracle("rising-factorial"), default_config("rising-factorial"))
    assert rep.ok
    assert compare_tables(rising_factorial(3), detected).ok


def test_table_against_itself():
    for tl in (rising_factorial(3), closedform_Kqq(2)):
        assert compare_tables(tl, tl).ok


# -- period search -------------------------------------------------------------------

def test_period_search_examples():
    part = oracle("partitions:scaled=0")
    assert period_search(part, 3, 2, 12, 0) == 6
    with pytest.raises(NoPeriodFound) as exc:
        period_search(part, 4, 3, 6, 0)
    assert exc.value.tried == 6
    assert period_search(oracle("knights"), 2, 4, 4, 3) == 1


def test_period_search_is_divisor_monotone():
    part = oracle("partitions:scaled=0")
    for q, found in ((2, 2), (3, 6)):
        assert period_search(part, q, q - 1, 12, 0) == found
        for mult in range(found, 13, found):
            fit_quasipoly(part, q, q - 1, mult)


def test_fit_quasipoly_reproduces_counts():
    part = oracle("partitions:scaled=0")
    f = fit_quasipoly(part, 3, 2, 6)
    assert all(f(n) == part.eval(3, n) for n in range(0, 80))


# -- determinism and soundness ---------------------------------------------------------

def test_reports_are_deterministic():
    a = detect_two_level(oracle("knights"), default_config("knights"))[1].dumps()
    b = detect_two_level(oracle("knights"), default_config("knights"))[1].dumps()
    c = detect_two_level(oracle("knights"), default_config("knights", jobs=4))[1].dumps()
    assert a == b == c


def test_table_values_rows():
    rows = table_values(rising_factorial(2), [0, 1, 2])
    assert rows[0] == (0, 0, 0, 1)
    assert all(q >= 0 and r <= 2 for q, r, _, _ in rows)


coeff_poly = st.lists(st.integers(-3, 3), min_size=1, max_size=3).map(Poly)


@settings(max_examples=25)
@given(st.lists(coeff_poly, min_size=3, max_size=3), st.integers(0, 2))
def test_detector_recovers_planted_rows(rows, shift):
    # f_q(n) = n^(q+2+shift) + sum_{r=1,2} rows[r](q) n^(q+2+shift-r)
    rows = [Poly.const(1)] + rows[1:]

    def fn(q, n):
        g = q + 2 + shift
        return sum(Fraction(rows[r](q)) * Fraction(n) ** (g - r) for r in range(3))

    orc = OracleHandle("planted", {}, fn, degree_fn=lambda q: q + 2 + shift)
    cfg = DetectConfig(range(0, 5), [5, 6], 2, degree_bound=lambda r: 2)
    tl, rep = detect_two_level(orc, cfg)
    assert rep.ok
    assert [tl.phi(r, 0) for r in range(3)] == rows
    for (q, r, i) in rep.checked:
        assert tl.phi(r, i)(q) == rep.observed[(q, r, i)]


@settings(max_examples=15)
@given(st.integers(5, 6), st.integers(1, 2))
def test_detector_rejects_a_perturbed_test_point(bad_q, bad_r):
    base = oracle("rising-factorial")

    def fn(q, n):
        v = base.eval(q, n)
        return v + (Fraction(n) ** (q - bad_r) if q == bad_q else 0)

    orc = OracleHandle("perturbed", {}, fn, degree_fn=lambda q: q)
    cfg = DetectConfig(range(0, 5), [5, 6], 2, degree_bound=lambda r: 2 * r)
    _, rep = detect_two_level(orc, cfg)
    assert not rep.ok
    assert any(m.q == bad_q and m.r == bad_r for m in rep.mismatches)
