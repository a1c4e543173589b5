"""The twelve acceptance criteria, each under its wall-clock limit.

Every criterion prints one PASS/FAIL line in the terminal summary.
"""
from __future__ import annotations

import functools
import itertools
import math
import random
import time
from fractions import Fraction
from functools import lru_cache

import pytest

from conftest import ACCEPTANCE_RESULTS
from tlpoly import catalog
from tlpoly.board_fam import (
    ConflictSet,
    PieceSpec,
    brute_force_bicolor,
    brute_force_ordered,
    count_ordered_sidon,
    knights_closedform_count,
)
from tlpoly.closedforms import closedform_KqPq, kqq_value
from tlpoly.core_math import Poly, interpolate
from tlpoly.detector import DetectConfig, detect_two_level, fit_quasipoly, period_search
from tlpoly.graph_fam import (
    Graph,
    cartesian,
    cartesian_power,
    chromatic_codegree,
    chromatic_poly,
    complete,
    complete_bipartite,
    cycle,
    johnson,
    kneser,
    path,
)
from tlpoly.laws import run_laws
from tlpoly.quasipoly import qp_fit
from tlpoly.seq_fam import (
    SHEFFER_PRESETS,
    partitions_depth,
    partitions_polynomial_part,
    partitions_quasipoly,
    partitions_scaled_twolevel,
    sheffer_codegree_poly,
    sheffer_poly,
    sheffer_preset,
)

pytestmark = pytest.mark.acceptance
Q = Poly.x()
N = Poly.x()


def criterion(num: int, title: str, limit: float):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            detail, passed = "", False
            try:
                fn(*args, **kwargs)
                secs = time.perf_counter() - t0
                passed = secs <= limit
                if not passed:
                    detail = "time limit exceeded"
            except Exception as exc:
                secs = time.perf_counter() - t0
                detail = str(exc).splitlines()[0][:160] if str(exc) else type(exc).__name__
                ACCEPTANCE_RESULTS.append((num, title, False, secs, limit, detail))
                raise
            ACCEPTANCE_RESULTS.append((num, title, passed, secs, limit, detail))
            assert passed, f"criterion {num} took {secs:.1f}s, limit {limit}s"
        return run
    return wrap


# ---------------------------------------------------------------------------------

@criterion(1, "grid chromatic coefficients q=2..4", 60)
def test_c01_grid_coefficients():
    for q in (2, 3, 4):
        p = chromatic_poly(cartesian_power(path(q), 2))
        g = q * q
        assert p.coeff(g) == 1
        assert p.coeff(g - 1) == -(2 * q * q - 2 * q), q
        assert p.coeff(g - 2) == 2 * q ** 4 - 4 * q ** 3 + q * q + q, q


@criterion(2, "cycle depth boundary q=3..8", 1)
def test_c02_cycle_depth_boundary():
    for q in range(3, 9):
        p = chromatic_poly(cycle(q))
        for r in range(q - 1):
            assert p.coeff(q - r) == (-1) ** r * math.comb(q, r), (q, r)
        r = q - 1
        assert p.coeff(q - r) - (-1) ** r * math.comb(q, r) == (-1) ** q, q


def _graph_corpus() -> list[Graph]:
    rng = random.Random(20261016)
    out = [complete(5), cycle(7), path(8), complete_bipartite(3, 4), kneser(5, 2),
           cartesian(complete(3), path(3)), cartesian_power(path(3), 2),
           johnson(5, 2), cycle(12)]
    while len(out) < 36:
        v = rng.randint(4, 12)
        p = rng.choice((0.2, 0.35, 0.5))
        edges = frozenset((a, b) for a, b in itertools.combinations(range(v), 2) if rng.random() < p)
        out.append(Graph(v, edges))
    return out


@criterion(3, "bond enumeration equals chromatic DP on 36 graphs, R<=3", 60)
def test_c03_bond_enumeration():
    corpus = _graph_corpus()
    assert len(corpus) >= 30
    for g in corpus:
        assert g.v <= 12
        p = chromatic_poly(g)
        R = min(3, g.v)
        assert list(chromatic_codegree(g, R)) == [p.coeff(g.v - r) for r in range(R + 1)], g


@criterion(4, "Kneser chromatic number and edge coefficient", 120)
def test_c04_kneser_chromatic():
    q, k = 5, 2
    p = chromatic_poly(kneser(q, k))
    first = next(n for n in range(0, 20) if p(n) > 0)
    assert first == q - 2 * k + 2
    for q, k in ((6, 2), (7, 3)):
        g = kneser(q, k)
        assert chromatic_codegree(g, 1)[1] == -len(g.edges), (q, k)


@criterion(5, "Kneser k=2 fit on q=5..9 predicts q=10,11 for r<=2", 300)
def test_c05_kneser_two_level_fit():
    values = {q: chromatic_codegree(kneser(q, 2), 2) for q in range(5, 12)}
    bad = []
    for r in range(3):
        phi = interpolate([(q, values[q][r]) for q in range(5, 10)])
        for q in (10, 11):
            if phi(q) != values[q][r]:
                bad.append((r, q))
    assert not bad, f"mispredicted (r, q): {bad}"


@criterion(6, "K_{q,q} and K_q x P_q closed forms vs chromatic DP", 120)
def test_c06_bipartite_and_prism_closed_forms():
    for q in range(0, 5):
        p = chromatic_poly(complete_bipartite(q, q))
        assert all(kqq_value(q, n) == p(n) for n in range(9)), q
    for q in range(1, 5):
        p = chromatic_poly(cartesian(complete(q), path(q)))
        cf = closedform_KqPq(q)
        assert all(cf(n) == p(n) for n in range(9)), q


@criterion(7, "partition displays, polynomial part, scaled table", 60)
def test_c07_partitions():
    f3 = partitions_quasipoly(3)
    tail3 = [0, -1, -4, 3, -4, -1]
    assert f3.period == 6
    assert all(f3.constituents[i] == (N * N + Poly.const(tail3[i])).scale(Fraction(1, 12))
               for i in range(6))
    f4 = partitions_quasipoly(4)
    tail4 = [0, 5, -20, -27, 32, -11, -36, 5, 16, -27, -4, -11]
    assert f4.period == 12
    for i in range(12):
        lin = 0 if i % 2 == 0 else -9
        want = N ** 3 + (N * N).scale(3) + N.scale(lin) + Poly.const(tail4[i])
        assert f4.constituents[i] == want.scale(Fraction(1, 144)), i
    for q in range(3, 7):
        rows = partitions_quasipoly(q).periodic_coeffs(q - 1)
        part = partitions_polynomial_part(q)
        for r in range(partitions_depth(q) + 1):
            assert set(rows[r]) == {part.coeff(q - 1 - r)}, (q, r)
    _, rep = partitions_scaled_twolevel(2, range(1, 12), range(12, 15))
    assert rep.ok, rep.to_json()
    assert rep.checked


@lru_cache(maxsize=None)
def _stirling2(n, k):
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


@criterion(8, "Sheffer presets and phi_r fits for r<=4", 30)
def test_c08_sheffer():
    for q in range(9):
        direct = Poly.const(1)
        for j in range(q):
            direct = direct * Poly([-j, 1])
        assert sheffer_poly(sheffer_preset("falling_factorial", 9), q) == direct, q
    for q in range(7):
        want = Poly([_stirling2(q, k) for k in range(q + 1)])
        assert sheffer_poly(sheffer_preset("touchard", 7), q) == want, q
    for name in SHEFFER_PRESETS:
        spec = sheffer_preset(name, 12)
        for r in range(5):
            _, rep = sheffer_codegree_poly(spec, r, range(0, 2 * r + 1), range(2 * r + 1, 2 * r + 4))
            assert rep.ok, (name, r, rep.to_json())


@criterion(9, "knights closed form, eventual monic polynomial, codegree-2 fit", 300)
def test_c09_knights():
    D, piece = ConflictSet.knights(), PieceSpec.knights()
    for q in range(0, 4):
        for n in range(0, 7):
            assert knights_closedform_count(D, q, n) == brute_force_ordered(piece, q, n), (q, n)
    pts = []
    for q in range(2, 7):
        start, deg = D.w * (q - 1) + 1, 2 * q
        samples = [(n, knights_closedform_count(D, q, n)) for n in range(start, start + deg + 4)]
        f = qp_fit(samples, deg, 1, start)
        assert f.degree == deg and f.codegree_coeff(0, 0, deg, 1) == 1, q
        pts.append((q, f.codegree_coeff(2, 0, deg, 1)))
    phi = interpolate(pts[:4])
    assert phi.degree <= 2
    assert phi(6) == pts[4][1]


@criterion(10, "queens and bicolor queens quasi-polynomial fits", 300)
def test_c10_queens():
    queens = catalog.oracle_for(catalog.parse_spec("queens"))
    for q in (2, 3):
        p = period_search(queens, q, 2 * q, 4, 0)
        f = fit_quasipoly(queens, q, 2 * q, p, 0, extra=2)
        assert f.degree == 2 * q
        held = range((2 * q + 3) * p, (2 * q + 3) * p + 2 * p)
        assert all(f(n) == queens.eval(q, n) for n in held), q
    bic = [(n, brute_force_bicolor(1, n)) for n in range(0, 9)]
    f = qp_fit(bic[:6], 4, 1, 0)
    assert f.degree == 4
    assert all(f(n) == v for n, v in bic[6:])
    d = catalog.FAMILIES["queens"].defaults({})
    _, rep = detect_two_level(queens, DetectConfig(d.fit, d.test, d.R, d.degree_bound))
    assert rep.ok, rep.to_json()


@criterion(11, "ordered Sidon tuples", 120)
def test_c11_sidon():
    assert all(count_ordered_sidon(2, n) == (n + 1) * n for n in range(31))
    sidon = catalog.oracle_for(catalog.parse_spec("sidon"))
    for q in (3, 4):
        p = period_search(sidon, q, q, 12, 0)
        f = fit_quasipoly(sidon, q, q, p, 0, extra=2)
        assert f.degree == q
        end = (q + 3) * p
        assert all(f(n) == count_ordered_sidon(q, n) for n in range(end, end + p)), q
    for q in range(0, 6):
        assert all(count_ordered_sidon(q, n) % math.factorial(q) == 0 for n in range(31)), q


@criterion(12, "algebra law suite, 200 randomized instances", 30)
def test_c12_algebra_laws():
    rep = run_laws(200, seed=0)
    assert rep.ok, rep.failures[:3]
    laws = {k.split(".")[0] for k in rep.counts}
    assert {"product", "power", "compose", "sequence", "eval", "example"} <= laws
    assert rep.counts["power.monic"] > 0
    assert rep.counts["example.binomial_power"] == 5
    assert rep.counts["example.geometric_sum.rows"] == 1
