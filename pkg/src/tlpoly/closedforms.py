"""Closed-form two-level constructors built from the algebra in :mod:`twolevel`.

Each constructor returns a truncated :class:`TwoLevelQP`; the matching
exact evaluators live in :mod:`catalog` and the tests compare the two.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .core_math import Poly, falling_factorial
from .twolevel import (
    DepthExpr,
    TwoLevelQP,
    tl_add,
    tl_n_power,
    tl_power,
    tl_product,
    tl_scalar_mul,
    tl_substitute_q,
    tl_sum_sequence,
)

Q = Poly.x()


@lru_cache(maxsize=None)
def derangements_by_cycles(a: int, k: int) -> int:
    """Permutations of [a] with no fixed point and exactly k cycles."""
    if a == 0:
        return 1 if k == 0 else 0
    if a == 1 or k == 0:
        return 0
    return (a - 1) * (derangements_by_cycles(a - 1, k) + derangements_by_cycles(a - 2, k - 1))


def rising_factorial_coeff(r: int) -> Poly:
    """phi_r(q) = sum_a C(q, a) * #{derangements of [a] with a - r cycles}.

    Since a derangement of [a] has at most a/2 cycles, only a <= 2r contribute.
    """
    acc = Poly()
    for a in range(r, 2 * r + 1):
        cnt = derangements_by_cycles(a, a - r)
        if cnt:
            acc = acc + Poly.binomial(a).scale(cnt)
    return acc


def _from_coeff_rows(rows: list[Poly], degree: Poly, R: int) -> TwoLevelQP:
    """sum_r rows[r](q) n^(g(q) - r) as a sequence sum of scaled pure powers."""
    terms = []
    for r, phi in enumerate(rows):
        base = tl_n_power(degree - Poly.const(r), R)
        terms.append((r, tl_scalar_mul(phi, base)))
    return tl_sum_sequence(terms, R)


def rising_factorial(R: int) -> TwoLevelQP:
    """n(n+1)...(n+q-1): degree q, infinite depth."""
    rows = [rising_factorial_coeff(r) for r in range(R + 1)]
    return _from_coeff_rows(rows, Q, R).with_oracle("rising-factorial")


def falling_factorial_tl(R: int) -> TwoLevelQP:
    """(n)_q = n(n-1)...(n-q+1); same table as the rising one up to (-1)^r."""
    rows = [rising_factorial_coeff(r).scale((-1) ** r) for r in range(R + 1)]
    return _from_coeff_rows(rows, Q, R).with_oracle("falling-factorial")


def linear_object(shift: Poly, R: int) -> TwoLevelQP:
    """n + shift(q), a degree-one object."""
    table = [[Poly.const(1)], [shift]] + [[Poly()] for _ in range(R - 1)]
    table = table[: R + 1]
    return TwoLevelQP(Poly.const(1), DepthExpr.infinite(), R, [1] * (R + 1), table)


def binomial_power(R: int, shift: int = 1) -> TwoLevelQP:
    """(n + shift)^q via tl_power; phi_r = C(q, r) shift^r."""
    return tl_power(linear_object(Poly.const(shift), R), Q).with_oracle("binomial-power")


def geometric_sum(R: int) -> TwoLevelQP:
    """n^q + n^(q-1) + ... + 1: every row 1, depth q."""
    return _from_coeff_rows([Poly.const(1)] * (R + 1), Q, R).with_oracle("geometric-sum")


def cycle_chromatic(R: int) -> TwoLevelQP:
    """chi of the q-cycle: the (n-1)^q table, exact only through codegree q-2."""
    base = tl_power(linear_object(Poly.const(-1), R), Q)
    return TwoLevelQP(
        base.degree_g, DepthExpr.affine(1, -2), R, base.periods, base.table,
        "cq-chromatic",
    )


# -- complete bipartite K_{q,q} ---------------------------------------------

def partition_types(a: int, min_part: int = 2) -> list[tuple[int, ...]]:
    """Integer partitions of a into parts >= min_part, parts nonincreasing."""
    out: list[tuple[int, ...]] = []

    def rec(left: int, cap: int, acc: list[int]) -> None:
        if left == 0:
            out.append(tuple(acc))
            return
        for part in range(min(left, cap), min_part - 1, -1):
            acc.append(part)
            rec(left - part, part, acc)
            acc.pop()

    rec(a, a, [])
    return out


def type_constant(t: tuple[int, ...]) -> int:
    """c_t = prod_j (t_j!)^(e_j) e_j! over distinct part sizes t_j with multiplicity e_j."""
    c = 1
    for size in set(t):
        e = t.count(size)
        c *= math.factorial(size) ** e * math.factorial(e)
    return c


def kqq_terms(a_max: int) -> list[tuple[int, Poly]]:
    """(r_t, (q)_a / c_t) for every type t with a <= a_max, sorted by r_t."""
    terms = []
    for a in range(a_max + 1):
        fall = Poly.falling(a)
        for t in partition_types(a):
            terms.append((a - len(t), fall.scale(Fraction(1, type_constant(t)))))
    terms.sort(key=lambda x: x[0])
    return terms


def closedform_Kqq(R: int) -> TwoLevelQP:
    """chi of K_{q,q}: sum over types t of (q)_a/c_t (n)_(q-r_t) (n-q+r_t)^q.

    A type with offset r_t only reaches codegrees >= r_t >= a/2, so a <= 2R.
    """
    fall = falling_factorial_tl(R)
    grouped: dict[int, TwoLevelQP] = {}
    for r, scal in kqq_terms(2 * R):
        if r > R:
            continue
        lower = tl_substitute_q(fall, -r)
        power = tl_power(linear_object(Poly([r, -1]), R), Q)
        term = tl_scalar_mul(scal, tl_product(lower, power))
        grouped[r] = term if r not in grouped else tl_add(grouped[r], term)
    terms = sorted(grouped.items())
    return tl_sum_sequence(terms, R).with_oracle("kqq-chromatic")


def kqq_value(q: int, n: int) -> int:
    """Direct evaluation of the K_{q,q} formula (all types, no truncation)."""
    total = Fraction(0)
    for r, scal in kqq_terms(q):
        total += scal(q) * falling_factorial(n, q - r) * (n - q + r) ** q
    return int(total)


# -- K_q x P_q ---------------------------------------------------------------

def closedform_KqPq(q: int) -> Poly:
    """(n)_q g_q(n)^(q-1) with g_q(n) = sum_a (-1)^a C(q,a) (n-a)_(q-a)."""
    if q < 1:
        raise ValueError(f"K_q x P_q needs q >= 1, got {q}")
    g = Poly()
    for a in range(q + 1):
        g = g + Poly.falling(q - a, shift=a).scale((-1) ** a * math.comb(q, a))
    return Poly.falling(q) * g ** (q - 1)
