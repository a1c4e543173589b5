"""Randomized law suite for the two-level algebra.

Every law compares the formal table produced by an operation with the same
codegree coefficients read off a direct polynomial computation in n at
concrete q. Random objects have degree a*q + b with b >= R, so no stored row
ever sits below n^0 and the direct computation is exact.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .core_math import Poly, binomial
from .twolevel import (
    DepthExpr,
    TwoLevelQP,
    tl_compose_poly,
    tl_eval_truncated,
    tl_n_power,
    tl_power,
    tl_product,
    tl_sum_sequence,
)

Q_VALUES = range(0, 4)
BUGS = ("product", "power", "compose")


@dataclass
class LawReport:
    seed: int
    trials: int
    counts: dict = field(default_factory=dict)  # law -> checks run
    failures: list = field(default_factory=list)  # (trial, law, detail)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "status": "pass" if self.ok else "fail",
            "seed": self.seed,
            "trials": self.trials,
            "checks": dict(sorted(self.counts.items())),
            "failures": [{"trial": t, "law": law, "detail": d} for t, law, d in self.failures],
        }


def _rand_poly(rng: random.Random, deg: int, span: int = 3) -> Poly:
    return Poly([rng.randint(-span, span) for _ in range(deg + 1)])


def _rand_periods(rng: random.Random, R: int) -> list[int]:
    out = [rng.choice((1, 1, 2))]
    for _ in range(R):
        p = out[-1]
        out.append(p * rng.choice((1, 1, 2, 3)) if p < 4 else p)
    return out


def random_object(rng: random.Random, R: int, monic: bool = False, lead: int = 1) -> TwoLevelQP:
    a = rng.randint(0, 2)
    b = rng.randint(R, R + 2)
    periods = _rand_periods(rng, R)
    table = []
    for r in range(R + 1):
        if r == 0:
            c = Poly.const(1 if monic else lead)
            table.append([c] * periods[0])
        else:
            table.append([_rand_poly(rng, rng.randint(0, 2)) for _ in range(periods[r])])
    if rng.random() < 0.5:
        depth = DepthExpr.infinite()
    else:
        depth = DepthExpr.affine(rng.randint(0, 2), rng.randint(0, 3))
    return TwoLevelQP(Poly([b, a]), depth, R, periods, table)


def slice_poly(f: TwoLevelQP, q: int, i: int, rows: Optional[int] = None) -> Poly:
    """sum_r phi_{r,i}(q) n^(g(q)-r) over stored rows (ignoring depth)."""
    g = int(f.degree_g(q))
    top = f.R if rows is None else rows
    acc = Poly()
    for r in range(min(top, g) + 1):
        acc = acc + Poly.monomial(g - r, f.phi(r, i)(q))
    return acc


def _codegree(p: Poly, g: int, r: int) -> Fraction:
    return p.coeff(g - r)


def _top_period(f: TwoLevelQP) -> int:
    return f.periods[f.R]


def _corrupt(f: TwoLevelQP) -> TwoLevelQP:
    table = [list(row) for row in f.table]
    r = min(1, f.R)
    table[r][0] = table[r][0] + Poly.const(1)
    return TwoLevelQP(f.degree_g, f.depth, f.R, f.periods, table, f.oracle, f.zero_factor)


class _Runner:
    def __init__(self, report: LawReport, trial: int):
        self.rep = report
        self.trial = trial

    def check(self, law: str, cond: bool, detail: Callable[[], str]) -> None:
        self.rep.counts[law] = self.rep.counts.get(law, 0) + 1
        if not cond:
            self.rep.failures.append((self.trial, law, detail()))


def _law_product(rng, run: _Runner, bug: Optional[str]) -> None:
    R = rng.randint(1, 3)
    f, g = random_object(rng, R), random_object(rng, R)
    h = tl_product(f, g)
    if bug == "product":
        h = _corrupt(h)
    run.check("product.degree", h.degree_g == f.degree_g + g.degree_g, lambda: repr(h.degree_g))
    run.check("product.depth", h.depth == f.depth.min(g.depth), lambda: repr(h.depth))
    run.check(
        "product.period",
        all(h.periods[r] == math.lcm(f.periods[r], g.periods[r]) for r in range(R + 1)),
        lambda: str(h.periods),
    )
    P = _top_period(h)
    for q in Q_VALUES:
        gq = int(h.degree_g(q))
        for i in range(P):
            direct = slice_poly(f, q, i) * slice_poly(g, q, i)
            for r in range(R + 1):
                want, got = _codegree(direct, gq, r), h.phi(r, i)(q)
                run.check("product.coeff", want == got,
                          lambda: f"q={q} i={i} r={r}: {want} != {got}")


def _law_power(rng, run: _Runner, bug: Optional[str]) -> None:
    R = rng.randint(1, 3)
    lead = rng.choice((1, 2, -1))
    f = random_object(rng, R, lead=lead)
    e = rng.choice((Poly.x(), Poly.const(rng.randint(1, 3)), Poly([1, 1])))
    h = tl_power(f, e)
    if bug == "power":
        h = _corrupt(h)
    run.check("power.degree", h.degree_g == f.degree_g * e, lambda: repr(h.degree_g))
    run.check("power.depth", h.depth == f.depth, lambda: repr(h.depth))
    run.check("power.period", list(h.periods) == list(f.periods), lambda: str(h.periods))
    run.check("power.monic", all(p == Poly.const(1) for p in h.table[0]),
              lambda: str(h.table[0]))
    P = _top_period(h)
    for q in range(0, 3):
        k = int(e(q))
        gq = int(h.degree_g(q))
        for i in range(P):
            direct = (slice_poly(f, q, i) ** k).scale(Fraction(1, lead ** k))
            for r in range(R + 1):
                want, got = _codegree(direct, gq, r), h.phi(r, i)(q)
                run.check("power.coeff", want == got,
                          lambda: f"q={q} i={i} r={r} e={k}: {want} != {got}")


def _law_compose(rng, run: _Runner, bug: Optional[str]) -> None:
    R = rng.randint(0, 2)
    f = random_object(rng, R)
    d = rng.randint(1, 2)
    lead = rng.choice((1, 2))
    h = Poly([rng.randint(-2, 2) for _ in range(d)] + [lead])
    out = tl_compose_poly(f, h)
    if bug == "compose":
        out = _corrupt(out)
    run.check("compose.degree", out.degree_g == f.degree_g.scale(d), lambda: repr(out.degree_g))
    run.check("compose.depth", out.depth == f.depth.compose_degree(d), lambda: repr(out.depth))
    run.check("compose.truncation", out.R == d * R + d - 1, lambda: str(out.R))
    P = _top_period(out)
    for q in Q_VALUES:
        g = int(f.degree_g(q))
        gq = int(out.degree_g(q))
        for i in range(P):
            hi = int(h(i))
            direct = slice_poly(f, q, hi).compose(h).scale(Fraction(1, lead ** g))
            for r in range(out.R + 1):
                want, got = _codegree(direct, gq, r), out.phi(r, i)(q)
                run.check("compose.coeff", want == got,
                          lambda: f"q={q} i={i} r={r} h={h.format('n')}: {want} != {got}")


def _law_sequence(rng, run: _Runner, bug: Optional[str]) -> None:
    R = rng.randint(1, 3)
    base = random_object(rng, R + 2)
    g = base.degree_g
    terms = []
    for d in range(R + 1):
        t = random_object(rng, R)
        terms.append((d, TwoLevelQP(g - Poly.const(d), t.depth, R, t.periods, t.table)))
    s = tl_sum_sequence(terms, R)
    P = _top_period(s)
    for q in Q_VALUES:
        gq = int(g(q))
        for i in range(P):
            direct = Poly()
            for _, t in terms:
                direct = direct + slice_poly(t, q, i)
            for r in range(R + 1):
                want, got = _codegree(direct, gq, r), s.phi(r, i)(q)
                run.check("sequence.coeff", want == got,
                          lambda: f"q={q} i={i} r={r}: {want} != {got}")


def _law_eval(rng, run: _Runner, bug: Optional[str]) -> None:
    """With R >= total degree, truncated evaluation is exact and multiplicative."""
    R = 6

    def full(deg: int) -> TwoLevelQP:
        rows = [[Poly.const(1)]] + [[_rand_poly(rng, 1) if r <= deg else Poly()] for r in range(1, R + 1)]
        return TwoLevelQP(Poly.const(deg), DepthExpr.infinite(), R, [1] * (R + 1), rows)

    f, g = full(rng.randint(0, 3)), full(rng.randint(0, 3))
    h = tl_product(f, g)
    if bug == "product":
        h = _corrupt(h)
    for q in range(0, 3):
        for n in range(-2, 4):
            a, _ = tl_eval_truncated(f, q, n)
            b, _ = tl_eval_truncated(g, q, n)
            c, _ = tl_eval_truncated(h, q, n)
            run.check("eval.product", a * b == c, lambda: f"q={q} n={n}: {a}*{b} != {c}")


def worked_examples(run: _Runner) -> None:
    """(n+1)^q rows are C(q, r); the geometric sum has every row 1 and depth q."""
    from .closedforms import binomial_power, geometric_sum

    bp = binomial_power(4)
    for r in range(5):
        run.check("example.binomial_power",
                  all(bp.phi(r, 0)(q) == binomial(q, r) for q in range(10)),
                  lambda: f"r={r}: {bp.phi(r, 0).format('q')}")
    gs = geometric_sum(4)
    run.check("example.geometric_sum.rows", all(gs.phi(r, 0) == Poly.const(1) for r in range(5)),
              lambda: str(gs.table))
    run.check("example.geometric_sum.depth", gs.depth == DepthExpr.affine(1, 0),
              lambda: repr(gs.depth))
    for q in range(6):
        for n in range(0, 5):
            val, used = tl_eval_truncated(gs, q, n)
            want = sum(Fraction(n) ** (q - r) for r in range(int(used) + 1))
            run.check("example.geometric_sum.eval", val == want, lambda: f"q={q} n={n}")
    # n^q as a pure power is monic with empty lower rows
    np_ = tl_n_power(Poly.x(), 2)
    run.check("example.n_power", np_.table[1][0].is_zero() and np_.table[2][0].is_zero(),
              lambda: str(np_.table))


LAWS = (_law_product, _law_power, _law_compose, _law_sequence, _law_eval)


def run_laws(trials: int = 200, seed: int = 0, bug: Optional[str] = None) -> LawReport:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if bug is not None and bug not in BUGS:
        raise ValueError(f"unknown injected bug {bug!r}; choose from {', '.join(BUGS)}")
    rep = LawReport(seed, trials)
    worked_examples(_Runner(rep, -1))
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        law = LAWS[t % len(LAWS)]
        law(rng, _Runner(rep, t), bug)
    return rep
