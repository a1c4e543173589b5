"""Truncated two-level quasi-polynomials and their algebra.

An object stores the degree g(q), a depth expression e(q), a truncation order R,
a period chain p(0) | p(1) | ... | p(R) and the coefficient polynomials
phi[r][i](q), so that for q with r <= min(R, e(q)) the codegree-r coefficient of
f_q(n) at n = i (mod p(r)) is phi[r][i](q).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .core_math import Poly, is_numerical
from .quasipoly import FitError, InsufficientSamples, QuasiPoly, qp_fit
from .report import FitReport, Mismatch

INF = math.inf


class DepthExpr:
    """min over branches; a branch (a, b, c) stands for floor((a*q + b) / c).

    No branches means infinite depth. Pairs (a, b) are accepted as c = 1.
    """

    __slots__ = ("branches",)

    def __init__(self, branches: Iterable = (None,)):
        bs = set()
        for br in branches:
            if br is None or br == "inf":
                continue
            a, b, *rest = br
            c = int(rest[0]) if rest else 1
            if c < 1:
                raise ValueError("depth divisor must be positive")
            bs.add((int(a), int(b), c))
        object.__setattr__(self, "branches", frozenset(bs))

    def __setattr__(self, name, value):
        raise AttributeError("DepthExpr is immutable")

    @classmethod
    def infinite(cls) -> "DepthExpr":
        return cls()

    @classmethod
    def affine(cls, a: int, b: int, c: int = 1) -> "DepthExpr":
        return cls([(a, b, c)])

    def is_infinite(self) -> bool:
        return not self.branches

    def __call__(self, q: int) -> float:
        if not self.branches:
            return INF
        return min((a * q + b) // c for a, b, c in self.branches)

    def min(self, other: "DepthExpr") -> "DepthExpr":
        return DepthExpr(self.branches | other.branches)

    def shift(self, k: int) -> "DepthExpr":
        return DepthExpr((a, b + k * c, c) for a, b, c in self.branches)

    def compose_degree(self, d: int) -> "DepthExpr":
        """Branch map x -> d*x + d - 1 (exact for c = 1, a lower bound otherwise)."""
        return DepthExpr(
            (d * a, d * b - d * (c - 1) + c * (d - 1), c) for a, b, c in self.branches
        )

    def substitute(self, s: int) -> "DepthExpr":
        """q -> q + s."""
        return DepthExpr((a, b + a * s, c) for a, b, c in self.branches)

    def __eq__(self, other) -> bool:
        return isinstance(other, DepthExpr) and self.branches == other.branches

    def __hash__(self) -> int:
        return hash(self.branches)

    def __repr__(self) -> str:
        return f"DepthExpr({_depth_str(self)})"

    def to_json(self) -> list:
        if not self.branches:
            return ["inf"]
        return [[a, b] if c == 1 else [a, b, c] for a, b, c in sorted(self.branches)]

    @classmethod
    def from_json(cls, data: list) -> "DepthExpr":
        return cls(None if b == "inf" else tuple(b) for b in data)


def check_period_chain(periods: Sequence[int]) -> None:
    for r in range(len(periods) - 1):
        if periods[r] < 1 or periods[r + 1] % periods[r]:
            raise ValueError(f"period chain {list(periods)} breaks divisibility at r={r}")


@dataclass(frozen=True)
class OracleHandle:
    """Exact evaluator for a family f_q(n), with per-codegree validity thresholds."""

    family: str
    params: dict
    fn: Callable[[int, int], object]
    n_min_fn: Callable[[int, int], int] = lambda q, r: 0
    degree_fn: Optional[Callable[[int], int]] = None
    period_fn: Optional[Callable[[int], int]] = None
    # optional direct source of codegree coefficients c_0..c_R (period one), for
    # instances too large to sample and fit
    coeff_fn: Optional[Callable[[int, int], Sequence]] = None

    def eval(self, q: int, n: int) -> Fraction:
        return Fraction(self.fn(q, n))

    def n_min(self, q: int, r: int) -> int:
        return self.n_min_fn(q, r)

    def label(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.family}:{args}" if args else self.family


class TwoLevelQP:
    __slots__ = ("degree_g", "depth", "R", "periods", "table", "oracle", "zero_factor")

    def __init__(
        self,
        degree_g: Poly,
        depth: DepthExpr,
        R: int,
        periods: Sequence[int],
        table: Sequence[Sequence[Poly]],
        oracle: Optional[str] = None,
        zero_factor: Optional[Poly] = None,
    ):
        if R < 0:
            raise ValueError("truncation order must be >= 0")
        if not is_numerical(degree_g):
            raise ValueError(f"degree {degree_g} is not a numerical polynomial")
        periods = tuple(int(p) for p in periods)
        if len(periods) != R + 1 or len(table) != R + 1:
            raise ValueError("periods and table must have R+1 rows")
        check_period_chain(periods)
        rows = []
        for r, row in enumerate(table):
            if len(row) != periods[r]:
                raise ValueError(f"row {r} has {len(row)} entries, period is {periods[r]}")
            rows.append(tuple(p if isinstance(p, Poly) else Poly.const(p) for p in row))
        for name, value in (
            ("degree_g", degree_g),
            ("depth", depth),
            ("R", R),
            ("periods", periods),
            ("table", tuple(rows)),
            ("oracle", oracle),
            ("zero_factor", zero_factor),
        ):
            object.__setattr__(self, name, value)

    def __setattr__(self, name, value):
        raise AttributeError("TwoLevelQP is immutable")

    def phi(self, r: int, i: int) -> Poly:
        return self.table[r][i % self.periods[r]]

    def period(self, r: int) -> int:
        return self.periods[min(r, self.R)]

    def expanded_row(self, r: int, period: int) -> list[Poly]:
        return [self.phi(r, i) for i in range(period)]

    def truncate(self, R: int) -> "TwoLevelQP":
        if R > self.R:
            raise ValueError(f"cannot extend truncation from {self.R} to {R}")
        return TwoLevelQP(
            self.degree_g, self.depth, R, self.periods[: R + 1], self.table[: R + 1],
            self.oracle, self.zero_factor,
        )

    def with_oracle(self, oracle: Optional[str]) -> "TwoLevelQP":
        return TwoLevelQP(
            self.degree_g, self.depth, self.R, self.periods, self.table, oracle,
            self.zero_factor,
        )

    def effective_depth(self, q: int) -> float:
        """Depth at q, with e = -1 outside S and the vanishing-scalar refinement."""
        if self.degree_g(q) < 0:
            return -1
        if self.zero_factor is not None and self.zero_factor(q) == 0:
            return INF
        return self.depth(q)

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.table for p in row)

    def same_table(self, other: "TwoLevelQP") -> bool:
        if self.R != other.R:
            return False
        for r in range(self.R + 1):
            p = math.lcm(self.periods[r], other.periods[r])
            if self.expanded_row(r, p) != other.expanded_row(r, p):
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoLevelQP):
            return NotImplemented
        return (
            self.degree_g == other.degree_g
            and self.depth == other.depth
            and self.same_table(other)
        )

    def __hash__(self) -> int:
        return hash((self.degree_g, self.depth, self.R))

    def __repr__(self) -> str:
        return (
            f"TwoLevelQP(g={self.degree_g.format('q')}, depth={self.depth!r}, "
            f"R={self.R}, periods={list(self.periods)})"
        )

    def describe(self) -> str:
        lines = [
            f"degree g(q) = {self.degree_g.format('q')}",
            f"depth e(q) = {_depth_str(self.depth)}",
            f"truncation R = {self.R}",
            f"periods = {list(self.periods)}",
        ]
        for r in range(self.R + 1):
            for i, p in enumerate(self.table[r]):
                tag = f"phi[{r}]" if self.periods[r] == 1 else f"phi[{r},{i}]"
                lines.append(f"{tag}(q) = {p.format('q')}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "degree_g": self.degree_g.to_json(),
            "depth": self.depth.to_json(),
            "R": self.R,
            "periods": list(self.periods),
            "table": [[p.to_json() for p in row] for row in self.table],
            "oracle": self.oracle,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TwoLevelQP":
        return cls(
            Poly.from_json(data["degree_g"]),
            DepthExpr.from_json(data["depth"]),
            data["R"],
            data["periods"],
            [[Poly.from_json(p) for p in row] for row in data["table"]],
            data.get("oracle"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _depth_str(d: DepthExpr) -> str:
    if d.is_infinite():
        return "inf"
    parts = []
    for a, b, c in sorted(d.branches):
        body = Poly([b, a]).format("q")
        parts.append(body if c == 1 else f"floor(({body})/{c})")
    return parts[0] if len(parts) == 1 else "min(" + ", ".join(parts) + ")"


# -- constructors ----------------------------------------------------------

def tl_zero(R: int = 0, degree_g: Poly | None = None) -> TwoLevelQP:
    g = degree_g if degree_g is not None else Poly()
    return TwoLevelQP(g, DepthExpr.infinite(), R, [1] * (R + 1), [[Poly()] for _ in range(R + 1)])


def tl_from_q_polynomial(phi: Poly, R: int = 0) -> TwoLevelQP:
    """f_q(n) = phi(q): degree zero, infinite depth."""
    table = [[phi]] + [[Poly()] for _ in range(R)]
    return TwoLevelQP(Poly(), DepthExpr.infinite(), R, [1] * (R + 1), table)


def tl_from_quasipoly(f: QuasiPoly, R: int | None = None) -> TwoLevelQP:
    """A quasi-polynomial in n viewed as a constant-degree two-level object."""
    d = int(f.degree) if f.degree >= 0 else 0
    if R is None:
        R = d
    p = f.period
    table = []
    for r in range(R + 1):
        table.append([Poly.const(c.coeff(d - r)) for c in f.constituents])
    return TwoLevelQP(Poly.const(d), DepthExpr.infinite(), R, [p] * (R + 1), table)


def tl_from_bivariate(rows: Sequence[Sequence[Poly]], degree: int, R: int | None = None) -> TwoLevelQP:
    """f(n, q) polynomial in q, quasi-polynomial in n of constant degree.

    ``rows[r][i]`` is the q-polynomial multiplying n^(degree-r) at residue i.
    """
    if R is None:
        R = degree
    p0 = 1
    for row in rows:
        p0 = math.lcm(p0, len(row))
    table = []
    for r in range(R + 1):
        if r < len(rows):
            row = rows[r]
            table.append([row[i % len(row)] for i in range(p0)])
        else:
            table.append([Poly()] * p0)
    return TwoLevelQP(Poly.const(degree), DepthExpr.infinite(), R, [p0] * (R + 1), table)


def tl_n_power(g: Poly, R: int) -> TwoLevelQP:
    """n^(g(q)); zero outside {g(q) >= 0}."""
    table = [[Poly.const(1)]] + [[Poly()] for _ in range(R)]
    return TwoLevelQP(g, DepthExpr.infinite(), R, [1] * (R + 1), table)


def tl_from_n_poly(h: Poly, R: int | None = None) -> TwoLevelQP:
    """A fixed polynomial h(n) (independent of q)."""
    return tl_from_quasipoly(QuasiPoly([h]), R)


def tl_substitute_q(f: TwoLevelQP, s: int) -> TwoLevelQP:
    """f_{q+s}(n), i.e. every q-polynomial composed with q + s."""
    shift = Poly([s, 1])
    return TwoLevelQP(
        f.degree_g.compose(shift),
        f.depth.substitute(s),
        f.R,
        f.periods,
        [[p.compose(shift) for p in row] for row in f.table],
        None,
        f.zero_factor.compose(shift) if f.zero_factor is not None else None,
    )


# -- algebra ---------------------------------------------------------------

def tl_product(f: TwoLevelQP, g: TwoLevelQP) -> TwoLevelQP:
    R = min(f.R, g.R)
    periods = [math.lcm(f.periods[r], g.periods[r]) for r in range(R + 1)]
    table = []
    for r in range(R + 1):
        row = []
        for i in range(periods[r]):
            acc = Poly()
            for s in range(r + 1):
                a, b = f.phi(s, i), g.phi(r - s, i)
                if not a.is_zero() and not b.is_zero():
                    acc = acc + a * b
            row.append(acc)
        table.append(row)
    zf = None
    if f.zero_factor is not None or g.zero_factor is not None:
        zf = (f.zero_factor or Poly.const(1)) * (g.zero_factor or Poly.const(1))
    return TwoLevelQP(
        f.degree_g + g.degree_g, f.depth.min(g.depth), R, periods, table, None, zf
    )


def tl_scalar_mul(h: Poly, f: TwoLevelQP) -> TwoLevelQP:
    if h.is_zero():
        return tl_zero(f.R, f.degree_g)
    zf = h if f.zero_factor is None else h * f.zero_factor
    if h.is_constant():
        zf = f.zero_factor
    return TwoLevelQP(
        f.degree_g,
        f.depth,
        f.R,
        f.periods,
        [[h * p for p in row] for row in f.table],
        None,
        zf,
    )


def tl_add(f: TwoLevelQP, g: TwoLevelQP) -> TwoLevelQP:
    """Sum of two objects with the same degree function (no cancellation check)."""
    if f.degree_g != g.degree_g:
        raise ValueError("tl_add needs equal degree functions; use tl_sum_sequence")
    R = min(f.R, g.R)
    periods = [math.lcm(f.periods[r], g.periods[r]) for r in range(R + 1)]
    table = [
        [f.phi(r, i) + g.phi(r, i) for i in range(periods[r])] for r in range(R + 1)
    ]
    return TwoLevelQP(f.degree_g, f.depth.min(g.depth), R, periods, table)


def _binomial_in(h: Poly, s: int) -> Poly:
    """C(h(q), s) as a polynomial in q."""
    return Poly.binomial(s).compose(h)


def _power_rows(
    lower: Sequence[Poly], c: Fraction, exponent: Poly, R: int
) -> list[Poly]:
    """Codegree rows 0..R of (1 + sum_j lower[j-1]/c z^j)^exponent.

    ``lower[j-1]`` is the codegree-j coefficient; the result is the normalized
    power's coefficient table for a single residue class.
    """
    u = [Poly()] + [lower[j - 1].scale(Fraction(1) / c) if j - 1 < len(lower) else Poly() for j in range(1, R + 1)]
    out = [Poly()] * (R + 1)
    out[0] = Poly.const(1)
    us = [Poly.const(1)] + [Poly()] * R  # u^0 truncated
    for s in range(1, R + 1):
        nxt = [Poly()] * (R + 1)
        for a in range(R + 1):
            if us[a].is_zero():
                continue
            for b in range(1, R + 1 - a):
                if not u[b].is_zero():
                    nxt[a + b] = nxt[a + b] + us[a] * u[b]
        us = nxt
        if all(p.is_zero() for p in us):
            break
        coeff = _binomial_in(exponent, s)
        for r in range(s, R + 1):
            if not us[r].is_zero():
                out[r] = out[r] + coeff * us[r]
    return out


def leading_constant(f: TwoLevelQP) -> Fraction:
    vals = set(f.table[0])
    if len(vals) != 1:
        raise ValueError("leading coefficient depends on n mod p(0)")
    lead = vals.pop()
    if not lead.is_constant() or lead.is_zero():
        raise ValueError(
            f"leading coefficient {lead.format('q')} is not a nonzero constant; "
            "the power would not be two-level"
        )
    return lead.coeffs[0]


def tl_power(f: TwoLevelQP, h: Poly) -> TwoLevelQP:
    """f_q(n)^h(q) / c^h(q) where c is the constant leading coefficient of f."""
    c = leading_constant(f)
    R = f.R
    periods = list(f.periods)
    table = []
    per_residue = {}
    top = periods[R]
    for i in range(top):
        lower = [f.phi(j, i) for j in range(1, R + 1)]
        per_residue[i] = _power_rows(lower, c, h, R)
    for r in range(R + 1):
        table.append([per_residue[i][r] for i in range(periods[r])])
    return TwoLevelQP(f.degree_g * h, f.depth, R, periods, table)


def tl_sum_sequence(
    terms: Sequence[tuple[int, TwoLevelQP]], R: int | None = None
) -> TwoLevelQP:
    """Sum of f^(t) with degree g - d_t; the list must hold every term with d_t <= R."""
    if not terms:
        raise ValueError("empty term list")
    offsets = [d for d, _ in terms]
    if offsets[0] != 0 or (len(offsets) > 1 and offsets[1] <= 0):
        raise ValueError("offsets must satisfy d_0 = 0 < d_1")
    if any(offsets[k] > offsets[k + 1] for k in range(len(offsets) - 1)):
        raise ValueError("offsets must be nondecreasing")
    g = terms[0][1].degree_g
    for d, f in terms:
        if f.degree_g != g - Poly.const(d):
            raise ValueError(
                f"term at offset {d} has degree {f.degree_g.format('q')}, "
                f"expected {(g - Poly.const(d)).format('q')}"
            )
    cap = min(f.R + d for d, f in terms)
    R = cap if R is None else min(R, cap)
    periods = []
    for r in range(R + 1):
        p = 1
        for d, f in terms:
            if d <= r:
                p = math.lcm(p, f.period(r - d))
        periods.append(p)
    # keep the chain nested
    for r in range(1, R + 1):
        periods[r] = math.lcm(periods[r], periods[r - 1])
    table = []
    for r in range(R + 1):
        row = []
        for i in range(periods[r]):
            acc = Poly()
            for d, f in terms:
                if d <= r:
                    acc = acc + f.phi(r - d, i)
            row.append(acc)
        table.append(row)
    depth = DepthExpr.infinite()
    for d, f in terms:
        depth = depth.min(f.depth.shift(d))
        gate = _outside_support_bound(g, d, f, R)
        if gate is not None:
            depth = depth.min(gate)
    return TwoLevelQP(g, depth, R, periods, table)


def _outside_support_bound(g: Poly, d: int, f: TwoLevelQP, R: int) -> DepthExpr | None:
    """Depth branch forced by a term that is zero (depth -1) where g(q) < d.

    Terms whose stored coefficients all vanish at those q contribute nothing
    (the vanishing-scalar case); otherwise depth is capped by g(q) for affine g,
    or by the constant d - 1.
    """
    if d == 0:
        return None
    bad = _q_below(g, d)
    if bad is None:
        offending = any(not p.is_zero() for row in f.table for p in row)
    else:
        offending = any(p(q) != 0 for q in bad for row in f.table for p in row)
    if not offending:
        return None
    if g.degree == 1 and g.coeff(1) >= 1:
        return DepthExpr.affine(int(g.coeff(1)), int(g.coeff(0)))
    return DepthExpr.affine(0, d - 1)


def _q_below(g: Poly, d: int) -> list[int] | None:
    """All q >= 0 with g(q) < d, or None if that set is infinite."""
    if g.is_constant():
        return None if g(0) < d else []
    if g.leading() < 0:
        return None
    h = g - Poly.const(d)
    bound = 1 + max(abs(c) for c in h.coeffs[:-1]) / h.leading()
    return [q for q in range(int(bound) + 1) if g(q) < d]


def tl_compose_poly(f: TwoLevelQP, h: Poly) -> TwoLevelQP:
    """f_q(h(n)) / c^g(q) for h of degree d > 0 with leading coefficient c."""
    if h.degree < 1:
        raise ValueError("composition needs a non-constant h")
    if any(x.denominator != 1 for x in h.coeffs):
        raise ValueError("composition needs h with integer coefficients")
    d = int(h.degree)
    c = h.leading()
    Rin = f.R
    Rout = d * Rin + d - 1
    lower_h = [Poly.const(h.coeff(d - j)) for j in range(1, d + 1)]
    # power rows of (h/c)^(g - s) for each s, shared across residues
    power_rows = {
        s: _power_rows(lower_h, c, f.degree_g - Poly.const(s), Rout)
        for s in range(Rin + 1)
    }
    periods = [f.periods[r // d] for r in range(Rout + 1)]
    table = []
    for rho in range(Rout + 1):
        row = []
        for i in range(periods[rho]):
            hi = int(h(i))
            acc = Poly()
            for s in range(rho // d + 1):
                coef = f.phi(s, hi).scale(Fraction(1) / c ** s)
                if coef.is_zero():
                    continue
                acc = acc + coef * power_rows[s][rho - d * s]
            row.append(acc)
        table.append(row)
    return TwoLevelQP(
        f.degree_g.scale(d), f.depth.compose_degree(d), Rout, periods, table
    )


def tl_eval_truncated(f: TwoLevelQP, q: int, n: int) -> tuple[Fraction, float]:
    gq = f.degree_g(q)
    if gq < 0:
        return Fraction(0), INF
    gq = int(gq)
    m = min(f.R, f.depth(q), gq)
    if m < 0:
        return Fraction(0), -1
    m = int(m)
    n = Fraction(n)
    total = Fraction(0)
    for r in range(m + 1):
        total += f.phi(r, int(n) % f.periods[r])(q) * n ** (gq - r)
    return total, m


# -- oracle cross-check ------------------------------------------------------

def true_codegree_coeffs(
    oracle: OracleHandle, q: int, degree: int, period: int, n_min: int,
    extra: int = 1,
) -> QuasiPoly:
    """Exact quasi-polynomial of f_q from oracle samples (held-out verification included)."""
    need = (degree + 1 + extra) * period
    samples = [(n, oracle.eval(q, n)) for n in range(n_min, n_min + need)]
    return qp_fit(samples, degree, period, n_min)


def tl_check_against_oracle(
    f: TwoLevelQP,
    oracle: OracleHandle,
    q_range: Iterable[int],
    period_for_q: Callable[[int], int] | None = None,
) -> FitReport:
    """Compare phi[r][i](q) with the oracle's codegree coefficients, r <= min(R, depth(q))."""
    rep = FitReport(family=oracle.label(), table=f, config={"R": f.R})
    for q in q_range:
        gq = f.degree_g(q)
        if gq < 0:
            continue
        gq = int(gq)
        depth = f.effective_depth(q)
        top = int(min(f.R, depth))
        if top < 0:
            continue
        if period_for_q is not None:
            P = period_for_q(q)
        elif oracle.period_fn is not None:
            P = oracle.period_fn(q)
        else:
            P = f.period(min(gq, f.R))
        if oracle.coeff_fn is not None:
            direct = list(oracle.coeff_fn(q, min(top, gq)))
            fitted = QuasiPoly([Poly([direct[gq - k] if gq - k < len(direct) else 0 for k in range(gq + 1)])])
            P = 1
        else:
            start = oracle.n_min(q, gq)
            try:
                fitted = true_codegree_coeffs(oracle, q, gq, P, start)
            except (FitError, InsufficientSamples) as exc:
                rep.errors.append(f"q={q}: oracle fit failed: {exc}")
                continue
        rep.periods[q] = P
        for r in range(top + 1):
            pr = f.periods[r]
            p_cmp = math.lcm(pr, P)
            for i in range(p_cmp):
                if r > gq:
                    truth = Fraction(0)
                else:
                    truth = fitted.constituents[i % P].coeff(gq - r)
                got = f.phi(r, i)(q)
                rep.checked.append((q, r, i % pr))
                if truth != got:
                    rep.mismatches.append(Mismatch(q, r, i % pr, truth, got))
        # collapse duplicate residue reports
        rep.mismatches = sorted(set(rep.mismatches), key=lambda m: m.key)
    rep.checked = sorted(set(rep.checked))
    return rep
