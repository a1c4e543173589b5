"""Quasi-polynomials in n stored as one constituent polynomial per residue class."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .core_math import Poly, as_fraction, interpolate


class FitError(ValueError):
    """A fitted constituent disagrees with a held-out sample."""

    def __init__(self, n: int, expected, got, message: str = ""):
        self.n = n
        self.expected = expected
        self.got = got
        super().__init__(message or f"fit mismatch at n={n}: expected {expected}, got {got}")


class InsufficientSamples(ValueError):
    pass


class QuasiPoly:
    """f(n) = constituents[n mod period](n)."""

    __slots__ = ("period", "constituents")

    def __init__(self, constituents: Sequence[Poly]):
        cons = tuple(c if isinstance(c, Poly) else Poly(c) for c in constituents)
        if not cons:
            raise ValueError("a quasi-polynomial needs at least one constituent")
        object.__setattr__(self, "constituents", cons)
        object.__setattr__(self, "period", len(cons))

    def __setattr__(self, name, value):
        raise AttributeError("QuasiPoly is immutable")

    @classmethod
    def from_poly(cls, p: Poly) -> "QuasiPoly":
        return cls([p])

    @classmethod
    def periodic(cls, values: Sequence) -> "QuasiPoly":
        """The periodic constant [a_0, ..., a_{p-1}]_p."""
        return cls([Poly.const(v) for v in values])

    @classmethod
    def from_periodic_coeffs(cls, rows: Sequence[Sequence]) -> "QuasiPoly":
        """Build from the b_r(n) view: ``rows[r]`` is the periodic coefficient of n^(d-r)."""
        d = len(rows) - 1
        period = 1
        for row in rows:
            period = math.lcm(period, len(row))
        cons = []
        for i in range(period):
            cs = [Fraction(0)] * (d + 1)
            for r, row in enumerate(rows):
                cs[d - r] = as_fraction(row[i % len(row)])
            cons.append(Poly(cs))
        return cls(cons)

    @property
    def degree(self) -> float:
        return max(c.degree for c in self.constituents)

    def __call__(self, n: int) -> Fraction:
        return self.constituents[n % self.period](n)

    eval = __call__

    def expand(self, period: int) -> "QuasiPoly":
        if period % self.period:
            raise ValueError(f"{period} is not a multiple of {self.period}")
        return QuasiPoly([self.constituents[i % self.period] for i in range(period)])

    def _combine(self, other: "QuasiPoly", fn) -> "QuasiPoly":
        p = math.lcm(self.period, other.period)
        a, b = self.expand(p), other.expand(p)
        return QuasiPoly([fn(x, y) for x, y in zip(a.constituents, b.constituents)])

    def __add__(self, other) -> "QuasiPoly":
        other = _lift(other)
        return self._combine(other, lambda x, y: x + y)

    __radd__ = __add__

    def __neg__(self) -> "QuasiPoly":
        return QuasiPoly([-c for c in self.constituents])

    def __sub__(self, other) -> "QuasiPoly":
        return self + (-_lift(other))

    def __mul__(self, other) -> "QuasiPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = _lift(other)
        return self._combine(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def scale(self, c) -> "QuasiPoly":
        return QuasiPoly([p.scale(c) for p in self.constituents])

    def minimal_period(self) -> "QuasiPoly":
        p = self.period
        for d in sorted(_divisors(p)):
            if all(self.constituents[i] == self.constituents[i % d] for i in range(p)):
                return QuasiPoly(self.constituents[:d])
        return self  # pragma: no cover

    def compose_poly(self, h: Poly) -> "QuasiPoly":
        """f(h(n)) for h with integer coefficients."""
        if any(c.denominator != 1 for c in h.coeffs):
            raise ValueError("compose_poly needs h with integer coefficients")
        p = self.period
        return QuasiPoly(
            [self.constituents[int(h(i)) % p].compose(h) for i in range(p)]
        )

    def periodic_coeffs(self, deg: int | None = None) -> list[list[Fraction]]:
        """The b_r(n) view: row r lists the coefficient of n^(deg-r) per residue."""
        if deg is None:
            deg = int(self.degree) if self.degree >= 0 else 0
        return [
            [c.coeff(deg - r) for c in self.constituents] for r in range(deg + 1)
        ]

    def codegree_coeff(self, r: int, residue: int, deg: int, period: int) -> Fraction:
        """c_r at residue class ``residue`` mod ``period``.

        Raises ``ValueError`` if the coefficient is not constant on that class
        (the period hypothesis is too small).
        """
        if self.period % period and period % self.period:
            raise ValueError(f"period {period} incompatible with {self.period}")
        big = math.lcm(self.period, period)
        vals = {
            self.constituents[i % self.period].coeff(deg - r)
            for i in range(residue % period, big, period)
        }
        if len(vals) != 1:
            raise ValueError(
                f"codegree {r} coefficient not constant mod {period} at residue {residue}"
            )
        return vals.pop()

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasiPoly):
            return NotImplemented
        p = math.lcm(self.period, other.period)
        return self.expand(p).constituents == other.expand(p).constituents

    def __hash__(self) -> int:
        return hash(self.minimal_period().constituents)

    def __repr__(self) -> str:
        return f"QuasiPoly(period={self.period}, {[str(c) for c in self.constituents]})"

    def to_json(self) -> dict:
        return {"period": self.period, "constituents": [c.to_json() for c in self.constituents]}

    @classmethod
    def from_json(cls, data: dict) -> "QuasiPoly":
        cons = [Poly.from_json(c) for c in data["constituents"]]
        if len(cons) != data["period"]:
            raise ValueError("period does not match number of constituents")
        return cls(cons)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _lift(v) -> QuasiPoly:
    if isinstance(v, QuasiPoly):
        return v
    if isinstance(v, Poly):
        return QuasiPoly([v])
    if isinstance(v, (int, Fraction)):
        return QuasiPoly([Poly.const(v)])
    raise TypeError(f"cannot combine QuasiPoly with {type(v).__name__}")


def _divisors(p: int) -> list[int]:
    return [d for d in range(1, p + 1) if p % d == 0]


def qp_eval(f: QuasiPoly, n: int) -> Fraction:
    return f(n)


def qp_arith(op: str, f: QuasiPoly, g) -> QuasiPoly:
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "scale":
        return f.scale(g)
    raise ValueError(f"unknown quasi-polynomial operation {op!r}")


def qp_minimal_period(f: QuasiPoly) -> QuasiPoly:
    return f.minimal_period()


def qp_compose_poly(f: QuasiPoly, h: Poly) -> QuasiPoly:
    return f.compose_poly(h)


def qp_fit(
    samples: Iterable[tuple[int, object]],
    degree_bound: int,
    period: int,
    n_min: int = 0,
) -> QuasiPoly:
    """Fit one polynomial of degree <= ``degree_bound`` per residue class mod ``period``.

    Each class interpolates on its first degree_bound+1 samples (n >= n_min) and must
    reproduce every later one; a mismatch raises :class:`FitError`.
    """
    by_class: dict[int, list[tuple[int, Fraction]]] = {i: [] for i in range(period)}
    for n, v in sorted(samples, key=lambda s: s[0]):
        if n >= n_min:
            by_class[n % period].append((n, as_fraction(v)))
    need = degree_bound + 2
    cons = []
    for i in range(period):
        pts = by_class[i]
        if len(pts) < need:
            raise InsufficientSamples(
                f"residue {i} mod {period}: {len(pts)} samples, need {need}"
            )
        p = interpolate(pts[: degree_bound + 1])
        for n, v in pts[degree_bound + 1:]:
            got = p(n)
            if got != v:
                raise FitError(n, v, got)
        cons.append(p)
    return QuasiPoly(cons)


def samples_needed(degree_bound: int, period: int, n_min: int = 0) -> range:
    """Smallest contiguous n-range giving qp_fit enough samples."""
    return range(n_min, n_min + (degree_bound + 2) * period)
