"""Truncated power series, Sheffer sequences and partitions into q parts."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .core_math import Poly, as_fraction, bernoulli, interpolate
from .quasipoly import QuasiPoly, qp_fit
from .report import FitReport, Mismatch
from .twolevel import DepthExpr, TwoLevelQP

PARTITIONS_MAX_Q = 6


# -- series ------------------------------------------------------------------

@dataclass(frozen=True)
class Series:
    """sum_{k<=order} coeffs[k] t^k; every operation truncates at ``order``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("a series needs at least the constant term")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def of(cls, coeffs: Iterable, order: int) -> "Series":
        cs = list(coeffs)[: order + 1]
        return cls(tuple(cs) + (0,) * (order + 1 - len(cs)))

    @classmethod
    def t(cls, order: int) -> "Series":
        return cls.of([0, 1], order)

    @classmethod
    def one(cls, order: int) -> "Series":
        return cls.of([1], order)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k <= self.order else Fraction(0)

    def _align(self, other: "Series") -> int:
        return min(self.order, other.order)

    def __add__(self, other: "Series") -> "Series":
        T = self._align(other)
        return Series(tuple(self[k] + other[k] for k in range(T + 1)))

    def __sub__(self, other: "Series") -> "Series":
        return self + other.scale(-1)

    def scale(self, c) -> "Series":
        c = as_fraction(c)
        return Series(tuple(c * x for x in self.coeffs))

    def __mul__(self, other: "Series") -> "Series":
        T = self._align(other)
        out = [Fraction(0)] * (T + 1)
        for i in range(T + 1):
            a = self[i]
            if a == 0:
                continue
            for j in range(T + 1 - i):
                out[i + j] += a * other[j]
        return Series(tuple(out))

    def inverse(self) -> "Series":
        if self[0] == 0:
            raise ValueError("series inverse needs a nonzero constant term")
        T = self.order
        inv = [Fraction(1) / self[0]]
        for k in range(1, T + 1):
            s = sum(self[j] * inv[k - j] for j in range(1, k + 1))
            inv.append(-s / self[0])
        return Series(tuple(inv))

    def derivative(self) -> "Series":
        return Series(tuple(k * self[k] for k in range(1, self.order + 1)) or (0,))

    def exp(self) -> "Series":
        if self[0] != 0:
            raise ValueError("series exp needs a zero constant term")
        T = self.order
        e = [Fraction(1)]
        for k in range(1, T + 1):
            e.append(sum(j * self[j] * e[k - j] for j in range(1, k + 1)) / k)
        return Series(tuple(e))

    def log(self) -> "Series":
        if self[0] != 1:
            raise ValueError("series log needs constant term 1")
        T = self.order
        quot = (Series.of(self.derivative().coeffs, T) * self.inverse()).coeffs
        return Series((Fraction(0),) + tuple(quot[k - 1] / k for k in range(1, T + 1)))

    def compose(self, inner: "Series") -> "Series":
        """self(inner(t)); needs inner[0] = 0."""
        if inner[0] != 0:
            raise ValueError("series compose needs an inner series with zero constant term")
        T = self._align(inner)
        acc = Series.of([self[T]], T)
        for k in range(T - 1, -1, -1):
            acc = acc * inner + Series.of([self[k]], T)
        return acc

    def pow(self, k: int) -> "Series":
        if k < 0:
            return self.inverse().pow(-k)
        out, base = Series.one(self.order), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


def series_arith(op: str, a: Series, b=None) -> Series:
    if op == "mul":
        return a * b
    if op == "inverse":
        return a.inverse()
    if op == "exp":
        return a.exp()
    if op == "log":
        return a.log()
    if op == "compose":
        return a.compose(b)
    if op == "pow":
        return a.pow(int(b))
    raise ValueError(f"unknown series operation {op!r}")


def exp_series(order: int) -> Series:
    return Series(tuple(Fraction(1, math.factorial(k)) for k in range(order + 1)))


# -- Sheffer sequences ---------------------------------------------------------

SHEFFER_PRESETS = ("falling_factorial", "touchard", "bernoulli", "hermite")


@dataclass(frozen=True)
class ShefferSpec:
    """Exponential generating function a(t) exp(n b(t))."""

    a: Series
    b: Series
    name: str = "custom"

    def __post_init__(self):
        if self.a[0] == 0:
            raise ValueError("Sheffer spec needs a_0 != 0")
        if self.b[0] != 0:
            raise ValueError("Sheffer spec needs b_0 = 0")
        if self.b[1] == 0:
            raise ValueError("Sheffer spec needs b_1 != 0")

    @property
    def order(self) -> int:
        return min(self.a.order, self.b.order)


def sheffer_preset(name: str, order: int) -> ShefferSpec:
    """Presets; hermite is the probabilists' convention a = exp(-t^2/2), b = t."""
    T = order
    t = Series.t(T)
    one = Series.one(T)
    expm1 = exp_series(T) - one
    if name == "falling_factorial":
        return ShefferSpec(one, (one + t).log(), name)
    if name == "touchard":
        return ShefferSpec(one, expm1, name)
    if name == "bernoulli":
        # t / (e^t - 1) = ((e^t - 1)/t)^(-1)
        shifted = Series.of(exp_series(T + 1).coeffs[1:], T)
        return ShefferSpec(shifted.inverse(), t, name)
    if name == "hermite":
        return ShefferSpec(Series.of([0, 0, Fraction(-1, 2)], T).exp(), t, name)
    raise ValueError(f"unknown Sheffer preset {name!r}; choose from {', '.join(SHEFFER_PRESETS)}")


def sheffer_coeffs(spec: ShefferSpec, q: int) -> list[Fraction]:
    """c_k(q) = q! [t^q] a b^k / k! for k = 0..q."""
    if spec.order < q:
        raise ValueError(f"series order {spec.order} is below q={q}")
    fq = math.factorial(q)
    out = []
    bk = Series.one(spec.order)
    for k in range(q + 1):
        out.append(fq * (spec.a * bk)[q] / math.factorial(k))
        bk = bk * spec.b
    return out


def sheffer_poly(spec: ShefferSpec, q: int) -> Poly:
    return Poly(sheffer_coeffs(spec, q))


def sheffer_codegree_values(spec: ShefferSpec, r: int, qs: Iterable[int]) -> dict[int, Fraction]:
    """c_{q-r}(q) / b_1^q, zero where q < r."""
    out = {}
    for q in qs:
        if q < r:
            out[q] = Fraction(0)
        else:
            out[q] = sheffer_coeffs(spec, q)[q - r] / spec.b[1] ** q
    return out


def fit_and_verify(
    values: dict[int, Fraction], fit_qs: Sequence[int], test_qs: Sequence[int],
    bound: int, r: int, rep: FitReport,
) -> Poly:
    """Interpolate on fit_qs, require degree <= bound, record test mismatches in rep."""
    if len(fit_qs) < bound + 1:
        rep.errors.append(f"r={r}: {len(fit_qs)} fit points cannot pin a degree-{bound} polynomial")
        return Poly()
    phi = interpolate([(q, values[q]) for q in fit_qs])
    if phi.degree > bound:
        rep.errors.append(f"r={r}: fitted degree {phi.degree} exceeds bound {bound}")
    rep.fitted[(r, 0)] = (phi, len(fit_qs))
    for q in test_qs:
        rep.checked.append((q, r, 0))
        if phi(q) != values[q]:
            rep.mismatches.append(Mismatch(q, r, 0, values[q], phi(q)))
    return phi


def sheffer_codegree_poly(
    spec: ShefferSpec, r: int, q_fit_range: Iterable[int], q_test_range: Iterable[int],
    bound: int | None = None,
) -> tuple[Poly, FitReport]:
    """Fit phi_r(q) (degree <= 2r by default) and verify it on a disjoint q range."""
    fit_qs, test_qs = sorted(q_fit_range), sorted(q_test_range)
    if set(fit_qs) & set(test_qs):
        raise ValueError("fit and test ranges must be disjoint")
    bound = 2 * r if bound is None else bound
    rep = FitReport(
        family=f"sheffer:preset={spec.name}",
        config={"r": r, "degree_bound": bound, "fit": fit_qs, "test": test_qs},
    )
    values = sheffer_codegree_values(spec, r, fit_qs + test_qs)
    phi = fit_and_verify(values, fit_qs, test_qs, bound, r, rep)
    if spec.a[0] != 1:
        rep.notes.append(f"phi_0 = a_0 = {spec.a[0]} (not normalized to 1)")
    rep.sort()
    return phi, rep


def sheffer_twolevel(
    spec: ShefferSpec, R: int, q_fit_range: Iterable[int], q_test_range: Iterable[int]
) -> tuple[TwoLevelQP, FitReport]:
    fit_qs, test_qs = sorted(q_fit_range), sorted(q_test_range)
    rep = FitReport(family=f"sheffer:preset={spec.name}", config={"R": R, "fit": fit_qs, "test": test_qs})
    rows = []
    for r in range(R + 1):
        values = sheffer_codegree_values(spec, r, fit_qs + test_qs)
        rows.append([fit_and_verify(values, fit_qs, test_qs, 2 * r, r, rep)])
    tl = TwoLevelQP(Poly.x(), DepthExpr.infinite(), R, [1] * (R + 1), rows, f"sheffer:preset={spec.name}")
    rep.table = tl
    rep.sort()
    return tl, rep


# -- partitions into q parts -----------------------------------------------------

def partitions_table(n_max: int, q_max: int) -> list[list[int]]:
    """t[n][q] = number of partitions of n into exactly q parts."""
    t = [[0] * (q_max + 1) for _ in range(n_max + 1)]
    t[0][0] = 1
    for n in range(1, n_max + 1):
        for q in range(1, min(n, q_max) + 1):
            t[n][q] = t[n - 1][q - 1] + t[n - q][q]
    return t


def partitions_count(n: int, q: int) -> int:
    """p(n, q) via p(n, q) = p(n-1, q-1) + p(n-q, q)."""
    if n < 0 or q < 0:
        raise ValueError("n and q must be nonnegative")
    if q > n:
        return 1 if n == q == 0 else 0
    return partitions_table(n, q)[n][q]


def partitions_period(q: int) -> int:
    return math.lcm(*range(1, q + 1)) if q >= 1 else 1


def partitions_quasipoly(q: int) -> QuasiPoly:
    """Fit p(n, q) with degree q-1 and period lcm(1..q), with held-out checks.

    The fit holds from n = 0 except for q = 1, where p(0, 1) = 0 breaks the constant 1.
    """
    if q < 1:
        raise ValueError("partitions_quasipoly needs q >= 1")
    if q > PARTITIONS_MAX_Q:
        from .graph_fam import SizeLimitError

        raise SizeLimitError(f"partitions_quasipoly limited to q <= {PARTITIONS_MAX_Q}, got {q}")
    period = partitions_period(q)
    n_max = (q + 2) * period
    table = partitions_table(n_max, q)
    samples = [(n, table[n][q]) for n in range(n_max + 1)]
    return qp_fit(samples, q - 1, period, 1 if q == 1 else 0)


def _monomial_symmetric(parts: tuple[int, ...], q: int) -> int:
    """m_lambda(1, 2, ..., q)."""
    if len(parts) > q:
        return 0
    total = sum(
        math.prod(j ** p for j, p in zip(slots, parts))
        for slots in itertools.permutations(range(1, q + 1), len(parts))
    )
    for p in set(parts):
        total //= math.factorial(parts.count(p))
    return total


def _int_partitions(u: int) -> list[tuple[int, ...]]:
    out = []

    def rec(left, cap, acc):
        if left == 0:
            out.append(tuple(acc))
            return
        for p in range(min(left, cap), 0, -1):
            rec(left - p, p, acc + [p])

    rec(u, u, [])
    return out


@lru_cache(maxsize=None)
def bernoulli_block_sum(u: int, q: int) -> Fraction:
    """sum over i_1+...+i_q = u of prod_j B_{i_j} j^{i_j} / i_j!.

    Zero entries contribute B_0 = 1, so the sum runs over partitions lambda of u
    (the nonzero entries) weighted by m_lambda(1..q).
    """
    total = Fraction(0)
    for lam in _int_partitions(u):
        w = Fraction(1)
        for p in lam:
            w *= bernoulli(p) / math.factorial(p)
        if w:
            total += w * _monomial_symmetric(lam, q)
    return total


def partitions_polynomial_part(q: int, top: int | None = None) -> Poly:
    """P_{q,1}(n); with ``top`` only the u <= top terms, exact in codegrees <= top."""
    if q < 1:
        raise ValueError("polynomial part needs q >= 1")
    umax = q - 1 if top is None else min(q - 1, top)
    shift = Poly([-q, 1])
    acc = Poly()
    for u in range(umax + 1):
        s = bernoulli_block_sum(u, q)
        if s == 0:
            continue
        c = Fraction((-1) ** u, math.factorial(q - 1 - u)) * s
        acc = acc + (shift ** (q - 1 - u)).scale(c)
    return acc.scale(Fraction(1, math.factorial(q)))


def partitions_depth(q: int) -> int:
    return (q - 1) // 2


def partitions_scaled_values(r: int, qs: Iterable[int]) -> dict[int, Fraction]:
    """q!(q-1)! times the codegree-r coefficient of P_{q,1}."""
    out = {}
    for q in qs:
        part = partitions_polynomial_part(q, top=r)
        out[q] = math.factorial(q) * math.factorial(q - 1) * part.coeff(q - 1 - r)
    return out


def partitions_scaled_twolevel(
    R: int, q_fit_range: Iterable[int], q_test_range: Iterable[int] = (),
    bound: int | None = None,
) -> tuple[TwoLevelQP, FitReport]:
    """phi_r(q) for q!(q-1)! p(n, q), r <= R, fitted over q with r <= floor((q-1)/2).

    Default degree bound 3r (from the u, s bookkeeping of the polynomial-part
    formula); each row is verified on the test q values that reach depth r.
    """
    fit_qs, test_qs = sorted(q_fit_range), sorted(q_test_range)
    rep = FitReport(family="partitions-scaled", config={"R": R, "fit": fit_qs, "test": test_qs})
    rows = []
    for r in range(R + 1):
        fq = [q for q in fit_qs if partitions_depth(q) >= r]
        tq = [q for q in test_qs if partitions_depth(q) >= r]
        b = 3 * r if bound is None else bound
        values = partitions_scaled_values(r, fq + tq)
        rows.append([fit_and_verify(values, fq, tq, b, r, rep)])
    tl = TwoLevelQP(
        Poly([-1, 1]), DepthExpr.affine(1, -1, 2), R, [1] * (R + 1), rows, "partitions-scaled"
    )
    rep.table = tl
    rep.sort()
    return tl, rep
