"""Exact univariate polynomials over Q, interpolation and special numbers.

Rationals are plain :class:`fractions.Fraction` values; a :class:`Poly` is an
immutable tuple of them, lowest power first.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} exactly to a rational")


def fraction_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class Poly:
    """Dense polynomial with rational coefficients; ``coeffs[i]`` multiplies x**i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = (0,)):
        cs = [as_fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def falling(cls, k: int, shift=0) -> "Poly":
        """(x - shift)(x - shift - 1)...(x - shift - k + 1)."""
        p = cls.const(1)
        for j in range(k):
            p = p * cls([-(as_fraction(shift) + j), 1])
        return p

    @classmethod
    def binomial(cls, k: int) -> "Poly":
        """C(x, k) as a polynomial in x."""
        return cls.falling(k).scale(Fraction(1, math.factorial(k)))

    # -- basic properties ---------------------------------------------
    @property
    def degree(self) -> float:
        """Degree; the zero polynomial has degree ``-inf``."""
        if self.is_zero():
            return -math.inf
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def is_constant(self) -> bool:
        return len(self.coeffs) == 1

    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def codegree_coeff(self, r: int, deg: int | None = None) -> Fraction:
        """Coefficient of x**(deg - r), ``deg`` defaulting to the degree."""
        if deg is None:
            deg = len(self.coeffs) - 1
        return self.coeff(deg - r)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other) -> "Poly":
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return _lift(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative polynomial power")
        result, base = Poly.const(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "Poly":
        c = as_fraction(c)
        return Poly([c * a for a in self.coeffs])

    def compose(self, inner: "Poly") -> "Poly":
        """self(inner(x)) by Horner's rule."""
        result = Poly()
        for c in reversed(self.coeffs):
            result = result * inner + Poly.const(c)
        return result

    def __call__(self, x):
        x = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    eval = __call__

    # -- comparison / hashing ----------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        return self.format("x")

    def format(self, var: str = "x") -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if k == 0:
                body = str(mag)
            else:
                mono = var if k == 1 else f"{var}^{k}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    # -- bases / serialization ---------------------------------------
    def binomial_basis(self) -> list[Fraction]:
        """Coefficients b_k with self = sum_k b_k C(x, k), via forward differences."""
        d = len(self.coeffs) - 1
        vals = [self(k) for k in range(d + 1)]
        out = []
        for _ in range(d + 1):
            out.append(vals[0])
            vals = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
        return out

    def to_json(self) -> dict:
        return {"coeffs": [fraction_to_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "Poly":
        return cls(Fraction(s) for s in data["coeffs"])


def _lift(v):
    if isinstance(v, Poly):
        return v
    if isinstance(v, (int, Fraction)):
        return Poly.const(v)
    return NotImplemented


def poly_arith(op: str, a: Poly, b=None):
    """Dispatch form of the polynomial operations (used by the CLI)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    if op == "compose":
        if not isinstance(b, Poly):
            raise TypeError("compose needs a Poly as inner argument")
        return a.compose(b)
    if op == "eval":
        return a(b)
    raise ValueError(f"unknown polynomial operation {op!r}")


def interpolate(points: Sequence[tuple]) -> Poly:
    """Unique polynomial of degree < len(points) through ``points`` (Newton form)."""
    if not points:
        raise ValueError("interpolation needs at least one point")
    xs = [as_fraction(x) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate x-value in interpolation points")
    table = [as_fraction(y) for _, y in points]
    newton = [table[0]]
    m = len(xs)
    for level in range(1, m):
        table = [
            (table[i + 1] - table[i]) / (xs[i + level] - xs[i])
            for i in range(m - level)
        ]
        newton.append(table[0])
    result = Poly.const(newton[-1])
    for k in range(m - 2, -1, -1):
        result = result * Poly([-xs[k], 1]) + Poly.const(newton[k])
    return result


def is_numerical(g: Poly) -> bool:
    """True iff g maps the integers into the integers."""
    return all(b.denominator == 1 for b in g.binomial_basis())


# -- special numbers -------------------------------------------------------

def _check_nonneg(*args: int) -> None:
    for a in args:
        if a < 0:
            raise ValueError(f"negative index {a}")


def binomial(n: int, k: int) -> int:
    """C(n, k) for integer n (possibly negative) and k >= 0."""
    _check_nonneg(k)
    return int(Poly.binomial(k)(n)) if n < 0 else math.comb(n, k)


def falling_factorial(x, k: int):
    """x(x-1)...(x-k+1); zero when 0 <= x < k for integer x."""
    _check_nonneg(k)
    out = 1 if isinstance(x, int) else Fraction(1)
    for j in range(k):
        out *= x - j
    return out


@lru_cache(maxsize=None)
def stirling1_unsigned(n: int, k: int) -> int:
    _check_nonneg(n, k)
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0:
        return 0
    return stirling1_unsigned(n - 1, k - 1) + (n - 1) * stirling1_unsigned(n - 1, k)


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    _check_nonneg(n, k)
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0:
        return 0
    return stirling2(n - 1, k - 1) + k * stirling2(n - 1, k)


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Bernoulli number with t/(e^t - 1) convention, so B_1 = -1/2."""
    _check_nonneg(m)
    if m == 0:
        return Fraction(1)
    # sum_{k=0}^{m} C(m+1, k) B_k = 0
    s = sum(math.comb(m + 1, k) * bernoulli(k) for k in range(m))
    return -s / (m + 1)


_SPECIAL = {
    "binomial": binomial,
    "falling_factorial": falling_factorial,
    "stirling1_unsigned": stirling1_unsigned,
    "stirling2": stirling2,
    "bernoulli": bernoulli,
}


def special_number(kind: str, *args: int) -> Fraction:
    try:
        fn = _SPECIAL[kind]
    except KeyError:
        raise ValueError(f"unknown special number {kind!r}") from None
    return Fraction(fn(*args))
