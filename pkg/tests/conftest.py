from __future__ import annotations

from fractions import Fraction

from hypothesis import settings, strategies as st

from tlpoly.core_math import Poly
from tlpoly.quasipoly import QuasiPoly

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_frac = st.fractions(min_value=-20, max_value=20, max_denominator=6)
small_int = st.integers(-9, 9)


@st.composite
def polys(draw, max_degree: int = 4, integer: bool = False):
    elems = small_int if integer else small_frac
    return Poly(draw(st.lists(elems, min_size=1, max_size=max_degree + 1)))


@st.composite
def quasipolys(draw, max_degree: int = 3, max_period: int = 4):
    p = draw(st.integers(1, max_period))
    return QuasiPoly([draw(polys(max_degree)) for _ in range(p)])


def frac(s: str) -> Fraction:
    return Fraction(s)


# acceptance criteria record (number, title, passed, seconds, limit, detail) here
ACCEPTANCE_RESULTS: list[tuple] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, passed, secs, limit, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        line = f"{status} criterion {num:2d} ({secs:6.2f}s / {limit}s): {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
