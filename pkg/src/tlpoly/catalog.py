"""Registry of named families: exact oracles, closed forms and detection defaults.

A family spec string looks like ``kneser-chromatic:k=2`` or ``sheffer:preset=touchard``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

from . import board_fam as boards, closedforms, graph_fam as graphs, seq_fam as sequences
from .core_math import Poly
from .twolevel import DepthExpr, OracleHandle, TwoLevelQP

Q = Poly.x()


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict = field(default_factory=dict)
    q: Optional[int] = None  # optional fixed q, e.g. ``knights:q=3``

    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))


def parse_spec(text: str) -> FamilySpec:
    """``name:key=val,key=val``; integer-looking values become ints.

    Every family also accepts ``q=<int>``, kept apart from the family parameters.
    """
    name, _, rest = text.partition(":")
    params: dict = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"bad parameter {item!r} in {text!r} (expected key=value)")
        val = val.strip()
        try:
            params[key.strip()] = int(val)
        except ValueError:
            params[key.strip()] = val
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; see the 'families' command")
    fam = FAMILIES[name]
    q = params.pop("q", None)
    if q is not None and (not isinstance(q, int) or q < 0):
        raise ValueError(f"q must be a nonnegative integer in {text!r}")
    unknown = set(params) - set(fam.params)
    if unknown:
        raise ValueError(f"family {name!r} has no parameter(s) {sorted(unknown)}")
    merged = dict(fam.params)
    merged.update(params)
    return FamilySpec(name, merged, q)


@dataclass(frozen=True)
class Defaults:
    """Detection defaults; ``bound_kind`` says where the degree bounds come from."""

    R: int
    fit: tuple
    test: tuple
    degree_bound: Callable[[int], int]
    bound_kind: str
    depth: DepthExpr = DepthExpr.infinite()
    periods: Optional[tuple] = None


@dataclass(frozen=True)
class Family:
    name: str
    summary: str
    params: dict
    guard: str
    degree: Callable[[dict], Poly]
    make_oracle: Callable[[dict], OracleHandle]
    defaults: Callable[[dict], Defaults]
    closed_form: Optional[Callable[[dict, int], TwoLevelQP]] = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "summary": self.summary,
            "params": dict(self.params),
            "guard": self.guard,
            "closed_form": self.closed_form is not None,
        }


FAMILIES: dict[str, Family] = {}


def register(fam: Family) -> None:
    FAMILIES[fam.name] = fam


def oracle_for(spec: FamilySpec) -> OracleHandle:
    return FAMILIES[spec.name].make_oracle(spec.params)


# -- simple closed-form families ----------------------------------------------

def _rising(q: int, n: int) -> int:
    out = 1
    for j in range(q):
        out *= n + j
    return out


def _falling(q: int, n: int) -> int:
    out = 1
    for j in range(q):
        out *= n - j
    return out


def _simple(name, summary, fn, closed, bound, bound_kind, depth=DepthExpr.infinite(),
            fit=tuple(range(0, 9)), test=(9, 10), params=None, degree=lambda p: Q, q_min=0):
    params = params or {}

    def make(p):
        return OracleHandle(name, dict(p), lambda q, n: fn(p, q, n), degree_fn=lambda q: int(degree(p)(q)))

    register(Family(
        name, summary, params, "none (direct evaluation)", degree, make,
        lambda p: Defaults(3, fit, test, bound, bound_kind, depth),
        closed,
    ))


_simple(
    "binomial-power", "(n + shift)^q", lambda p, q, n: (n + p["shift"]) ** q,
    lambda p, R: closedforms.binomial_power(R, p["shift"]),
    lambda r: r, "proof", params={"shift": 1},
)
_simple(
    "rising-factorial", "n(n+1)...(n+q-1)", lambda p, q, n: _rising(q, n),
    lambda p, R: closedforms.rising_factorial(R), lambda r: 2 * r, "proof",
)
_simple(
    "falling-factorial", "n(n-1)...(n-q+1)", lambda p, q, n: _falling(q, n),
    lambda p, R: closedforms.falling_factorial_tl(R), lambda r: 2 * r, "proof",
)
_simple(
    "geometric-sum", "n^q + n^(q-1) + ... + 1 (depth q)",
    lambda p, q, n: sum(n ** j for j in range(q + 1)),
    lambda p, R: closedforms.geometric_sum(R), lambda r: 0, "proof",
    depth=DepthExpr.affine(1, 0),
)


def _geom_sq(p, q, n):
    return sum(n ** j for j in range(q + 1)) ** 2


register(Family(
    "geometric-sum-squared", "(n^q + ... + 1)^2: rows r+1 through depth q", {},
    "none (direct evaluation)", lambda p: 2 * Q,
    lambda p: OracleHandle("geometric-sum-squared", {}, lambda q, n: _geom_sq(p, q, n), degree_fn=lambda q: 2 * q),
    lambda p: Defaults(3, tuple(range(0, 7)), (7, 8), lambda r: 0, "proof", DepthExpr.affine(1, 0)),
    lambda p, R: _geometric_squared(R),
))


def _geometric_squared(R: int) -> TwoLevelQP:
    from .twolevel import tl_product

    g = closedforms.geometric_sum(R)
    return tl_product(g, g).with_oracle("geometric-sum-squared")


# -- graph families --------------------------------------------------------------

@lru_cache(maxsize=None)
def _graph(kind: str, q: int, k: int) -> graphs.Graph:
    if kind == "grid":
        return graphs.cartesian_power(graphs.path(q), 2) if q > 0 else graphs.Graph(0, frozenset())
    if kind == "cycle":
        return graphs.cycle(q)
    if kind == "kneser":
        return graphs.kneser(q, k)
    if kind == "johnson":
        return graphs.johnson(q, k)
    if kind == "power-complete":
        return graphs.cartesian_power(graphs.complete(q), k) if q > 0 else graphs.Graph(0, frozenset())
    if kind == "kqq":
        return graphs.complete_bipartite(q, q)
    if kind == "kqpq":
        return graphs.cartesian(graphs.complete(q), graphs.path(q)) if q > 0 else graphs.Graph(0, frozenset())
    raise ValueError(kind)


@lru_cache(maxsize=None)
def _chrom(kind: str, q: int, k: int) -> Poly:
    return graphs.chromatic_poly(_graph(kind, q, k))


@lru_cache(maxsize=None)
def _bond(kind: str, q: int, k: int, R: int) -> tuple:
    g = _graph(kind, q, k)
    if g.v <= 12:
        p = graphs.chromatic_poly(g)
        return tuple(p.coeff(g.v - r) for r in range(R + 1))
    return tuple(Fraction(c) for c in graphs.chromatic_codegree(g, min(R, g.v)))


def _graph_family(name, summary, degree, defaults, closed=None, params=None,
                  coefficient_oracle=False):
    params = params or {}
    kind = name[: -len("-chromatic")]
    kind = "cycle" if kind == "cq" else kind

    def make(p):
        k = p.get("k", 0)

        def fn(q, n):
            return _chrom(kind, q, k)(n)

        coeff = None
        if coefficient_oracle:
            def coeff(q, R):
                vals = list(_bond(kind, q, k, R))
                return vals + [Fraction(0)] * (R + 1 - len(vals))

        return OracleHandle(
            name, dict(p), fn, degree_fn=lambda q: int(degree(p)(q)), coeff_fn=coeff
        )

    register(Family(
        name, summary, params,
        "full DP |V| <= 16; bond enumeration parts <= 16 vertices (R <= 8)",
        degree, make, defaults, closed,
    ))


_graph_family(
    "grid-chromatic", "chromatic polynomial of the q x q grid P_q x P_q",
    lambda p: Q * Q,
    lambda p: Defaults(2, (1, 2, 3, 4, 5), (6, 7), lambda r: 2 * r, "heuristic"),
    coefficient_oracle=True,
)
_graph_family(
    "cq-chromatic", "chromatic polynomial of the cycle C_q (q >= 3), depth q-2",
    lambda p: Q,
    lambda p: Defaults(3, (3, 4, 5, 6, 7, 8), (9, 10), lambda r: r, "proof", DepthExpr.affine(1, -2)),
    lambda p, R: closedforms.cycle_chromatic(R),
)
_graph_family(
    "kneser-chromatic", "chromatic polynomial of the Kneser graph Kn(q,k)",
    lambda p: Poly.binomial(p["k"]),
    lambda p: Defaults(2, tuple(range(1, 4 * p["k"] + 2)),
                       (4 * p["k"] + 2, 4 * p["k"] + 3), lambda r: 2 * r * p["k"], "heuristic"),
    params={"k": 2}, coefficient_oracle=True,
)
_graph_family(
    "johnson-chromatic", "chromatic polynomial of the Johnson graph J(q,k)",
    lambda p: Poly.binomial(p["k"]),
    lambda p: Defaults(2, tuple(range(1, 4 * p["k"] + 2)),
                       (4 * p["k"] + 2, 4 * p["k"] + 3), lambda r: 2 * r * p["k"], "heuristic"),
    params={"k": 2}, coefficient_oracle=True,
)
_graph_family(
    "power-complete-chromatic", "chromatic polynomial of the Cartesian power K_q^k",
    lambda p: Q ** p["k"],
    lambda p: Defaults(2, tuple(range(1, 4 * p["k"] + 2)), (4 * p["k"] + 2,),
                       lambda r: 2 * r * p["k"], "heuristic"),
    params={"k": 2}, coefficient_oracle=True,
)
_graph_family(
    "kqq-chromatic", "chromatic polynomial of K_{q,q}",
    lambda p: 2 * Q,
    lambda p: Defaults(2, (0, 1, 2, 3, 4, 5), (6, 7), lambda r: 3 * r, "heuristic"),
    lambda p, R: closedforms.closedform_Kqq(R),
    coefficient_oracle=True,
)
_graph_family(
    "kqpq-chromatic", "chromatic polynomial of K_q x P_q",
    lambda p: Q * Q,
    lambda p: Defaults(2, tuple(range(1, 8)), (8, 9), lambda r: 3 * r, "heuristic"),
    coefficient_oracle=True,
)


# -- boards -------------------------------------------------------------------------

def _knights_oracle(p):
    D = boards.ConflictSet.knights()
    piece = boards.PieceSpec.knights()
    return OracleHandle(
        "knights", dict(p), lambda q, n: boards.knights_closedform_count(D, q, n),
        # whole-polynomial start w(q-1)+1, never below the per-codegree threshold
        n_min_fn=lambda q, r: max(boards.validity_threshold(piece, min(r, 2 * q)), D.w * (q - 1) + 1),
        degree_fn=lambda q: 2 * q,
    )


register(Family(
    "knights", "labeled nonattacking knights on the n x n board (eventual polynomial)",
    {}, f"cluster enumeration q <= {boards.KNIGHTS_MAX_Q}",
    lambda p: 2 * Q, _knights_oracle,
    lambda p: Defaults(2, (2, 3, 4), (5,), lambda r: r + 2, "heuristic"),
))


def _queens_oracle(p):
    piece = boards.PieceSpec.queens()
    return OracleHandle(
        "queens", dict(p), lambda q, n: boards.count_nonattacking(piece, q, n),
        degree_fn=lambda q: 2 * q, period_fn=lambda q: 1 if q <= 2 else 2,
    )


register(Family(
    "queens", "labeled nonattacking queens on the n x n board",
    {}, f"backtracking work (n^2)^(q-1)/(q-1)! <= {boards.BOARD_WORK_LIMIT}",
    lambda p: 2 * Q, _queens_oracle,
    lambda p: Defaults(1, (0, 1, 2), (3,), lambda r: 2 * r, "heuristic"),
))


def _bicolor_oracle(p):
    return OracleHandle(
        "bicolor-queens", dict(p), lambda q, n: boards.count_bicolor_queens(q, n),
        degree_fn=lambda q: 4 * q, period_fn=lambda q: 1 if q <= 1 else 2,
    )


register(Family(
    "bicolor-queens", "q white + q black labeled queens, no cross-colour attack",
    {}, f"white placements C(n^2, q) <= {boards.BOARD_WORK_LIMIT}",
    lambda p: 4 * Q, _bicolor_oracle,
    # only q <= 2 is within reach, so only the monic leading row can be held out
    lambda p: Defaults(0, (0, 1), (2,), lambda r: 0, "heuristic"),
))


def _sidon_period(q: int) -> int:
    return {0: 1, 1: 1, 2: 1, 3: 2, 4: 12}.get(q, 60)


def _sidon_oracle(p):
    return OracleHandle(
        "sidon", dict(p), lambda q, n: boards.count_ordered_sidon(q, n),
        degree_fn=lambda q: q, period_fn=_sidon_period,
    )


register(Family(
    "sidon", "ordered Sidon q-tuples in {1..n+1}",
    {}, f"gap tuples C(n, q-1) <= {boards.SIDON_WORK_LIMIT}",
    lambda p: Q, _sidon_oracle,
    # c_1 is already degree 4 in q, beyond what q <= 4 can cross-validate
    lambda p: Defaults(0, (0, 1, 2), (3, 4), lambda r: 0, "heuristic"),
))


# -- sequences ----------------------------------------------------------------------

def _partitions_oracle(p):
    scaled = p.get("scaled", 0)

    def fn(q, n):
        v = sequences.partitions_count(n, q)
        return v * math.factorial(q) * math.factorial(q - 1) if scaled and q >= 1 else v

    return OracleHandle(
        "partitions", dict(p), fn,
        n_min_fn=lambda q, r: 1 if q == 1 else 0,
        degree_fn=lambda q: q - 1, period_fn=sequences.partitions_period,
    )


register(Family(
    "partitions", "partitions of n into q parts (scaled=1 multiplies by q!(q-1)!)",
    {"scaled": 1}, f"quasi-polynomial fit q <= {sequences.PARTITIONS_MAX_Q}",
    lambda p: Q - 1, _partitions_oracle,
    lambda p: Defaults(1, (1, 2, 3, 4, 5, 6), (7,), lambda r: 3 * r, "derived",
                       DepthExpr.affine(1, -1, 2)),
    lambda p, R: _partitions_closed(R),
))


def _partitions_closed(R: int) -> TwoLevelQP:
    fit = range(1, 3 * R + 2 * R + 3)
    tl, _ = sequences.partitions_scaled_twolevel(R, fit)
    return tl


def _sheffer_spec(p, order):
    return sequences.sheffer_preset(p["preset"], order)


@lru_cache(maxsize=None)
def _sheffer_poly(preset: str, q: int) -> Poly:
    return sequences.sheffer_poly(sequences.sheffer_preset(preset, q + 2), q)


def _sheffer_oracle(p):
    return OracleHandle(
        "sheffer", dict(p), lambda q, n: _sheffer_poly(p["preset"], q)(n),
        degree_fn=lambda q: q,
    )


def _sheffer_closed(p, R):
    tl, _ = sequences.sheffer_twolevel(
        _sheffer_spec(p, 4 * R + 4), R, range(0, 2 * R + 1), range(2 * R + 1, 2 * R + 4)
    )
    return tl


register(Family(
    "sheffer", "Sheffer sequence a(t)exp(n b(t)); presets " + ", ".join(sequences.SHEFFER_PRESETS),
    {"preset": "touchard", "r": 4}, "series order grows with q (exact)",
    lambda p: Q, _sheffer_oracle,
    lambda p: Defaults(p["r"], tuple(range(0, 2 * p["r"] + 1)), (2 * p["r"] + 1, 2 * p["r"] + 2),
                       lambda r: 2 * r, "proof"),
    _sheffer_closed,
))


def family_names() -> list[str]:
    return sorted(FAMILIES)
