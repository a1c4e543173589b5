"""Empirical two-level detection: fit per-q quasi-polynomials, then fit phi_{r,i}(q).

Nothing is accepted on interpolation alone: every phi is checked on a disjoint
set of test q values, and bad period/degree hypotheses surface as errors.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .core_math import Poly, interpolate, is_numerical
from .graph_fam import SizeLimitError
from .quasipoly import FitError, InsufficientSamples, QuasiPoly, qp_fit
from .report import FitReport, Mismatch
from .twolevel import INF, DepthExpr, OracleHandle, TwoLevelQP, check_period_chain


class NoPeriodFound(ValueError):
    def __init__(self, q: int, tried: int):
        self.q = q
        self.tried = tried
        super().__init__(f"no period <= {tried} fits at q={q}")


@dataclass
class DetectConfig:
    q_fit: Sequence[int]
    q_test: Sequence[int]
    R: int
    degree_bound: Callable[[int], int] = lambda r: 2 * r
    periods: Optional[Sequence[int]] = None
    depth: DepthExpr = field(default_factory=DepthExpr.infinite)
    n_min: Optional[Callable[[int, int], int]] = None
    degree_g: Optional[Poly] = None
    bound_kind: str = "caller"
    jobs: int = 1

    def __post_init__(self):
        self.q_fit = sorted(set(self.q_fit))
        self.q_test = sorted(set(self.q_test))
        if set(self.q_fit) & set(self.q_test):
            raise ValueError("fit and test q ranges must be disjoint")
        if not self.q_fit:
            raise ValueError("empty fit range")
        if self.R < 0:
            raise ValueError("R must be >= 0")
        if self.periods is None:
            self.periods = [1] * (self.R + 1)
        self.periods = list(self.periods)
        if len(self.periods) != self.R + 1:
            raise ValueError("period hypothesis needs R+1 entries")
        check_period_chain(self.periods)

    def to_json(self) -> dict:
        return {
            "q_fit": list(self.q_fit),
            "q_test": list(self.q_test),
            "R": self.R,
            "degree_bounds": [self.degree_bound(r) for r in range(self.R + 1)],
            "bound_kind": self.bound_kind,
            "periods": list(self.periods),
            "depth": self.depth.to_json(),
        }


def _degree_poly(oracle: OracleHandle, qs: Sequence[int]) -> Poly:
    if oracle.degree_fn is None:
        raise ValueError("oracle has no degree metadata; pass DetectConfig.degree_g")
    g = interpolate([(q, oracle.degree_fn(q)) for q in qs])
    if not is_numerical(g):
        raise ValueError(f"degree values give a non-numerical polynomial {g.format('q')}")
    return g


def _coefficients_at(
    oracle: OracleHandle, cfg: DetectConfig, q: int, gq: int, top: int
) -> dict[tuple[int, int], Fraction]:
    """c_r(i, q) for r <= top and i < p(r); raises FitError/InsufficientSamples/ValueError."""
    out: dict[tuple[int, int], Fraction] = {}
    if oracle.coeff_fn is not None:
        vals = list(oracle.coeff_fn(q, min(top, gq)))
        for r in range(top + 1):
            v = Fraction(vals[r]) if r <= gq else Fraction(0)
            for i in range(cfg.periods[r]):
                out[(r, i)] = v
        return out
    P = cfg.periods[top]
    if oracle.period_fn is not None:
        P = math.lcm(P, oracle.period_fn(q))
    start = cfg.n_min(q, gq) if cfg.n_min is not None else oracle.n_min(q, gq)
    need = (gq + 2) * P
    samples = [(n, oracle.eval(q, n)) for n in range(start, start + need)]
    fitted = qp_fit(samples, gq, P, start)
    for r in range(top + 1):
        for i in range(cfg.periods[r]):
            out[(r, i)] = Fraction(0) if r > gq else fitted.codegree_coeff(r, i, gq, cfg.periods[r])
    return out


def detect_two_level(oracle: OracleHandle, cfg: DetectConfig) -> tuple[TwoLevelQP, FitReport]:
    qs = sorted(set(cfg.q_fit) | set(cfg.q_test))
    g = cfg.degree_g if cfg.degree_g is not None else _degree_poly(oracle, qs)
    rep = FitReport(family=oracle.label(), config=cfg.to_json())
    rep.config["degree_g"] = g.to_json()

    def task(q: int):
        gq = g(q)
        if gq < 0:
            return q, None, None
        gq = int(gq)
        top = int(min(cfg.R, cfg.depth(q)))
        if top < 0:
            return q, {}, None
        try:
            return q, _coefficients_at(oracle, cfg, q, gq, top), None
        except SizeLimitError:
            raise
        except (FitError, InsufficientSamples, ValueError) as exc:
            return q, None, f"q={q}: {type(exc).__name__}: {exc}"

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(task, qs))
    else:
        results = [task(q) for q in qs]

    coeffs: dict[int, dict] = {}
    for q, vals, err in results:
        if err:
            rep.errors.append(err)
        elif vals is not None:
            coeffs[q] = vals
            for (r, i), v in vals.items():
                rep.observed[(q, r, i)] = v
    table = []
    for r in range(cfg.R + 1):
        bound = cfg.degree_bound(r)
        row = []
        for i in range(cfg.periods[r]):
            fit_pts = [(q, coeffs[q][(r, i)]) for q in cfg.q_fit if q in coeffs and (r, i) in coeffs[q]]
            test_pts = [(q, coeffs[q][(r, i)]) for q in cfg.q_test if q in coeffs and (r, i) in coeffs[q]]
            if not fit_pts:
                rep.errors.append(f"r={r}, i={i}: no fit points within the depth hypothesis")
                row.append(Poly())
                continue
            phi = interpolate(fit_pts)
            if phi.degree > bound:
                rep.errors.append(
                    f"r={r}, i={i}: fitted degree {phi.degree} exceeds bound {bound}"
                )
            if len(fit_pts) < bound + 1:
                rep.notes.append(
                    f"r={r}, i={i}: {len(fit_pts)} fit points for degree bound {bound}; "
                    "evidence rests on the test points"
                )
            if not test_pts:
                rep.errors.append(f"r={r}, i={i}: no held-out q reaches this codegree; fit unverified")
            rep.fitted[(r, i)] = (phi, len(fit_pts))
            for q, v in test_pts:
                rep.checked.append((q, r, i))
                got = phi(q)
                if got != v:
                    rep.mismatches.append(Mismatch(q, r, i, v, got))
            row.append(phi)
        table.append(row)
    tl = TwoLevelQP(g, cfg.depth, cfg.R, cfg.periods, table, oracle.label())
    rep.table = tl
    rep.sort()
    return tl, rep


def period_search(
    oracle: OracleHandle, q: int, degree_bound: int, max_period: int, n_min: int = 0
) -> int:
    """Smallest p <= max_period for which a degree-bounded quasi-polynomial fit verifies.

    Every candidate is checked on the whole window of (degree_bound + 2) * max_period
    samples, so a small p cannot pass on a single held-out value per class.
    """
    window = [(n, oracle.eval(q, n)) for n in range(n_min, n_min + (degree_bound + 2) * max_period)]
    for p in range(1, max_period + 1):
        try:
            qp_fit(window, degree_bound, p, n_min)
        except FitError:
            continue
        return p
    raise NoPeriodFound(q, max_period)


def fit_quasipoly(
    oracle: OracleHandle, q: int, degree: int, period: int, n_min: int = 0, extra: int = 1
) -> QuasiPoly:
    """Fit with ``extra`` held-out samples per residue class."""
    samples = [(n, oracle.eval(q, n)) for n in range(n_min, n_min + (degree + 1 + extra) * period)]
    return qp_fit(samples, degree, period, n_min)


def compare_tables(constructed: TwoLevelQP, detected: TwoLevelQP) -> FitReport:
    """Polynomial equality of the phi tables up to the common truncation."""
    R = min(constructed.R, detected.R)
    rep = FitReport(family=f"{constructed.oracle} vs {detected.oracle}", config={"R": R})
    rep.table = constructed.truncate(R)
    if constructed.degree_g != detected.degree_g:
        rep.errors.append(
            f"degree mismatch: {constructed.degree_g.format('q')} vs {detected.degree_g.format('q')}"
        )
    for r in range(R + 1):
        p = math.lcm(constructed.periods[r], detected.periods[r])
        for i in range(p):
            a, b = constructed.phi(r, i), detected.phi(r, i)
            rep.checked.append((0, r, i))
            if a != b:
                rep.mismatches.append(Mismatch(None, r, i, a, b))
    rep.sort()
    return rep


def table_values(tl: TwoLevelQP, qs: Iterable[int]) -> list[tuple[int, int, int, Fraction]]:
    """(q, r, i, phi_{r,i}(q)) rows within depth, for CSV export."""
    rows = []
    for q in qs:
        gq = tl.degree_g(q)
        if gq < 0:
            continue
        top = min(tl.R, tl.effective_depth(q))
        if top == INF:
            top = tl.R
        for r in range(int(top) + 1):
            for i in range(tl.periods[r]):
                rows.append((q, r, i, tl.phi(r, i)(q)))
    return rows
