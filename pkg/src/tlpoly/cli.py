"""Command-line front end: ``tlpoly <command> ...``.

Exit codes: 0 pass, 1 verification failure, 2 usage or resource-guard error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import catalog
from .core_math import fraction_to_str
from .detector import DetectConfig, compare_tables, detect_two_level
from .graph_fam import SizeLimitError
from .laws import BUGS, run_laws
from .twolevel import DepthExpr

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- argument parsing helpers -------------------------------------------------

def parse_range(text: str) -> list[int]:
    """``2..5``, ``1,3,4`` or ``7``; pieces may be mixed (``1..3,6``)."""
    out: list[int] = []
    for piece in filter(None, text.split(",")):
        lo, sep, hi = piece.partition("..")
        try:
            if sep:
                a, b = int(lo), int(hi)
                if b < a:
                    raise UsageError(f"empty range {piece!r}")
                out.extend(range(a, b + 1))
            else:
                out.append(int(piece))
        except ValueError:
            raise UsageError(f"bad range {text!r} (use a..b or a,b,c)") from None
    if not out:
        raise UsageError(f"empty range {text!r}")
    return sorted(set(out))


_LINEAR = re.compile(r"^([+-]?\d*)\*?([a-z])?([+-]\d+)?$")


def _linear(text: str, var: str) -> tuple[int, int]:
    """``a*var+b`` style text -> (a, b); also plain integers."""
    t = text.replace(" ", "")
    m = _LINEAR.match(t)
    if not m or (m.group(2) not in (None, var)) or t == "":
        raise UsageError(f"cannot parse {text!r} as a linear expression in {var}")
    coef, name, const = m.groups()
    if name is None:
        if const is not None:
            raise UsageError(f"cannot parse {text!r}")
        return 0, int(coef)
    a = int(coef) if coef not in ("", "+", "-") else (-1 if coef == "-" else 1)
    return a, int(const) if const else 0


def parse_depth(text: str) -> DepthExpr:
    """``inf``, ``q-1``, ``2q+1``, ``floor((q-1)/2)`` or ``min(x, y, ...)`` of those."""
    t = text.replace(" ", "")
    if t in ("inf", "infinite", "infinity"):
        return DepthExpr.infinite()
    if t.startswith("min(") and t.endswith(")"):
        parts = _split_top(t[4:-1])
        out = parse_depth(parts[0])
        for p in parts[1:]:
            out = out.min(parse_depth(p))
        return out
    m = re.fullmatch(r"floor\(\((.+)\)/(\d+)\)", t)
    if m:
        a, b = _linear(m.group(1), "q")
        return DepthExpr.affine(a, b, int(m.group(2)))
    a, b = _linear(t, "q")
    return DepthExpr.affine(a, b)


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    parts.append(cur)
    return parts


def parse_bound(text: str) -> Callable[[int], int]:
    """Degree bound as a linear function of r, e.g. ``2r``, ``r+2``, ``4``."""
    a, b = _linear(text, "r")
    return lambda r: a * r + b


def parse_periods(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad period chain {text!r} (use comma-separated integers)") from None


# -- output -------------------------------------------------------------------

def _emit(args, text_out: str, json_obj=None, csv_rows=None, header=None) -> None:
    if args.json and json_obj is not None:
        print(json.dumps(json_obj, sort_keys=True, indent=2))
    elif args.csv and csv_rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(csv_rows)
        sys.stdout.write(buf.getvalue())
    else:
        print(text_out)


def _write_artifacts(out: Optional[str], json_obj, csv_text: Optional[str],
                     plot: Optional[Callable[[Path], object]]) -> list[Path]:
    """PATH gets the JSON; PATH.csv and PATH.png are written next to it."""
    if not out:
        return []
    base = Path(out)
    base.parent.mkdir(parents=True, exist_ok=True)
    written = [base]
    base.write_text(json.dumps(json_obj, sort_keys=True, indent=2) + "\n")
    if csv_text is not None:
        p = base.with_suffix(".csv")
        p.write_text(csv_text)
        written.append(p)
    if plot is not None:
        p = base.with_suffix(".png")
        plot(p)
        written.append(p)
    return written


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- commands -----------------------------------------------------------------

def cmd_families(args) -> int:
    fams = [catalog.FAMILIES[n].to_json() for n in catalog.family_names()]
    lines = []
    for f in fams:
        params = ",".join(f"{k}={v}" for k, v in f["params"].items()) or "-"
        cf = " [closed form]" if f["closed_form"] else ""
        lines.append(f"{f['name']:<26} params {params:<22} guard: {f['guard']}{cf}")
    _emit(args, "\n".join(lines), {"families": fams},
          [(f["name"], json.dumps(f["params"], sort_keys=True), f["guard"], f["closed_form"]) for f in fams],
          ["name", "params", "guard", "closed_form"])
    return EXIT_PASS


def cmd_oracle(args) -> int:
    spec = catalog.parse_spec(args.spec)
    oracle = catalog.oracle_for(spec)
    if args.q is not None:
        qs = parse_range(args.q)
    elif spec.q is not None:
        qs = [spec.q]
    else:
        raise UsageError("give --q or a q=<int> key in the family spec")
    grid = [(q, n) for q in qs for n in parse_range(args.n)]

    def one(qn):
        q, n = qn
        return q, n, oracle.eval(q, n)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(one, grid))
    else:
        rows = [one(x) for x in grid]
    rows.sort(key=lambda t: (t[0], t[1]))
    str_rows = [(q, n, fraction_to_str(v)) for q, n, v in rows]
    obj = {"family": spec.label(), "values": [{"q": q, "n": n, "count": v} for q, n, v in str_rows]}
    text = "\n".join(f"q={q} n={n}: {v}" for q, n, v in rows)
    _emit(args, text, obj, str_rows, ["q", "n", "count"])
    plot = None
    if not args.no_plot:
        from .plotting import plot_sweep

        def plot(p):
            return plot_sweep(rows, spec.label(), p)
    _write_artifacts(args.out, obj, _rows_csv(["q", "n", "count"], str_rows), plot)
    return EXIT_PASS


def cmd_expand(args) -> int:
    spec = catalog.parse_spec(args.spec)
    fam = catalog.FAMILIES[spec.name]
    if fam.closed_form is None:
        raise UsageError(f"family {spec.name!r} has no closed form; try 'detect'")
    if args.R < 0:
        raise UsageError("--R must be >= 0")
    tl = fam.closed_form(spec.params, args.R).with_oracle(spec.label())
    obj = tl.to_json()
    rows = [(r, i, tl.phi(r, i).format("q")) for r in range(tl.R + 1) for i in range(tl.periods[r])]
    _emit(args, tl.describe(), obj, rows, ["r", "i", "phi"])
    _write_artifacts(args.out, obj, _rows_csv(["r", "i", "phi"], rows), None)
    return EXIT_PASS


def build_config(spec: catalog.FamilySpec, args) -> DetectConfig:
    d = catalog.FAMILIES[spec.name].defaults(spec.params)
    R = d.R if args.R is None else args.R
    fit = d.fit if args.fit is None else parse_range(args.fit)
    test = d.test if args.test is None else parse_range(args.test)
    bound = d.degree_bound if args.bound is None else parse_bound(args.bound)
    bound_kind = d.bound_kind if args.bound is None else "caller"
    depth = d.depth if args.depth_hypothesis is None else parse_depth(args.depth_hypothesis)
    periods = d.periods if args.periods is None else parse_periods(args.periods)
    if periods is not None and len(periods) != R + 1:
        periods = list(periods)[: R + 1] + [list(periods)[-1]] * max(0, R + 1 - len(periods))
    try:
        return DetectConfig(fit, test, R, bound, periods, depth, bound_kind=bound_kind, jobs=args.jobs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_detect(args) -> int:
    spec = catalog.parse_spec(args.spec)
    cfg = build_config(spec, args)
    oracle = catalog.oracle_for(spec)
    tl, rep = detect_two_level(oracle, cfg)
    fam = catalog.FAMILIES[spec.name]
    if args.compare and fam.closed_form is not None:
        cmp = compare_tables(fam.closed_form(spec.params, cfg.R), tl)
        rep.notes.append(f"closed-form comparison: {cmp.status}")
        rep.mismatches.extend(cmp.mismatches)
        rep.errors.extend(cmp.errors)
        rep.sort()
    obj = rep.to_json()
    text = [tl.describe(), f"status: {rep.status}"]
    text += [f"mismatch q={m.q} r={m.r} i={m.i}: expected {m.expected}, got {m.got}" for m in rep.mismatches]
    text += [f"error: {e}" for e in rep.errors]
    text += [f"note: {n}" for n in rep.notes]
    csv_text = rep.to_csv()
    rows = [(q, r, i, fraction_to_str(v)) for q, r, i, v in rep.coefficient_rows()]
    _emit(args, "\n".join(text), obj, rows, ["q", "r", "i", "value"])
    plot = None
    if not args.no_plot:
        from .plotting import plot_report

        def plot(p):
            return plot_report(rep, p)
    _write_artifacts(args.out, obj, csv_text, plot)
    return EXIT_PASS if rep.ok else EXIT_FAIL


def cmd_algebra_check(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    rep = run_laws(args.trials, args.seed, args.inject_bug)
    obj = rep.to_json()
    lines = [f"{law}: {n} checks" for law, n in sorted(rep.counts.items())]
    lines += [f"FAIL trial {t} {law}: {d}" for t, law, d in rep.failures[:20]]
    lines.append(f"status: {obj['status']} ({len(rep.failures)} failures, seed {args.seed})")
    rows = [(t, law, d) for t, law, d in rep.failures]
    _emit(args, "\n".join(lines), obj, rows, ["trial", "law", "detail"])
    _write_artifacts(args.out, obj, None, None)
    return EXIT_PASS if rep.ok else EXIT_FAIL


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="print JSON to stdout")
    fmt.add_argument("--csv", action="store_true", help="print CSV to stdout")
    common.add_argument("--out", metavar="PATH", help="write JSON to PATH (plus PATH.csv / PATH.png)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for oracle sweeps")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-plot", action="store_true", help="skip the PNG next to --out")

    p = argparse.ArgumentParser(prog="tlpoly", description="Exact two-level quasi-polynomial toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("families", parents=[common], help="list registered families")
    s.set_defaults(func=cmd_families)

    s = sub.add_parser("oracle", parents=[common], help="exact counts over a (q, n) grid")
    s.add_argument("spec")
    s.add_argument("--q", help="q range, e.g. 2..4 (default: q=<int> in the family string)")
    s.add_argument("--n", required=True, help="n range, e.g. 0..10")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("expand", parents=[common], help="print a closed-form phi table")
    s.add_argument("spec")
    s.add_argument("--R", type=int, default=2)
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("detect", parents=[common], help="fit and cross-validate a two-level table")
    s.add_argument("spec")
    s.add_argument("--R", type=int)
    s.add_argument("--fit", help="fit q values, e.g. 2..6")
    s.add_argument("--test", help="held-out q values, disjoint from --fit")
    s.add_argument("--bound", help="degree bound in r, e.g. 2r or r+2")
    s.add_argument("--depth-hypothesis", help="inf, q-2, floor((q-1)/2), min(q,3)")
    s.add_argument("--periods", help="period chain p(0),...,p(R), e.g. 1,1,2")
    s.add_argument("--compare", action="store_true", help="also compare with the closed form")
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("algebra-check", parents=[common], help="randomized algebra law suite")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--inject-bug", choices=BUGS, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_algebra_check)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except SizeLimitError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
