"""PNG figures for detection reports and oracle sweeps (matplotlib, Agg backend)."""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .report import FitReport  # noqa: E402


def plot_report(rep: FitReport, path: str | Path) -> Path:
    """One panel per codegree r: extracted c_r(q) dots over the fitted phi_{r,i}(q) curves.

    Filled markers are fit points, hollow ones held-out points; mismatches are
    drawn in red. The y axis is symlog since phi_r grows like q^(deg).
    """
    path = Path(path)
    fit_qs = set(rep.config.get("q_fit", []))
    rows = sorted({r for (r, _i) in rep.fitted} | {r for (_q, r, _i) in rep.observed})
    if not rows:
        rows = [0]
    bad = {(m.q, m.r, m.i) for m in rep.mismatches}
    fig, axes = plt.subplots(1, len(rows), figsize=(3.2 * len(rows), 3.0), squeeze=False)
    qs_all = sorted({q for (q, _r, _i) in rep.observed})
    for ax, r in zip(axes[0], rows):
        by_res = defaultdict(list)
        for (q, rr, i), v in sorted(rep.observed.items()):
            if rr == r:
                by_res[i].append((q, float(v)))
        for i, pts in sorted(by_res.items()):
            color = f"C{i % 10}"
            for q, v in pts:
                if (q, r, i) in bad:
                    ax.plot(q, v, "x", color="red", ms=8, mew=2)
                elif q in fit_qs:
                    ax.plot(q, v, "o", color=color, ms=5)
                else:
                    ax.plot(q, v, "o", mfc="none", color=color, ms=7)
            if (r, i) in rep.fitted and qs_all:
                phi = rep.fitted[(r, i)][0]
                lo, hi = min(qs_all), max(qs_all)
                grid = [lo + Fraction(hi - lo) * k / 200 for k in range(201)]
                ax.plot([float(x) for x in grid], [float(phi(x)) for x in grid], "-", color=color, lw=1,
                        label=f"i={i}" if len(by_res) > 1 else None)
        ax.set_yscale("symlog", linthresh=1.0)
        ax.set_xlabel("q")
        ax.set_title(f"r = {r}", fontsize=10)
        if len(by_res) > 1:
            ax.legend(fontsize=7)
    axes[0][0].set_ylabel("codegree coefficient")
    fig.suptitle(f"{rep.family}: {rep.status}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_sweep(rows: list[tuple[int, int, object]], family: str, path: str | Path) -> Path:
    """Counts f_q(n) against n, one line per q, on a symlog axis."""
    path = Path(path)
    series = defaultdict(list)
    for q, n, v in rows:
        series[q].append((n, float(v)))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for q, pts in sorted(series.items()):
        pts.sort()
        ax.plot([n for n, _ in pts], [v for _, v in pts], "o-", ms=3, lw=1, label=f"q={q}")
    ax.set_yscale("symlog", linthresh=1.0)
    ax.set_xlabel("n")
    ax.set_ylabel("f_q(n)")
    ax.set_title(family, fontsize=10)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
