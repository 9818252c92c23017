"""Matplotlib figures for verification reports.

Floating point appears only here, when exact values are drawn.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _rational(x) -> Fraction | None:
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            return None
    return None


def render(report: dict, outdir: str | Path) -> list[str]:
    """Write figures for ``report`` into ``outdir`` and return their paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    name = report["suite"]
    checks = report["checks"]
    paths = [str(_summary(name, checks, out))]

    corridor = [r for r in checks if "corridor" in r and _rational(r["observed"]) is not None]
    if corridor:
        paths.append(str(_corridor(name, corridor, out)))
    pairs = [
        (_rational(r["expected"]), _rational(r["observed"]), r["pass"])
        for r in checks
        if "corridor" not in r
    ]
    pairs = [p for p in pairs if p[0] is not None and p[1] is not None]
    if pairs:
        paths.append(str(_agreement(name, pairs, out)))
    return paths


def _summary(name: str, checks: list[dict], out: Path) -> Path:
    ok = Counter(r["anchor"] for r in checks if r["pass"])
    bad = Counter(r["anchor"] for r in checks if not r["pass"])
    anchors = sorted(set(ok) | set(bad))
    fig, ax = plt.subplots(figsize=(7, 0.6 * len(anchors) + 1.5))
    y = range(len(anchors))
    ax.barh(y, [ok[a] for a in anchors], color="tab:green", label="pass")
    ax.barh(y, [bad[a] for a in anchors], left=[ok[a] for a in anchors], color="tab:red", label="fail")
    ax.set_yticks(list(y), anchors, fontsize=8)
    ax.set_xlabel("checks")
    ax.set_title(f"{name}: check outcomes")
    ax.legend(loc="lower right")
    fig.tight_layout()
    path = out / f"{name}-summary.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _corridor(name: str, checks: list[dict], out: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 4))
    xs = range(len(checks))
    obs = [float(_rational(r["observed"])) for r in checks]
    lo = [float(Fraction(r["corridor"][0])) for r in checks]
    hi = [float(Fraction(r["corridor"][1])) for r in checks]
    ax.vlines(list(xs), lo, hi, color="0.7", lw=4, label="corridor")
    ax.scatter(list(xs), obs, c=["tab:green" if r["pass"] else "tab:red" for r in checks], s=14, zorder=3,
               label="observed")
    ax.set_yscale("log")
    ax.set_xlabel("check")
    ax.set_ylabel("ratio")
    ax.set_title(f"{name}: ratios against corridors")
    ax.legend()
    fig.tight_layout()
    path = out / f"{name}-corridor.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _agreement(name: str, pairs, out: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    ex = [float(p[0]) for p in pairs]
    ob = [float(p[1]) for p in pairs]
    ax.scatter(ex, ob, c=["tab:green" if p[2] else "tab:red" for p in pairs], s=12)
    lo, hi = min(ex + ob), max(ex + ob)
    ax.plot([lo, hi], [lo, hi], color="0.5", lw=1)
    if lo > 0 and hi / lo > 1e3:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("expected")
    ax.set_ylabel("observed")
    ax.set_title(f"{name}: expected against observed")
    fig.tight_layout()
    path = out / f"{name}-agreement.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
