"""Turn sweep CSV rows into figures plus a deterministic slope report.

The input is the sweep CSV written by the shadowlab CLI (one row per grid
point; the columns used here are ``n``, ``M``, ``K``, ``param``,
``observable``, ``empirical_variance`` and optionally
``predicted_variance``). Nothing in this package imports shadowlab; the CSV
schema is the whole interface.

All y axes are log2(std) = 0.5 * log2(empirical_variance), so fitted slopes
read directly as scaling exponents: -1/2 per doubling, +1/2 per qubit, and
so on.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

KINDS = ("heatmap_MK", "line_vs_w", "line_vs_n", "line_vs_K")

_NEEDED = {
    "heatmap_MK": ("observable", "M", "K", "empirical_variance"),
    "line_vs_w": ("observable", "param", "M", "K", "empirical_variance"),
    "line_vs_n": ("observable", "n", "M", "K", "empirical_variance"),
    "line_vs_K": ("observable", "M", "K", "empirical_variance"),
}

_XLABEL = {"line_vs_w": "w", "line_vs_n": "n", "line_vs_K": "log2 K"}


@dataclass(frozen=True)
class PlotSpec:
    """What to read, which figure to draw, and where to write it."""

    input: str | Path
    kind: str
    output: str | Path
    overlay_predicted: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {', '.join(KINDS)}")
        suffix = Path(self.output).suffix.lower()
        if suffix not in (".png", ".svg"):
            raise ValueError(f"output must end in .png or .svg, got {suffix!r}")


def _read_rows(spec: PlotSpec) -> list[dict]:
    needed = list(_NEEDED[spec.kind])
    if spec.overlay_predicted:
        needed.append("predicted_variance")
    with open(spec.input, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in needed if c not in fields]
        if missing:
            raise ValueError(f"missing column(s): {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"empty selection: no data rows in {spec.input}")
    return rows


def _log2_std(row: dict, index: int) -> float:
    var = float(row["empirical_variance"])
    if var <= 0.0:
        raise ValueError(f"log scale requires positive empirical_variance, got {var} at data row {index}")
    return 0.5 * math.log2(var)


def _log2_pred(row: dict) -> float | None:
    """Overlay value, or None when the cell is empty or unusable on a log axis."""
    cell = (row.get("predicted_variance") or "").strip()
    if not cell:
        return None
    pred = float(cell)
    return 0.5 * math.log2(pred) if pred > 0.0 else None


def _x_value(kind: str, row: dict) -> float:
    if kind == "line_vs_w":
        return float(row["param"])
    if kind == "line_vs_n":
        return float(int(row["n"]))
    return math.log2(int(row["K"]))


def _group_label(kind: str, row: dict) -> str:
    obs = row["observable"]
    if kind == "line_vs_K":
        return f"{obs} M={int(row['M'])}"
    head, sep, body = obs.partition(":")
    if kind == "line_vs_w":
        family = "".join(sorted(set(body) - {"I"})) if sep and head == "pauli" else obs
    else:
        if sep and head == "pauli":
            family = "pauli:" + (body.rstrip("I") or "I")
        elif head == "ghz_proj":
            family = "ghz_proj"
        else:
            family = obs
    return f"{family} M={int(row['M'])} K={int(row['K'])}"


def _render_lines(spec: PlotSpec, rows: list[dict]) -> str:
    groups: dict[str, list] = {}
    for i, row in enumerate(rows):
        point = (_x_value(spec.kind, row), _log2_std(row, i), _log2_pred(row))
        groups.setdefault(_group_label(spec.kind, row), []).append(point)

    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.subplots()
    report = []
    for label in sorted(groups):
        pts = sorted(groups[label])
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        if len(set(xs.tolist())) < 2:
            raise ValueError(f"empty selection: group {label!r} has fewer than 2 distinct x values")
        slope = float(np.polyfit(xs, ys, 1)[0])
        ax.plot(xs, ys, marker="o", label=f"{label} (slope {slope:.3f})")
        if spec.overlay_predicted:
            overlay = [(x, p) for x, _, p in pts if p is not None]
            if overlay:
                ax.plot([v[0] for v in overlay], [v[1] for v in overlay], linestyle="--", color="gray")
        report.append(f"SLOPE {label}: {slope:.3f}")
    ax.set_xlabel(_XLABEL[spec.kind])
    ax.set_ylabel("log2 std")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(spec.output)
    return "\n".join(report)


def _render_heatmap(spec: PlotSpec, rows: list[dict]) -> str:
    obs = {row["observable"] for row in rows}
    if len(obs) != 1:
        raise ValueError(f"heatmap_MK needs a single observable, found {len(obs)}")
    ms = sorted({int(row["M"]) for row in rows})
    ks = sorted({int(row["K"]) for row in rows})
    grid = np.full((len(ms), len(ks)), np.nan)
    for i, row in enumerate(rows):
        a, b = ms.index(int(row["M"])), ks.index(int(row["K"]))
        if not np.isnan(grid[a, b]):
            raise ValueError(f"duplicate cell M={ms[a]} K={ks[b]}")
        grid[a, b] = 2.0 * _log2_std(row, i)

    fig = Figure(figsize=(5.0, 4.0))
    ax = fig.subplots()
    img = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(ks)), [str(k) for k in ks])
    ax.set_yticks(range(len(ms)), [str(m) for m in ms])
    ax.set_xlabel("K")
    ax.set_ylabel("M")
    ax.set_title(next(iter(obs)))
    fig.colorbar(img, ax=ax, label="log2 variance")
    fig.tight_layout()
    fig.savefig(spec.output)
    return f"HEATMAP {next(iter(obs))}: {len(ms)}x{len(ks)} cells"


def render(spec: PlotSpec) -> str:
    """Write the figure for ``spec`` and return the slope report text.

    The report is a pure function of the CSV contents: one ``SLOPE`` line per
    plotted group (sorted by label, slope to 3 decimals), or one ``HEATMAP``
    line. Raises ValueError for missing columns, empty selections, duplicate
    heatmap cells, and non-positive variances.
    """
    rows = _read_rows(spec)
    if spec.kind == "heatmap_MK":
        return _render_heatmap(spec, rows)
    return _render_lines(spec, rows)
