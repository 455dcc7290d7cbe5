"""Summary tables and grouped bar charts from per-trial metrics files."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from slicekit.evaluation import Aggregate, MetricsReport, aggregate
from slicekit.errors import EmptyInput

METRICS_GLOB = "*.metrics.json"
TABLE_COLUMNS = [
    "method",
    "runs",
    "failed",
    "completeness_mean",
    "completeness_std",
    "homogeneity_mean",
    "homogeneity_std",
    "violations_mean",
]
PALETTE = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"]


@dataclass
class MethodRuns:
    method: str
    reports: list[MetricsReport]
    failed: int = 0


def collect_runs(run_dir: str | Path) -> list[MethodRuns]:
    """Group every ``*.metrics.json`` under ``run_dir`` by its method, sorted by name."""
    by_method: dict[str, MethodRuns] = {}
    for path in sorted(Path(run_dir).rglob(METRICS_GLOB)):
        record = json.loads(path.read_text(encoding="utf-8"))
        method = record["method"]
        entry = by_method.setdefault(method, MethodRuns(method, []))
        if record.get("metrics") is None:
            entry.failed += 1
        else:
            entry.reports.append(MetricsReport.from_dict(record["metrics"]))
    if not by_method:
        raise EmptyInput(f"no {METRICS_GLOB} files under {run_dir}")
    return [by_method[k] for k in sorted(by_method)]


def _num(x: float | None, digits: int = 4) -> str:
    return "" if x is None else f"{x:.{digits}f}"


def table_csv(groups: list[MethodRuns]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for g in groups:
        agg = aggregate(g.reports) if g.reports else None
        writer.writerow(
            {
                "method": g.method,
                "runs": len(g.reports),
                "failed": g.failed,
                "completeness_mean": _num(agg.completeness_pct.mean if agg else None),
                "completeness_std": _num(agg.completeness_pct.std if agg else None),
                "homogeneity_mean": _num(agg.homogeneity.mean if agg and agg.homogeneity else None),
                "homogeneity_std": _num(agg.homogeneity.std if agg and agg.homogeneity else None),
                "violations_mean": _num(agg.violation_count.mean if agg else None),
            }
        )
    return buf.getvalue()


def grouped_bars_svg(
    title: str,
    categories: list[str],
    series: list[tuple[str, list[float], list[float]]],
    reference: float | None = 1.0,
) -> str:
    """Grouped bars with optional error whiskers and a dashed reference line.

    ``series`` holds ``(label, means, stds)`` with one value per category.
    """
    width, height = 640, 400
    left, right, top, bottom = 60, 160, 40, 50
    plot_w, plot_h = width - left - right, height - top - bottom
    peak = max([reference or 0.0] + [m + s for _, ms, ss in series for m, s in zip(ms, ss)])
    y_max = max(1.0, peak) * 1.1

    def y(v: float) -> float:
        return top + plot_h * (1 - min(v, y_max) / y_max)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2 - right / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for k in range(6):
        v = y_max * k / 5
        out.append(
            f'<text x="{left - 6}" y="{y(v) + 4:.1f}" text-anchor="end">{v:.2f}</text>'
            f'<line x1="{left - 3}" y1="{y(v):.1f}" x2="{left}" y2="{y(v):.1f}" stroke="black"/>'
        )
    group_w = plot_w / max(1, len(categories))
    bar_w = group_w * 0.8 / max(1, len(series))
    for c, cat in enumerate(categories):
        x0 = left + c * group_w + group_w * 0.1
        for s, (_, means, stds) in enumerate(series):
            mean, std = means[c], stds[c]
            x = x0 + s * bar_w
            out.append(
                f'<rect x="{x:.1f}" y="{y(mean):.1f}" width="{bar_w * 0.9:.1f}" '
                f'height="{top + plot_h - y(mean):.1f}" fill="{PALETTE[s % len(PALETTE)]}"/>'
            )
            if std > 0:
                cx = x + bar_w * 0.45
                out.append(
                    f'<line x1="{cx:.1f}" y1="{y(mean + std):.1f}" x2="{cx:.1f}" '
                    f'y2="{y(max(0.0, mean - std)):.1f}" stroke="black"/>'
                )
        out.append(
            f'<text x="{left + (c + 0.5) * group_w:.1f}" y="{top + plot_h + 18}" '
            f'text-anchor="middle">{escape(cat)}</text>'
        )
    if reference is not None:
        out.append(
            f'<line x1="{left}" y1="{y(reference):.1f}" x2="{left + plot_w}" y2="{y(reference):.1f}" '
            f'stroke="gray" stroke-dasharray="4 3"/>'
        )
    for s, (label, _, _) in enumerate(series):
        ly = top + 10 + 20 * s
        out.append(
            f'<rect x="{left + plot_w + 15}" y="{ly - 9}" width="12" height="12" '
            f'fill="{PALETTE[s % len(PALETTE)]}"/>'
            f'<text x="{left + plot_w + 32}" y="{ly + 2}">{escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _utilization_series(groups: list[MethodRuns], which: str) -> tuple[list[str], list]:
    aggs: list[tuple[str, Aggregate]] = [(g.method, aggregate(g.reports)) for g in groups if g.reports]
    slice_ids = list(dict.fromkeys(sid for _, a in aggs for sid in getattr(a, which)))
    series = []
    for method, a in aggs:
        stats = getattr(a, which)
        series.append(
            (
                method,
                [stats[sid].mean if sid in stats else 0.0 for sid in slice_ids],
                [stats[sid].std if sid in stats else 0.0 for sid in slice_ids],
            )
        )
    return slice_ids, series


def build_report(run_dir: str | Path, out_dir: str | Path) -> list[Path]:
    """Write ``table.csv``, ``bandwidth_utilization.svg`` and ``density_utilization.svg``."""
    groups = collect_runs(run_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "table.csv"]
    written[0].write_text(table_csv(groups), encoding="utf-8")
    for which, title, name in (
        ("bandwidth_utilization", "Bandwidth utilization per slice", "bandwidth_utilization.svg"),
        ("density_utilization", "Density utilization per slice", "density_utilization.svg"),
    ):
        cats, series = _utilization_series(groups, which)
        path = out / name
        path.write_text(grouped_bars_svg(title, cats, series), encoding="utf-8")
        written.append(path)
    return written
