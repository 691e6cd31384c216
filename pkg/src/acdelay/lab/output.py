"""CSV / SVG writers, figure data and the Markov delay-condition report.

CSV dialect: comma separated, header row, LF line endings, exact ``num/den``
for rational columns and 12 significant digits for real columns.
"""
from __future__ import annotations

import csv
import io
from fractions import Fraction
from xml.sax.saxutils import escape

from ..bounds import (
    UncertifiedSourceError,
    memory_delay_bound,
    parse_grid,
    scan_curves,
    tail_bound,
)
from ..source import (
    GammaTable,
    MemorylessSource,
    check_bounded_delay_condition,
)

__all__ = [
    "fmt_cell",
    "write_csv",
    "csv_text",
    "svg_plot",
    "emit_figure",
    "stats_rows",
    "markov_check_command",
    "FIGURES",
]

FIGURES = {
    "ternary": "Bounds for the ternary source (p, (1-p)/2, (1-p)/2)",
    "ratios": "Ratio of the bounds to the modified Gallager bound",
}


def fmt_cell(x) -> str:
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, str):
        return x
    return f"{float(x):.12g}"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_cell(c) for c in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> str:
    text = csv_text(header, rows)
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def svg_plot(title, x, series: dict, xlabel="", width=640, height=420) -> str:
    """Minimal standalone SVG line plot; one polyline per series."""
    left, right, top, bottom = 60, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    xs = [float(v) for v in x]
    ys = [float(v) for s in series.values() for v in s]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{width / 2}" y="{top - 15}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
    ]
    for frac in (0, 0.25, 0.5, 0.75, 1):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 16}" text-anchor="middle" '
                   f'font-size="10">{xv:.3g}</text>')
        out.append(f'<text x="{left - 5}" y="{sy(yv) + 3:.1f}" text-anchor="end" '
                   f'font-size="10">{yv:.3g}</text>')
    for i, (name, vals) in enumerate(series.items()):
        color = colors[i % len(colors)]
        pts = " ".join(f"{sx(a):.2f},{sy(float(b)):.2f}" for a, b in zip(xs, vals))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{left + pw - 5}" y="{top + 15 + 14 * i}" text-anchor="end" '
                   f'font-size="11" fill="{color}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_figure(figure: str, grid="0.001:0.999:0.001", out=None, svg=None) -> str:
    """Write the CSV for ``figure`` ("ternary" or "ratios"); return the CSV text."""
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}")
    points = parse_grid(grid) if isinstance(grid, str) else list(grid)
    curve = scan_curves(figure, points)
    rows = list(curve.rows())
    text = write_csv(out, curve.columns, rows)
    if svg is not None:
        x = [r[0] for r in rows]
        cols = curve.columns
        ycols = ["dg", "dmg", "d1"] if figure == "ternary" else ["r1", "r2", "r3"]
        series = {c: [r[cols.index(c)] for r in rows] for c in ycols}
        with open(svg, "w") as fh:
            fh.write(svg_plot(FIGURES[figure], x, series, xlabel=cols[0]))
    return text


def stats_rows(stats, alpha=None):
    """Rows ``d, tail, tail_float[, bound]`` for a :class:`DelayStats`."""
    for d, t in enumerate(stats.tail):
        row = [d, t, float(t)]
        if alpha is not None:
            row.append(tail_bound(alpha, d))
        yield row


def markov_check_command(source, d_max: int = 32, tol=1e-12, out=None):
    """Report the delay condition for ``source``; returns ``(text, csv_text)``.

    CSV columns: ``d, gamma, envelope`` with ``envelope = xi ** (d // K)``.
    """
    report = check_bounded_delay_condition(source)
    k = source.n_letters
    table = GammaTable(source)
    rows = [[d, table(d), report.xi ** (d // k)] for d in range(1, d_max + 1)]
    lines = []
    if isinstance(source, MemorylessSource):
        lines.append(f"memoryless source, alpha = {source.alpha()}; gamma(d) = alpha^d")
    else:
        lines.append(f"markov source: {source.n_states} states (order {source.order})")
    lines.append(report.summary())
    lines.append(f"K = {k}; envelope gamma(d) <= xi^floor(d/K) holds for d <= {d_max}: "
                 f"{all(g <= e for _, g, e in rows)}")
    if report.certified:
        value, err = memory_delay_bound(table, k, report.xi, tol)
        lines.append(f"expected delay bound: {float(value):.12g} (truncation error <= {float(err):.3g})")
    else:
        try:
            memory_delay_bound(table, k, report.xi, tol)
        except UncertifiedSourceError as exc:
            lines.append(f"no bound: {exc}")
    text = "\n".join(lines) + "\n"
    return text, write_csv(out, ["d", "gamma", "envelope"], rows)
