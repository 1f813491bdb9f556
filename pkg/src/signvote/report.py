"""CSV emission per the fixed schemas, plus dependency-free SVG line charts.

CSV is the source of truth; charts are rendered from the same rows.
Floats are written in scientific notation with 13 significant digits.
Files are written atomically (temp file, then rename) so partial output
never appears under the final name.
"""

from __future__ import annotations

import csv
import io
import math
import os
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .sim import RunResult, SweepPoint

__all__ = [
    "TRAJECTORY_COLUMNS",
    "SUMMARY_COLUMNS",
    "atomic_write_text",
    "trajectory_rows",
    "summary_rows",
    "write_trajectory_csv",
    "write_summary_csv",
    "validate_trajectory_csv",
    "validate_summary_csv",
    "line_chart_svg",
]

TRAJECTORY_COLUMNS = ("step", "objective", "grad_l1", "lr", "flipped_coords", "tie_coords")
SUMMARY_COLUMNS = ("axis_value", "repeat", "final_objective", "mean_flip_rate", "seed")


def _fmt(value: float) -> str:
    return f"{value:.12e}"


def atomic_write_text(path: "str | Path", text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def trajectory_rows(result: RunResult) -> list[list[str]]:
    rows = []
    for rec in result.trajectory:
        rows.append(
            [
                str(rec.step),
                _fmt(rec.objective_value),
                _fmt(rec.grad_l1),
                _fmt(rec.lr),
                str(rec.flipped_coords),
                str(rec.tie_coords),
            ]
        )
    return rows


def axis_label(value: object) -> str:
    return value.value if isinstance(value, Enum) else str(value)


def summary_rows(points: Sequence[SweepPoint]) -> list[list[str]]:
    rows = []
    for pt in points:
        if pt.result is None:
            rows.append([axis_label(pt.axis_value), str(pt.repeat), "", "", str(pt.seed)])
        else:
            rows.append(
                [
                    axis_label(pt.axis_value),
                    str(pt.repeat),
                    _fmt(pt.result.final_objective),
                    _fmt(pt.result.mean_flip_rate()),
                    str(pt.seed),
                ]
            )
    return rows


def _render_csv(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_trajectory_csv(path: "str | Path", result: RunResult) -> None:
    atomic_write_text(path, _render_csv(TRAJECTORY_COLUMNS, trajectory_rows(result)))


def write_summary_csv(path: "str | Path", points: Sequence[SweepPoint]) -> None:
    atomic_write_text(path, _render_csv(SUMMARY_COLUMNS, summary_rows(points)))


def _read_csv(path: "str | Path") -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    return rows[0], rows[1:]


def validate_trajectory_csv(path: "str | Path", expected_rows: "int | None" = None) -> None:
    """Raise ValueError if the file does not conform to the trajectory schema."""
    header, rows = _read_csv(path)
    if header != list(TRAJECTORY_COLUMNS):
        raise ValueError(f"{path}: header {header} != {list(TRAJECTORY_COLUMNS)}")
    if expected_rows is not None and len(rows) != expected_rows:
        raise ValueError(f"{path}: {len(rows)} rows, expected {expected_rows}")
    for i, row in enumerate(rows):
        if len(row) != len(TRAJECTORY_COLUMNS):
            raise ValueError(f"{path}: row {i} has {len(row)} fields")
        int(row[0]), int(row[4]), int(row[5])
        for field in (row[1], row[2], row[3]):
            if not math.isfinite(float(field)):
                raise ValueError(f"{path}: row {i} has non-finite value {field!r}")


def validate_summary_csv(path: "str | Path", expected_rows: "int | None" = None) -> None:
    """Raise ValueError if the file does not conform to the summary schema."""
    header, rows = _read_csv(path)
    if header != list(SUMMARY_COLUMNS):
        raise ValueError(f"{path}: header {header} != {list(SUMMARY_COLUMNS)}")
    if expected_rows is not None and len(rows) != expected_rows:
        raise ValueError(f"{path}: {len(rows)} rows, expected {expected_rows}")
    for i, row in enumerate(rows):
        if len(row) != len(SUMMARY_COLUMNS):
            raise ValueError(f"{path}: row {i} has {len(row)} fields")
        int(row[1]), int(row[4])
        for field in (row[2], row[3]):
            if field:  # empty for failed sweep points
                float(field)


# ---------------------------------------------------------------- SVG ---

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")

_WIDTH, _HEIGHT = 760, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 160, 40, 50


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(1, count - 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(v)
        v += step
    return ticks


def line_chart_svg(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """Render labeled (x, y) polylines with axes and a legend.

    The y axis switches to log10 when every value is positive and the
    dynamic range exceeds three decades; tick labels then show decades.
    Output contains nothing non-deterministic.
    """
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if not xs_all:
        raise ValueError("line chart needs at least one point")

    log_y = min(ys_all) > 0 and max(ys_all) / min(ys_all) > 1e3
    tr_y = (lambda v: math.log10(v)) if log_y else (lambda v: v)
    ys_tr = [tr_y(y) for y in ys_all]

    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_tr), max(ys_tr)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_T + (1.0 - (tr_y(y) - y_lo) / (y_hi - y_lo)) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{_esc(title)}</text>',
    ]

    axis_y = _MARGIN_T + plot_h
    out.append(
        f'<line x1="{_MARGIN_L}" y1="{axis_y}" x2="{_MARGIN_L + plot_w}" y2="{axis_y}" '
        f'stroke="black" stroke-width="1"/>'
    )
    out.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" y2="{axis_y}" '
        f'stroke="black" stroke-width="1"/>'
    )

    for tick in _nice_ticks(x_lo, x_hi):
        tx = px(tick)
        out.append(f'<line x1="{tx:.2f}" y1="{axis_y}" x2="{tx:.2f}" y2="{axis_y + 5}" stroke="black"/>')
        out.append(
            f'<text x="{tx:.2f}" y="{axis_y + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick:g}</text>'
        )
    if log_y:
        lo_dec, hi_dec = math.floor(y_lo), math.ceil(y_hi)
        tick_values = [float(d) for d in range(lo_dec, hi_dec + 1)]
    else:
        tick_values = _nice_ticks(y_lo, y_hi)
    for tv in tick_values:
        ty = _MARGIN_T + (1.0 - (tv - y_lo) / (y_hi - y_lo)) * plot_h
        if ty < _MARGIN_T - 1 or ty > axis_y + 1:
            continue
        label = f"1e{tv:g}" if log_y else f"{tv:g}"
        out.append(f'<line x1="{_MARGIN_L - 5}" y1="{ty:.2f}" x2="{_MARGIN_L}" y2="{ty:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{_MARGIN_L - 8}" y="{ty + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{label}</text>'
        )

    out.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_esc(x_label)}</text>'
    )
    out.append(
        f'<text x="18" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {_MARGIN_T + plot_h / 2:.1f})">{_esc(y_label)}</text>'
    )

    for idx, (label, xs, ys) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = _MARGIN_T + 14 + idx * 18
        lx = _MARGIN_L + plot_w + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" font-size="11">{_esc(label)}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
