"""Hand-rolled SVG rendering of the entropy-vs-SNR sweep.

No plotting library: the output must be byte-identical across runs and
platforms, so every coordinate is formatted with fixed precision and
elements are emitted in a fixed order. The y-axis is pinned to [0, 1]
(normalized mean entropy) and the 100 dB pristine anchor sits past an
axis break on the right.
"""

from __future__ import annotations

import zlib
from pathlib import Path

from .entropy import PRISTINE_SNR_DB, SweepResult
from .errors import RamphoError
from .mixer import CONDITIONS

WIDTH, HEIGHT = 660, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 62, 18, 24, 50

CONDITION_COLORS = {"ENG": "#d62728", "CS": "#1f77b4", "SSN": "#7f7f7f"}
_FALLBACK_COLORS = ("#2ca02c", "#9467bd", "#8c564b", "#e377c2")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def fmt_snr(snr: float) -> str:
    """Compact SNR label: integers without a decimal point."""
    return f"{snr:g}"


class _Canvas:
    def __init__(self):
        self.parts: list[str] = []

    def add(self, element: str) -> None:
        self.parts.append(element)

    def line(self, x1, y1, x2, y2, stroke, width=1.0, dash: str | None = None) -> None:
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.add(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{width:g}"{dash_attr}/>'
        )

    def text(self, x, y, content, size=12, anchor="middle", fill="#222222", rotate=None) -> None:
        transform = (
            f' transform="rotate({rotate:g} {_fmt(x)} {_fmt(y)})"' if rotate is not None else ""
        )
        self.add(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" '
            f'font-size="{size:g}" text-anchor="{anchor}" fill="{fill}"{transform}>'
            f"{content}</text>"
        )

    def circle(self, x, y, r, fill) -> None:
        self.add(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r:g}" fill="{fill}"/>')

    def polyline(self, points, stroke, width=2.0, dash: str | None = None) -> None:
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.add(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width:g}"{dash_attr}/>'
        )


def _condition_order(result: SweepResult) -> list[str]:
    present = result.conditions()
    ordered = [c for c in CONDITIONS if c in present]
    ordered += sorted(c for c in present if c not in CONDITIONS)
    return ordered


def _color(condition: str) -> str:
    if condition in CONDITION_COLORS:
        return CONDITION_COLORS[condition]
    # crc32, not hash(): string hashing is salted per process
    return _FALLBACK_COLORS[zlib.crc32(condition.encode()) % len(_FALLBACK_COLORS)]


def render_plot(result: SweepResult) -> str:
    """The full SVG document as a string."""
    if not result.rows:
        raise RamphoError("cannot plot an empty sweep result")
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B
    x0, y0 = MARGIN_L, MARGIN_T

    masked = sorted(
        {r.snr_db for r in result.rows if r.snr_db < PRISTINE_SNR_DB}
    )
    has_pristine = any(r.snr_db >= PRISTINE_SNR_DB for r in result.rows)
    masked_w = plot_w * (0.82 if has_pristine else 1.0)
    pristine_x = x0 + plot_w * 0.94
    break_x = x0 + plot_w * 0.87

    def x_of(snr: float) -> float:
        if snr >= PRISTINE_SNR_DB and has_pristine:
            return pristine_x
        if not masked:
            return x0 + masked_w / 2.0
        lo, hi = masked[0], masked[-1]
        if hi == lo:
            return x0 + masked_w / 2.0
        return x0 + (snr - lo) / (hi - lo) * masked_w

    def y_of(value: float) -> float:
        clamped = min(max(value, 0.0), 1.0)
        return y0 + (1.0 - clamped) * plot_h

    svg = _Canvas()
    svg.add(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    svg.add(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>')

    for i in range(6):  # y grid and labels, 0.0 .. 1.0
        value = i / 5.0
        gy = y_of(value)
        svg.line(x0, gy, x0 + plot_w, gy, "#dddddd")
        svg.text(x0 - 8, gy + 4, f"{value:.1f}", anchor="end")
    svg.line(x0, y0, x0, y0 + plot_h, "#222222")
    svg.line(x0, y0 + plot_h, x0 + plot_w, y0 + plot_h, "#222222")

    for snr in masked:
        tx = x_of(snr)
        svg.line(tx, y0 + plot_h, tx, y0 + plot_h + 5, "#222222")
        svg.text(tx, y0 + plot_h + 18, fmt_snr(snr))
    if has_pristine:
        for dx in (-4.0, 4.0):  # axis break
            svg.line(break_x + dx - 3, y0 + plot_h + 6, break_x + dx + 3, y0 + plot_h - 6, "#222222")
        svg.line(pristine_x, y0 + plot_h, pristine_x, y0 + plot_h + 5, "#222222")
        svg.text(pristine_x, y0 + plot_h + 18, "pristine")

    svg.text(x0 + plot_w / 2.0, HEIGHT - 12, "SNR (dB)")
    svg.text(16, y0 + plot_h / 2.0, "Normalized mean entropy", rotate=-90.0)

    for pair, snr in sorted(result.crossover_points.items()):
        if snr is None:
            continue
        cx = x_of(snr)
        svg.line(cx, y0, cx, y0 + plot_h, "#444444", width=1.0, dash="5,4")
        svg.text(cx + 4, y0 + 12, f"{pair[0]}/{pair[1]} {snr:.1f} dB", anchor="start", size=11)

    order = _condition_order(result)
    for condition in order:
        color = _color(condition)
        curve = result.curve(condition)
        masked_pts = [(x_of(s), y_of(v)) for s, v in curve if s < PRISTINE_SNR_DB]
        pristine_pts = [(x_of(s), y_of(v)) for s, v in curve if s >= PRISTINE_SNR_DB]
        if len(masked_pts) >= 2:
            svg.polyline(masked_pts, color)
        if pristine_pts and masked_pts:
            (lx, ly), (px, py) = masked_pts[-1], pristine_pts[0]
            svg.line(lx, ly, px, py, color, width=2.0, dash="3,4")
        for px, py in masked_pts + pristine_pts:
            svg.circle(px, py, 3.5, color)

    legend_x = x0 + plot_w - 110
    legend_y = y0 + 10
    svg.add(
        f'<rect x="{_fmt(legend_x - 10)}" y="{_fmt(legend_y - 14)}" width="104" '
        f'height="{18 * len(order) + 10}" fill="#ffffff" stroke="#bbbbbb"/>'
    )
    for i, condition in enumerate(order):
        ly = legend_y + 18 * i
        svg.line(legend_x, ly, legend_x + 22, ly, _color(condition), width=2.5)
        svg.text(legend_x + 30, ly + 4, condition, anchor="start")

    svg.add("</svg>")
    return "\n".join(svg.parts) + "\n"


def emit_plot(result: SweepResult, path: str | Path) -> None:
    Path(path).write_bytes(render_plot(result).encode("utf-8"))
