"""Hand-assembled SVG figures, byte-deterministic for fixed input.

No plotting library: every element is a formatted string with fixed decimal
precision, so identical inputs always produce identical files. Fixed
800x600 viewport. Axes and ticks are <path> elements; the scatter's
identity line is the only <line> in that figure, and data points are the
only <circle> elements.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import ShapeError, ValidationError
from .shapley import GlobalImportance

WIDTH = 800
HEIGHT = 600

POINT_COLOR = "#1f77b4"
IDENTITY_COLOR = "#d62728"
BAR_COLOR = "#4878a8"
AXIS_COLOR = "#333333"

# Heatmap endpoints: r=-1 blue, r=0 near-white, r=+1 red.
_NEG_RGB = (33, 102, 172)
_MID_RGB = (247, 247, 247)
_POS_RGB = (178, 24, 43)


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.2f}" y="24" font-family="sans-serif" '
        f'font-size="16" text-anchor="middle">{escape(title)}</text>',
    ]


def _text(x: float, y: float, s: str, size: int = 11, anchor: str = "middle") -> str:
    return (
        f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" '
        f'font-size="{size}" text-anchor="{anchor}">{escape(s)}</text>'
    )


def _path(x1: float, y1: float, x2: float, y2: float) -> str:
    return (
        f'<path d="M {x1:.2f} {y1:.2f} L {x2:.2f} {y2:.2f}" '
        f'stroke="{AXIS_COLOR}" stroke-width="1" fill="none"/>'
    )


def _write(path: str | Path, parts: list[str]) -> None:
    parts.append("</svg>")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(parts) + "\n", encoding="utf-8")


def render_scatter(
    y_true: Sequence[float],
    y_pred: Sequence[float],
    path: str | Path,
    title: str = "Actual vs predicted viewership",
) -> None:
    """Scatter of (actual, predicted) millions with a red identity line."""
    yt = np.asarray(y_true, dtype=np.float64)
    yp = np.asarray(y_pred, dtype=np.float64)
    if yt.shape != yp.shape or yt.ndim != 1:
        raise ShapeError("y_true and y_pred must be equal-length vectors")
    if yt.size == 0:
        raise ValidationError("cannot plot an empty scatter")
    left, right, top, bottom = 80.0, 30.0, 50.0, 70.0
    plot_w = WIDTH - left - right
    plot_h = HEIGHT - top - bottom
    lo = 0.0
    hi = float(max(yt.max(), yp.max())) * 1.05
    if hi <= lo:
        hi = 1.0

    def sx(v: float) -> float:
        return left + (v - lo) / (hi - lo) * plot_w

    def sy(v: float) -> float:
        return HEIGHT - bottom - (v - lo) / (hi - lo) * plot_h

    parts = _header(title)
    parts.append(_path(left, HEIGHT - bottom, WIDTH - right, HEIGHT - bottom))
    parts.append(_path(left, top, left, HEIGHT - bottom))
    for i in range(5):
        t = lo + i * (hi - lo) / 4
        parts.append(_path(sx(t), HEIGHT - bottom, sx(t), HEIGHT - bottom + 5))
        parts.append(_text(sx(t), HEIGHT - bottom + 20, f"{t:.1f}"))
        parts.append(_path(left - 5, sy(t), left, sy(t)))
        parts.append(_text(left - 10, sy(t) + 4, f"{t:.1f}", anchor="end"))
    parts.append(
        _text(left + plot_w / 2, HEIGHT - 20, "Actual viewers (millions)", size=13)
    )
    parts.append(
        f'<text x="22" y="{top + plot_h / 2:.2f}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 22 {top + plot_h / 2:.2f})">'
        "Predicted viewers (millions)</text>"
    )
    parts.append(
        f'<line x1="{sx(lo):.2f}" y1="{sy(lo):.2f}" x2="{sx(hi):.2f}" '
        f'y2="{sy(hi):.2f}" stroke="{IDENTITY_COLOR}" stroke-width="1.5"/>'
    )
    for a, p in zip(yt, yp):
        parts.append(
            f'<circle cx="{sx(float(a)):.2f}" cy="{sy(float(p)):.2f}" r="4" '
            f'fill="{POINT_COLOR}" fill-opacity="0.8"/>'
        )
    _write(path, parts)


def render_importance(
    importance: GlobalImportance,
    path: str | Path,
    title: str = "Shapley feature importance (mean |phi|, log space)",
) -> None:
    """Horizontal bars, largest importance at the top."""
    pairs = importance.ordered()
    if not pairs:
        raise ValidationError("cannot plot empty importance")
    left, right, top, bottom = 230.0, 80.0, 50.0, 30.0
    plot_w = WIDTH - left - right
    plot_h = HEIGHT - top - bottom
    vmax = max(v for _, v in pairs)
    if vmax <= 0:
        vmax = 1.0
    slot = plot_h / len(pairs)
    bar_h = slot * 0.7
    parts = _header(title)
    parts.append(_path(left, top, left, HEIGHT - bottom))
    for i, (name, value) in enumerate(pairs):
        y = top + i * slot + (slot - bar_h) / 2
        w = value / vmax * plot_w
        parts.append(
            f'<rect x="{left:.2f}" y="{y:.2f}" width="{w:.2f}" '
            f'height="{bar_h:.2f}" fill="{BAR_COLOR}"/>'
        )
        parts.append(_text(left - 8, y + bar_h / 2 + 4, name, anchor="end"))
        parts.append(
            _text(left + w + 8, y + bar_h / 2 + 4, f"{value:.4f}", anchor="start")
        )
    _write(path, parts)


def _heat_color(r: float) -> str:
    r = max(-1.0, min(1.0, r))
    if r < 0:
        lo, hi, t = _NEG_RGB, _MID_RGB, r + 1.0
    else:
        lo, hi, t = _MID_RGB, _POS_RGB, r
    rgb = tuple(round(a + (b - a) * t) for a, b in zip(lo, hi))
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def render_heatmap(
    corr: np.ndarray,
    labels: Sequence[str],
    path: str | Path,
    title: str = "Feature correlation matrix (Pearson r)",
) -> None:
    """Annotated correlation grid; each cell shows r to 2 decimals."""
    corr = np.asarray(corr, dtype=np.float64)
    k = len(labels)
    if corr.shape != (k, k):
        raise ShapeError(f"matrix {corr.shape} does not match {k} labels")
    if k == 0:
        raise ValidationError("cannot plot an empty heatmap")
    left, right, top, bottom = 190.0, 40.0, 60.0, 120.0
    cell = min((WIDTH - left - right) / k, (HEIGHT - top - bottom) / k)
    parts = _header(title)
    for i in range(k):
        for j in range(k):
            x = left + j * cell
            y = top + i * cell
            r = float(corr[i, j])
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell:.2f}" '
                f'height="{cell:.2f}" fill="{_heat_color(r)}" '
                f'stroke="#ffffff" stroke-width="1"/>'
            )
            parts.append(_text(x + cell / 2, y + cell / 2 + 4, f"{r:.2f}", size=10))
    for i, label in enumerate(labels):
        parts.append(
            _text(left - 8, top + i * cell + cell / 2 + 4, label, anchor="end")
        )
        x = left + i * cell + cell / 2
        y = top + k * cell + 14
        parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end" '
            f'transform="rotate(-45 {x:.2f} {y:.2f})">{escape(label)}</text>'
        )
    _write(path, parts)
