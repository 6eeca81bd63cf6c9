"""Minimal SVG overlays: one path per shape plus a scale bar."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MARGIN = 0.05


@dataclass
class Layer:
    points: np.ndarray
    label: str
    dashed: bool = False
    closed: bool = True
    color: str = "black"


def _nice_length(span: float) -> float:
    """A 1, 2 or 5 times power of ten near a fifth of the span."""
    target = span / 5.0
    base = 10.0 ** math.floor(math.log10(target))
    for k in (5.0, 2.0, 1.0):
        if k * base <= target:
            return k * base
    return base


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render(layers: list[Layer], width_px: int = 600) -> str:
    """SVG text; y is flipped so the picture has the usual math orientation."""
    if not layers:
        raise ValueError("nothing to draw")
    allpts = np.vstack([np.asarray(ly.points, dtype=float) for ly in layers])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    pad = MARGIN * span
    x0, y0 = lo - pad
    w, h = span + 2.0 * pad
    # user coordinates (x, -y), so the viewBox starts at -(top)
    vb = (x0, -(y0 + h), w, h)
    stroke = 0.004 * max(w, h)
    height_px = int(round(width_px * h / w))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}" height="{height_px}" '
        f'viewBox="{" ".join(_fmt(v) for v in vb)}">'
    ]
    for ly in layers:
        p = np.asarray(ly.points, dtype=float)
        d = "M " + " L ".join(f"{_fmt(x)} {_fmt(-y)}" for x, y in p)
        if ly.closed:
            d += " Z"
        dash = f' stroke-dasharray="{_fmt(4 * stroke)} {_fmt(2 * stroke)}"' if ly.dashed else ""
        out.append(
            f'<path d="{d}" fill="none" stroke="{ly.color}" stroke-width="{_fmt(stroke)}"{dash}>'
            f"<title>{ly.label}</title></path>"
        )
    bar = _nice_length(float(span[0]))
    bx, by = x0 + 0.5 * pad[0], -(y0 + 0.5 * pad[1])
    out.append(
        f'<line x1="{_fmt(bx)}" y1="{_fmt(by)}" x2="{_fmt(bx + bar)}" y2="{_fmt(by)}" '
        f'stroke="black" stroke-width="{_fmt(stroke)}"/>'
    )
    out.append(
        f'<text x="{_fmt(bx)}" y="{_fmt(by - stroke)}" font-size="{_fmt(0.4 * pad[1] + stroke)}">'
        f"scale {_fmt(bar)}</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def overlay(target, result, *, target_label="target", result_label="result", closed=True) -> str:
    """Target dashed, result solid."""
    return render(
        [
            Layer(np.asarray(target), target_label, dashed=True, closed=closed, color="gray"),
            Layer(np.asarray(result), result_label, dashed=False, closed=closed, color="black"),
        ]
    )


def write_svg(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
