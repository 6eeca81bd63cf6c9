"""Test-corpus shapes: analytic curves and the polygons sampled from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Polygon, read_polygon_json, validate_polygon
from .smooth import Circle, Ellipse, Star

KINDS = ("polygon_file", "circle", "ellipse", "star", "rounded_square", "regular_ngon")


def regular_ngon(n: int, radius: float = 1.0, phase: float = 0.0) -> Polygon:
    t = phase + 2.0 * math.pi * np.arange(n) / n
    return validate_polygon(np.stack([radius * np.cos(t), radius * np.sin(t)], axis=1))


def unit_square() -> Polygon:
    return validate_polygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def rounded_rectangle(width: float, height: float, corner: float, n: int = 512) -> Polygon:
    """Rectangle [-w/2, w/2] x [0, h] with quarter-circle corners, sampled at n
    points equally spaced in arc length from the origin (bottom-side middle)."""
    if not 0.0 < corner <= 0.5 * min(width, height):
        raise ValueError("corner radius must lie in (0, min(width, height)/2]")
    a, b = 0.5 * width - corner, height - 2.0 * corner
    arc = 0.5 * math.pi * corner
    # (length, start point or arc center, heading or start angle, is_arc)
    segs = [
        (a, (0.0, 0.0), 0.0, False),
        (arc, (a, corner), -0.5 * math.pi, True),
        (b, (a + corner, corner), 0.5 * math.pi, False),
        (arc, (a, height - corner), 0.0, True),
        (2 * a, (a, height), math.pi, False),
        (arc, (-a, height - corner), 0.5 * math.pi, True),
        (b, (-a - corner, height - corner), -0.5 * math.pi, False),
        (arc, (-a, corner), math.pi, True),
        (a, (-a, 0.0), 0.0, False),
    ]
    lengths = np.array([sg[0] for sg in segs])
    starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    L = float(lengths.sum())
    pts = np.empty((n, 2))
    for k, sk in enumerate(L * np.arange(n) / n):
        i = int(np.searchsorted(starts, sk, side="right")) - 1
        _, (x0, y0), ang, is_arc = segs[i]
        u = sk - starts[i]
        if is_arc:
            phi = ang + u / corner
            pts[k] = x0 + corner * math.cos(phi), y0 + corner * math.sin(phi)
        else:
            pts[k] = x0 + u * math.cos(ang), y0 + u * math.sin(ang)
    keep = np.ones(n, dtype=bool)
    keep[1:] = np.hypot(*np.diff(pts, axis=0).T) > 1e-12 * L
    return validate_polygon(pts[keep])


@dataclass
class ShapeSpec:
    kind: str
    params: dict = field(default_factory=dict)
    resolution: int = 512

    def curve(self):
        """The analytic curve behind a parametric kind, or None."""
        p = self.params
        if self.kind == "circle":
            return Circle(p.get("radius", 1.0))
        if self.kind == "ellipse":
            return Ellipse(p.get("a", 2.0), p.get("b", 1.0))
        if self.kind == "star":
            return Star(p.get("radius", 1.0), p.get("amplitude", 0.25), int(p.get("lobes", 4)))
        return None

    def polygon(self) -> Polygon:
        p = self.params
        if self.kind not in KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.kind == "polygon_file":
            return read_polygon_json(p["path"])
        if self.kind == "regular_ngon":
            return regular_ngon(int(p.get("sides", 6)), p.get("radius", 1.0))
        if self.kind == "rounded_square":
            side = p.get("side", 1.0)
            w, h = p.get("width", side), p.get("height", side)
            corner = p.get("corner", 0.1 * side)
            if corner == 0:
                # sharp corners: the plain rectangle [0, w] x [0, h]
                return validate_polygon([[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]])
            return rounded_rectangle(w, h, corner, self.resolution)
        if self.resolution < 3:
            raise ValueError("resolution must be at least 3")
        return self.curve().polygon(self.resolution)
