"""Planar primitives: polygons, arc-length lookup, circle crossings, exact
disk/polygon intersection area and rigid alignment."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import Degenerate, NotSimple, VertexCountMismatch

VERTEX_SNAP = 1e-12  # relative to perimeter
ON_CIRCLE_TOL = 1e-9  # relative to radius


@dataclass(frozen=True, eq=False)
class Polygon:
    """Simple, counterclockwise polygon. Build it with :func:`validate_polygon`."""

    vertices: np.ndarray
    edge_lengths: np.ndarray = field(repr=False)
    s_vertices: np.ndarray = field(repr=False)
    perimeter: float

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def directions(self) -> np.ndarray:
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        return d / self.edge_lengths[:, None]

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.sqrt(((v[:, None, :] - v[None, :, :]) ** 2).sum(-1)).max())

    def vertex_index(self, s: float) -> int | None:
        """Index of the vertex at arc length ``s``, or None between vertices."""
        L = self.perimeter
        s = s % L
        k = int(np.searchsorted(self.s_vertices, s, side="right")) - 1
        tol = VERTEX_SNAP * L
        if abs(s - self.s_vertices[k]) <= tol:
            return k
        nxt = self.s_vertices[k + 1] if k + 1 < self.n else L
        if abs(nxt - s) <= tol:
            return (k + 1) % self.n
        return None


def signed_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _build(v: np.ndarray) -> Polygon:
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    s_vertices = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    return Polygon(v, lengths, s_vertices, float(lengths.sum()))


def validate_polygon(raw: Sequence[Sequence[float]] | np.ndarray) -> Polygon:
    """Check and normalise a raw vertex loop.

    Clockwise input is reversed. Raises :class:`Degenerate` for fewer than
    three distinct vertices or zero area and :class:`NotSimple` when two edges
    cross.
    """
    v = np.array(raw, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise Degenerate("need at least 3 vertices as (x, y) pairs")
    if not np.all(np.isfinite(v)):
        raise Degenerate("non-finite coordinate")
    if np.allclose(v[0], v[-1]) and len(v) > 3:
        v = v[:-1]
    diam = float(np.ptp(v, axis=0).max())
    if diam == 0.0:
        raise Degenerate("all vertices coincide")
    step = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
    if np.any(step <= 1e-12 * diam):
        raise Degenerate("consecutive vertices coincide")
    rel = v - v[0]
    far = rel[int(np.argmax(np.hypot(*rel.T)))]
    if np.abs(rel[:, 0] * far[1] - rel[:, 1] * far[0]).max() <= 1e-14 * diam * diam:
        raise Degenerate("all vertices are collinear")
    i, j = _kernels.first_self_intersection(np.ascontiguousarray(v[:, 0]), np.ascontiguousarray(v[:, 1]))
    if i >= 0:
        raise NotSimple(f"edges {i} and {j} intersect", edges=(int(i), int(j)))
    area = signed_area(v)
    if abs(area) <= 1e-14 * diam * diam:
        raise Degenerate("zero area")
    if area < 0:
        v = v[::-1].copy()
    return _build(v)


class BoundaryPoint(NamedTuple):
    s: float
    position: np.ndarray
    tangent_in: np.ndarray
    tangent_out: np.ndarray

    @property
    def is_vertex(self) -> bool:
        return not np.array_equal(self.tangent_in, self.tangent_out)


def point_at(polygon: Polygon, s: float) -> BoundaryPoint:
    L = polygon.perimeter
    s = float(s) % L
    dirs = polygon.directions
    k = polygon.vertex_index(s)
    if k is not None:
        return BoundaryPoint(
            float(polygon.s_vertices[k]), polygon.vertices[k].copy(), dirs[k - 1].copy(), dirs[k].copy()
        )
    i = int(np.searchsorted(polygon.s_vertices, s, side="right")) - 1
    p = polygon.vertices[i] + (s - polygon.s_vertices[i]) * dirs[i]
    return BoundaryPoint(s, p, dirs[i].copy(), dirs[i].copy())


def points_at(polygon: Polygon, s) -> np.ndarray:
    """Vectorised positions gamma(s) for an array of arc lengths."""
    s = np.asarray(s, dtype=float) % polygon.perimeter
    i = np.searchsorted(polygon.s_vertices, s, side="right") - 1
    return polygon.vertices[i] + (s - polygon.s_vertices[i])[:, None] * polygon.directions[i]


class Crossing(NamedTuple):
    s: float
    angle: float
    transverse: bool
    point: np.ndarray


def circle_crossings(polygon: Polygon, center, r: float) -> list[Crossing]:
    """All points of the boundary at distance ``r`` from ``center``, sorted by s.

    A vertex lying on the circle is reported once; it is transverse when the
    boundary just before it and just after it lie on opposite sides of the
    circle (an edge tangent to the circle counts as outside). Tangential
    touches are kept with ``transverse=False``.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    c = np.asarray(center, dtype=float)
    v = polygon.vertices
    n = polygon.n
    dirs = polygon.directions
    lens = polygon.edge_lengths
    tol = ON_CIRCLE_TOL * r
    rel = v - c
    dist = np.hypot(rel[:, 0], rel[:, 1])
    on = np.abs(dist - r) <= tol
    out: list[Crossing] = []

    for k in np.flatnonzero(on):
        u = rel[k] / dist[k]
        a_in = float(dirs[k - 1] @ u)
        a_out = float(dirs[k] @ u)
        inside_before = a_in > ON_CIRCLE_TOL
        inside_after = a_out < -ON_CIRCLE_TOL
        transverse = inside_before != inside_after
        out.append(Crossing(float(polygon.s_vertices[k]), math.atan2(rel[k, 1], rel[k, 0]), transverse, v[k].copy()))

    # edges parameterised by arc length t in [0, len]: |rel + t d|^2 = r^2
    b = np.einsum("ij,ij->i", rel, dirs)
    cc = np.einsum("ij,ij->i", rel, rel) - r * r
    disc = b * b - cc
    slack = tol * tol + 1e-15 * (b * b + np.abs(cc) + r * r)
    for i in np.flatnonzero(disc >= -slack):
        j = (i + 1) % n
        sq = math.sqrt(max(disc[i], 0.0))
        roots = [-b[i] - sq, -b[i] + sq]
        tangent = sq <= tol
        if tangent:
            roots = [-b[i]]
        for t in roots:
            if t < -tol or t > lens[i] + tol:
                continue
            p = v[i] + t * dirs[i]
            if (on[i] and np.hypot(*(p - v[i])) <= 10 * tol) or (on[j] and np.hypot(*(p - v[j])) <= 10 * tol):
                continue
            if t <= 0.0 or t >= lens[i]:
                continue
            q = p - c
            out.append(
                Crossing(float(polygon.s_vertices[i] + t), math.atan2(q[1], q[0]), not tangent, p)
            )
    out.sort(key=lambda x: x.s)
    return out


def disk_polygon_area(polygon: Polygon, center, r: float) -> float:
    """Exact area of the polygon inside the closed disk D(center, r)."""
    if r <= 0:
        raise ValueError("r must be positive")
    v = polygon.vertices
    a = _kernels.disk_area(
        np.ascontiguousarray(v[:, 0]), np.ascontiguousarray(v[:, 1]), float(center[0]), float(center[1]), float(r)
    )
    return min(max(a, 0.0), math.pi * r * r, polygon.area)


def disk_polygon_areas(polygon: Polygon, centers, r: float) -> np.ndarray:
    v = polygon.vertices
    c = np.asarray(centers, dtype=float).reshape(-1, 2)
    a = _kernels.disk_areas_at_points(
        np.ascontiguousarray(v[:, 0]),
        np.ascontiguousarray(v[:, 1]),
        np.ascontiguousarray(c[:, 0]),
        np.ascontiguousarray(c[:, 1]),
        float(r),
    )
    return np.clip(a, 0.0, min(math.pi * r * r, polygon.area))


def point_in_polygon(polygon: Polygon, points) -> np.ndarray:
    """Even-odd test for an array of points."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    v = polygon.vertices
    w = np.roll(v, -1, axis=0)
    px, py = p[:, 0:1], p[:, 1:2]
    cond = (v[None, :, 1] > py) != (w[None, :, 1] > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = v[None, :, 0] + (py - v[None, :, 1]) * (w[None, :, 0] - v[None, :, 0]) / (w[None, :, 1] - v[None, :, 1])
    return (np.sum(cond & (px < xint), axis=1) % 2) == 1


@dataclass(frozen=True)
class RigidTransform:
    angle: float
    translation: tuple[float, float]

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, -s], [s, c]])

    def apply(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return p @ self.matrix.T + np.asarray(self.translation)


def _kabsch_2d(a: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray, float]:
    ca, cb = a.mean(0), b.mean(0)
    p, q = a - ca, b - cb
    sxx = float(np.sum(p[:, 0] * q[:, 0] + p[:, 1] * q[:, 1]))
    sxy = float(np.sum(p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]))
    angle = math.atan2(sxy, sxx)
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    t = cb - rot @ ca
    rms = float(np.sqrt(np.mean(np.sum((a @ rot.T + t - b) ** 2, axis=1))))
    return angle, t, rms


def rigid_align(a: Polygon | np.ndarray, b: Polygon | np.ndarray) -> tuple[RigidTransform, float]:
    """Best rotation + translation taking ``a`` onto ``b``.

    Every cyclic relabelling of ``b``'s vertices is tried; the returned
    residual is the RMS vertex distance of the best one.
    """
    pa = a.vertices if isinstance(a, Polygon) else np.asarray(a, dtype=float)
    pb = b.vertices if isinstance(b, Polygon) else np.asarray(b, dtype=float)
    if len(pa) != len(pb):
        raise VertexCountMismatch(f"{len(pa)} vs {len(pb)} vertices")
    best = None
    for k in range(len(pb)):
        angle, t, rms = _kabsch_2d(pa, np.roll(pb, -k, axis=0))
        if best is None or rms < best[2]:
            best = (angle, t, rms)
    angle, t, rms = best
    return RigidTransform(angle, (float(t[0]), float(t[1]))), rms


def read_polygon_json(path) -> Polygon:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return validate_polygon(data["vertices"])


def polygon_to_json(vertices) -> str:
    v = vertices.vertices if isinstance(vertices, Polygon) else np.asarray(vertices)
    rows = ", ".join(f"[{x:.17g}, {y:.17g}]" for x, y in v)
    return '{"vertices": [' + rows + "]}\n"


def write_polygon_json(path, vertices) -> None:
    Path(path).write_text(polygon_to_json(vertices), encoding="utf-8")
