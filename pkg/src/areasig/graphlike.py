"""Graph-like, tangent-cone graph-like and two-arc checks at a fixed radius,
plus the equal-arc-length polygonal approximation of a TCGL boundary."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotTCGLSource, TwoArcViolation
from .geometry import Polygon, circle_crossings, point_at, points_at, validate_polygon

MARGIN_TOL = 1e-9
SPAN_TOL = 1e-12


@dataclass
class SampleRecord:
    s: float
    crossing_count: int
    two_arc: bool
    tcgl_ok: bool | None = None
    worst_margin: float | None = None


@dataclass
class TCGLReport:
    radius: float
    passed: bool
    samples: list[SampleRecord] = field(default_factory=list)
    first_failure: float | None = None

    @property
    def failures(self) -> list[SampleRecord]:
        return [rec for rec in self.samples if not _sample_ok(rec)]

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "pass": self.passed,
            "failures": [
                {"s": f.s, "crossing_count": f.crossing_count, "margin": _json_num(f.worst_margin)}
                for f in self.failures
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _json_num(x):
    if x is None or not math.isfinite(x):
        return None
    return x


def _sample_ok(rec: SampleRecord) -> bool:
    return rec.two_arc and rec.tcgl_ok is not False


def _samples(polygon: Polygon, n_samples: int) -> np.ndarray:
    L = polygon.perimeter
    fill = np.linspace(0.0, L, max(int(n_samples), 0), endpoint=False)
    s = np.unique(np.concatenate([polygon.s_vertices, fill]))
    # drop fill points that merely duplicate a vertex within snapping tolerance
    keep = [s[0]]
    for x in s[1:]:
        if x - keep[-1] > 1e-12 * L:
            keep.append(x)
    return np.array(keep)


def _arc_pair(polygon: Polygon, s: float, r: float):
    """(count, s_minus, s_plus) for the disk at gamma(s); arc ends None unless two-arc."""
    bp = point_at(polygon, s)
    crossings = circle_crossings(polygon, bp.position, r)
    if len(crossings) != 2 or not all(c.transverse for c in crossings):
        return bp, len(crossings), None, None
    L = polygon.perimeter
    ahead = [(c.s - bp.s) % L for c in crossings]
    if ahead[0] < ahead[1]:
        return bp, 2, crossings[1].s, crossings[0].s
    return bp, 2, crossings[0].s, crossings[1].s


def arc_edges(polygon: Polygon, s_minus: float, s_plus: float) -> np.ndarray:
    """Indices of the edges met by the boundary arc running from s_minus to s_plus."""
    L = polygon.perimeter
    length = (s_plus - s_minus) % L
    sv = polygon.s_vertices
    k = int(np.searchsorted(sv, s_minus % L, side="right")) - 1
    covered = sv[k] + polygon.edge_lengths[k] - s_minus % L
    out = [k]
    while covered < length - 1e-12 * L:
        k = (k + 1) % polygon.n
        out.append(k)
        covered += polygon.edge_lengths[k]
    return np.array(out)


def fits_open_half_plane(directions: np.ndarray, tol: float = SPAN_TOL) -> bool:
    """True when some w has <w, d> > 0 for every direction d.

    That is exactly when a connected polyline with these edge directions is
    the graph of a function in some orientation.
    """
    ang = np.sort(np.arctan2(directions[:, 1], directions[:, 0]))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2.0 * math.pi]]))
    return bool(gaps.max() > math.pi + tol)


def _tcgl_sample(polygon: Polygon, s: float, r: float) -> SampleRecord:
    bp, count, s_minus, s_plus = _arc_pair(polygon, s, r)
    if s_minus is None:
        return SampleRecord(bp.s, count, False, False, -math.inf)
    d = polygon.directions[arc_edges(polygon, s_minus, s_plus)]
    margin = float(min((d @ bp.tangent_in).min(), (d @ bp.tangent_out).min()))
    ok = margin >= -MARGIN_TOL and fits_open_half_plane(d)
    return SampleRecord(bp.s, count, True, ok, margin)


def check_tcgl(polygon: Polygon, r: float, n_samples: int = 512) -> TCGLReport:
    """Sampled tangent-cone graph-like verdict at radius r.

    Each sample needs exactly two transverse crossings. The in-disk arc must
    then project monotonically onto both cone generators (the margin is the
    smallest edge/generator inner product and may touch zero) and be strictly
    graph-like in at least one orientation.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    records = [_tcgl_sample(polygon, s, r) for s in _samples(polygon, n_samples)]
    return _report(r, records)


def check_two_arc(polygon: Polygon, r: float, n_samples: int = 512) -> TCGLReport:
    """Sampled two-arc property: the circle meets the boundary exactly twice."""
    if r <= 0:
        raise ValueError("r must be positive")
    records = []
    for s in _samples(polygon, n_samples):
        # a tangential touch among two crossings still breaks the two-arc picture
        bp, count, s_minus, _ = _arc_pair(polygon, s, r)
        records.append(SampleRecord(bp.s, count, s_minus is not None))
    return _report(r, records)


def check_tgl_curve(curve, r: float, n_samples: int = 512, arc_points: int = 64) -> TCGLReport:
    """Sampled tangentially graph-like verdict for a smooth parametric curve.

    The tangent along the in-disk arc must have a positive component along
    the tangent at the disk center; the margin is the smallest such component.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    L = curve.perimeter
    records = []
    for s in L * np.arange(n_samples) / n_samples:
        try:
            ts, _, t_exit, t_entry = curve._crossing_pair(s, r)
        except TwoArcViolation as exc:
            records.append(SampleRecord(float(s), exc.crossing_count, False, False, -math.inf))
            continue
        span = (t_exit - t_entry) % (2.0 * math.pi)
        tt = t_entry + span * np.linspace(0.0, 1.0, arc_points)
        d = curve.d1(tt)
        d = d / np.hypot(d[:, 0], d[:, 1])[:, None]
        margin = float((d @ curve.tangent_at_t(ts)).min())
        records.append(SampleRecord(float(s), 2, True, margin > MARGIN_TOL, margin))
    return _report(r, records)


def _report(r: float, records: list[SampleRecord]) -> TCGLReport:
    bad = [rec.s for rec in records if not _sample_ok(rec)]
    return TCGLReport(r, not bad, records, bad[0] if bad else None)


def largest_passing_radius(polygon: Polygon, check=check_tcgl, n_samples: int = 512, tol: float = 1e-6) -> float:
    """Bisection for the largest r at which ``check`` passes, assuming it passes below."""
    lo, hi = 0.0, polygon.diameter
    while hi - lo > tol * polygon.diameter:
        mid = 0.5 * (lo + hi)
        if check(polygon, mid, n_samples).passed:
            lo = mid
        else:
            hi = mid
    return lo


def _disk_pieces(polygon: Polygon, center, r: float) -> list[np.ndarray]:
    """Connected pieces of the boundary inside the closed disk, as polylines."""
    c = np.asarray(center, dtype=float)
    L = polygon.perimeter
    crossings = circle_crossings(polygon, c, r)
    v = polygon.vertices
    if not crossings:
        if np.hypot(*(v[0] - c)) <= r:
            return [np.vstack([v, v[:1]])]
        return []
    cuts = [x.s for x in crossings]
    pieces = []
    for a, b in zip(cuts, cuts[1:] + [cuts[0] + L]):
        if b - a <= 1e-12 * L:
            continue
        mid = points_at(polygon, [0.5 * (a + b)])[0]
        if np.hypot(*(mid - c)) > r:
            continue
        inner = [sv if sv >= a else sv + L for sv in polygon.s_vertices]
        inner = sorted(x for x in inner if a < x < b)
        pts = points_at(polygon, np.array([a] + inner + [b]))
        pieces.append(pts)
    return pieces


def graph_orientation(polygon: Polygon, center, r: float, n_orientations: int = 3600) -> float | None:
    """An angle phi such that the boundary inside D(center, r) is a graph over
    the direction (cos phi, sin phi), or None if no scanned orientation works."""
    pieces = _disk_pieces(polygon, center, r)
    if not pieces:
        return None
    phis = np.linspace(0.0, math.pi, n_orientations, endpoint=False)
    w = np.stack([np.cos(phis), np.sin(phis)], axis=1)
    ok = np.ones(n_orientations, dtype=bool)
    intervals = []
    for pts in pieces:
        d = np.diff(pts, axis=0)
        d = d[np.hypot(d[:, 0], d[:, 1]) > 0]
        proj = d @ w.T
        mono = np.all(proj > SPAN_TOL, axis=0) | np.all(proj < -SPAN_TOL, axis=0)
        ok &= mono
        p = pts @ w.T
        intervals.append((p.min(axis=0), p.max(axis=0)))
    for i in range(len(intervals)):
        for j in range(i + 1, len(intervals)):
            lo_i, hi_i = intervals[i]
            lo_j, hi_j = intervals[j]
            ok &= (hi_i < lo_j) | (hi_j < lo_i)
    idx = np.flatnonzero(ok)
    return float(phis[idx[0]]) if idx.size else None


def is_graph_like(polygon: Polygon, center, r: float, n_orientations: int = 3600) -> bool:
    return graph_orientation(polygon, center, r, n_orientations) is not None


def is_tangentially_graph_like(polygon: Polygon, s: float, r: float) -> bool:
    """Graph-like over the tangent at gamma(s) (outgoing tangent at a vertex)."""
    bp = point_at(polygon, s)
    t = bp.tangent_out
    pieces = _disk_pieces(polygon, bp.position, r)
    intervals = []
    for pts in pieces:
        seg = np.diff(pts, axis=0)
        d = seg[np.hypot(seg[:, 0], seg[:, 1]) > 0] @ t
        if not (np.all(d > SPAN_TOL) or np.all(d < -SPAN_TOL)):
            return False
        p = pts @ t
        intervals.append((p.min(), p.max()))
    intervals.sort()
    return all(a[1] < b[0] for a, b in zip(intervals, intervals[1:]))


def max_deviation(points, polygon: Polygon) -> float:
    """Largest distance from any of ``points`` to the polygon boundary."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    a = polygon.vertices
    d = np.roll(a, -1, axis=0) - a
    best = np.full(len(p), np.inf)
    for i in range(polygon.n):
        rel = p - a[i]
        t = np.clip(rel @ d[i] / (d[i] @ d[i]), 0.0, 1.0)
        q = rel - t[:, None] * d[i]
        best = np.minimum(best, np.hypot(q[:, 0], q[:, 1]))
    return float(best.max())


def tcgl_polygon_approximation(source, r: float, epsilon: float, *, n_samples: int = 512, check: bool = True) -> Polygon:
    """Inscribed polygon with vertices spaced at most epsilon/3 apart in arc length.

    ``source`` is a Polygon or a smooth parametric curve. With ``check`` the
    source is first verified TCGL (TGL for a curve) at radius r.
    """
    if not 0.0 < epsilon < r:
        raise ValueError("epsilon must lie in (0, r)")
    L = source.perimeter
    if isinstance(source, Polygon):
        verdict = check_tcgl(source, r, n_samples) if check else None

        def place(s):
            return points_at(source, s)

    else:
        verdict = check_tgl_curve(source, r, n_samples) if check else None

        def place(s):
            return np.array([source.point(x) for x in s])

    if verdict is not None and not verdict.passed:
        raise NotTCGLSource(f"source is not TCGL at r={r:.6g}")
    n = max(3, math.ceil(L / (epsilon / 3.0)))
    s = L * np.arange(n) / n
    return validate_polygon(place(s))
