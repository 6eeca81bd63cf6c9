"""Exact reconstructions from the area signature.

Polygons are recovered from g_r and the one-sided g_s at a single radius:
vertices show up as jumps of g_s, side lengths are the gaps between them and
each turning angle is the rotation between the two frames solved at the
vertex. Smooth curves are recovered from T-shaped data (a radial leg at one
boundary point plus the full boundary leg at the top radius) by marching
the exit point of the disk around the curve.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import (
    AngleSolveFailed,
    ClosureFailure,
    FrameLoss,
    NoSolution,
    NoVerticesDetected,
    TwoArcViolation,
)
from .geometry import Polygon, disk_polygon_area, point_at
from .invariant import Signature, solve_entry_exit_angles, tgl_frame_pair

Evaluator = Callable[[float], tuple[float, float, float]]


@dataclass
class ReconstructedPolygon:
    side_lengths: np.ndarray
    interior_angles: np.ndarray
    vertices: np.ndarray
    closure_residual: float
    vertex_s: np.ndarray
    psi_crosscheck: np.ndarray

    @property
    def exterior_angles(self) -> np.ndarray:
        return math.pi - self.interior_angles


def polygon_evaluator(polygon: Polygon, r: float) -> Evaluator:
    """Exact (g_r, g_s_minus, g_s_plus) of a known polygon, for vertex refinement."""

    def evaluate(s: float):
        fm, fp = tgl_frame_pair(polygon, s, r)
        return fp.g_r, fm.g_s, fp.g_s

    return evaluate


def _noise_floor(sig: Signature) -> float:
    return 1e-9 * sig.r if math.isfinite(sig.r) else 1e-12


def _jump_threshold(sig: Signature) -> float:
    """Ten times the median nonzero change of g_s between neighbouring rows."""
    floor = _noise_floor(sig)
    steps = np.abs(sig.g_s_minus[1:] - sig.g_s_plus[:-1])
    steps = steps[np.isfinite(steps) & (steps > floor)]
    return max(10.0 * float(np.median(steps)), floor) if steps.size else floor


def _refine(evaluate: Evaluator, a: float, b: float, tol: float, thr: float) -> float | None:
    """Bisect [a, b] down to the point where g_s jumps.

    Returns None when the jump shrinks away under refinement, i.e. g_s was
    merely steep (a square-root kink where the circle sweeps past a corner),
    or when the interval runs into samples without two-arc data.
    """
    ga = evaluate(a)[2]
    gb = evaluate(b)[1]
    while b - a > tol:
        m = 0.5 * (a + b)
        try:
            _, x, y = evaluate(m)
        except TwoArcViolation:
            # the interval reaches a band where the circle cuts the boundary
            # more than twice; a grid-sized vertex interval never does
            return None
        if abs(x - y) > thr:
            return m
        if abs(x - ga) <= abs(x - gb):
            a, ga = m, y
        else:
            b, gb = m, x
    return 0.5 * (a + b) if abs(gb - ga) > thr else None


ISOLATION = 4.0


def detect_vertices(sig: Signature, evaluate: Evaluator | None = None, threshold: float | None = None) -> np.ndarray:
    """Arc-length positions where the one-sided s-derivatives disagree.

    Rows whose own one-sided values differ beyond rounding (1e-9 r, or the
    given threshold) are vertices at that row, however small the turn. A jump
    between neighbouring rows marks a vertex inside the interval when it
    exceeds the threshold and stands at least four times above both adjacent
    row-to-row changes (steep but continuous g_s grows like a square root and
    fails that test). With an evaluator the interval is bisected down to
    1e-12 of the perimeter instead, and kept only if the jump survives.
    """
    thr = _jump_threshold(sig) if threshold is None else threshold
    s, gm, gp = sig.s, sig.g_s_minus, sig.g_s_plus
    n = len(s)
    L = sig.length if sig.length else (s[-1] + (s[-1] - s[0]) / max(n - 1, 1))
    row = np.abs(gp - gm) > (_noise_floor(sig) if threshold is None else threshold)
    found = [float(x) for x in s[row]]
    periodic = bool(sig.length) and n > 2
    # step i runs from row i to row i+1; the last one wraps when periodic
    nxt = np.roll(np.arange(n), -1)
    steps = np.abs(gm[nxt] - gp)
    if not periodic:
        steps[-1] = np.nan
    with np.errstate(invalid="ignore"):
        for i in np.flatnonzero(steps > thr):
            j = nxt[i]
            if row[i] or row[j]:
                continue
            a, b = s[i], s[j] + (L if j == 0 else 0.0)
            if evaluate is not None:
                x = _refine(evaluate, a, b, 1e-12 * L, thr)
            else:
                around = [steps[i - 1] if (i > 0 or periodic) else np.nan, steps[j] if (j > 0 or periodic) else np.nan]
                around = [v for v in around if np.isfinite(v)]
                x = 0.5 * (a + b) if all(steps[i] > ISOLATION * v for v in around) else None
            if x is not None:
                found.append(x % L)
    if not found:
        raise NoVerticesDetected("one-sided s-derivatives never disagree: no vertices")
    return np.array(sorted(found))


def _vertex_data(sig: Signature, s: float, evaluate: Evaluator | None, L: float):
    if evaluate is not None:
        return evaluate(s)
    k = int(np.argmin(np.abs(sig.s - s)))
    if abs(sig.s[k] - s) <= 1e-12 * L:
        return sig.g_r[k], sig.g_s_minus[k], sig.g_s_plus[k]
    # vertex between rows: left row for the incoming side, right row for the outgoing side
    i = int(np.searchsorted(sig.s, s)) - 1
    j = (i + 1) % len(sig.s)
    w = (s - sig.s[i]) / ((sig.s[j] - sig.s[i]) % L)
    return (1 - w) * sig.g_r[i] + w * sig.g_r[j], sig.g_s_plus[i], sig.g_s_minus[j]


def reconstruct_polygon(
    sig: Signature,
    vertex_s=None,
    evaluate: Evaluator | None = None,
    closure_tol: float = 1e-6,
) -> ReconstructedPolygon:
    """Side lengths, interior angles and an assembled copy of the polygon.

    The first vertex sits at the origin with the first side along +x. When
    the signature does not carry the perimeter, the last side is the one
    that closes the loop and the residual measures the miss perpendicular
    to it.
    """
    r = sig.r
    if not (math.isfinite(r) and r > 0):
        raise ValueError("signature radius must be a positive number")
    vs = detect_vertices(sig, evaluate) if vertex_s is None else np.sort(np.asarray(vertex_s, dtype=float))
    n = len(vs)
    if n < 3:
        raise ClosureFailure(f"only {n} vertices detected")
    L = sig.length
    span = L if L else sig.s[-1] - sig.s[0]
    psi = np.empty(n)
    check = np.empty(n)
    for k, s in enumerate(vs):
        g_r, g_sm, g_sp = _vertex_data(sig, s, evaluate, span)
        if not all(np.isfinite([g_r, g_sm, g_sp])):
            raise TwoArcViolation(f"no one-sided data at the vertex s={s:.6g}")
        try:
            th1, th2 = solve_entry_exit_angles(g_r, g_sm, r)
            ph1, ph2 = solve_entry_exit_angles(g_r, g_sp, r)
        except NoSolution as exc:
            raise AngleSolveFailed(f"vertex s={s:.6g}: {exc}") from exc
        psi[k] = th1 - ph1
        check[k] = th2 - ph2
    sides = np.diff(vs)
    heading = np.concatenate([[0.0], np.cumsum(psi[1:])])
    pts = np.zeros((n, 2))
    for k in range(1, n):
        pts[k] = pts[k - 1] + sides[k - 1] * np.array([math.cos(heading[k - 1]), math.sin(heading[k - 1])])
    last_dir = np.array([math.cos(heading[-1]), math.sin(heading[-1])])
    if L:
        last = L - (vs[-1] - vs[0])
    else:
        last = float(-pts[-1] @ last_dir)
    residual = float(np.hypot(*(pts[-1] + last * last_dir)))
    sides = np.append(sides, last)
    scale = float(sides.sum())
    if residual > closure_tol * scale:
        raise ClosureFailure(f"closure residual {residual:.3g} exceeds {closure_tol:g} x perimeter")
    return ReconstructedPolygon(sides, math.pi - psi, pts, residual, vs, check)


# T-like data -----------------------------------------------------------------


@dataclass
class TLikeData:
    """Signature along the boundary at r_hat plus along the radii at s_hat.

    Rows are (coord, g, g_r, g_s) with coord = s for the boundary leg and
    coord = r for the radial leg.
    """

    r_hat: float
    s_hat: float
    boundary: np.ndarray
    radial: np.ndarray
    length: float | None = None

    def __post_init__(self):
        self.boundary = np.asarray(self.boundary, dtype=float).reshape(-1, 4)
        self.radial = np.asarray(self.radial, dtype=float).reshape(-1, 4)
        self.boundary = self.boundary[np.argsort(self.boundary[:, 0])]
        self.radial = self.radial[np.argsort(self.radial[:, 0])]


def _shape_values(shape, s: float, r: float) -> tuple[float, float, float]:
    if isinstance(shape, Polygon):
        fr = tgl_frame_pair(shape, s, r)[1]
        return disk_polygon_area(shape, point_at(shape, s).position, r), fr.g_r, fr.g_s
    fr = shape.frame(s, r)
    return shape.g(s, r), fr.g_r, fr.g_s


def tlike_data(shape, r_hat: float, s_hat: float = 0.0, n_boundary: int = 4096, n_radial: int = 256) -> TLikeData:
    """Forward-generate T-shaped data from a polygon or a smooth curve.

    Boundary coordinates are measured from s_hat, so the radial leg sits at
    coordinate 0 of the returned data.
    """
    L = shape.perimeter
    ss = L * np.arange(n_boundary) / n_boundary
    boundary = [(s, *_shape_values(shape, s_hat + s, r_hat)) for s in ss]
    rs = r_hat * np.arange(1, n_radial + 1) / n_radial
    radial = [(r, *_shape_values(shape, s_hat, r)) for r in rs]
    return TLikeData(r_hat, 0.0, boundary, radial, length=L)


def _angles(g_r: float, g_s: float, r: float, where: str):
    if not (np.isfinite(g_r) and np.isfinite(g_s)):
        raise TwoArcViolation(f"missing derivative data at {where}")
    try:
        return solve_entry_exit_angles(g_r, g_s, r)
    except NoSolution as exc:
        raise TwoArcViolation(f"{where}: {exc}") from exc


def _seed(data: TLikeData):
    """Curve inside D(gamma(s_hat), r_hat): entry points, the center, exit points."""
    entry, exit_ = [], []
    for r, _, g_r, g_s in data.radial:
        if r <= 0:
            continue
        t1, t2 = _angles(g_r, g_s, r, f"radial row r={r:.6g}")
        exit_.append(r * np.array([math.cos(t1), math.sin(t1)]))
        entry.append(r * np.array([math.cos(t2), math.sin(t2)]))
    if not exit_:
        raise TwoArcViolation("no radial rows")
    pts = np.vstack([entry[::-1], [[0.0, 0.0]], exit_])
    sigma = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    sigma -= sigma[len(entry)]
    return pts, sigma


def _backward_anchor(pts, sigma, c, k, r):
    """Last point before index k+1 (walking backwards) where the polyline leaves D(c, r)."""
    lo = int(np.searchsorted(sigma, sigma[k] - 2.5 * r))
    window = pts[lo : k + 1]
    d = np.hypot(*(window - c).T)
    outside = np.flatnonzero(d >= r)
    if outside.size == 0:
        return None
    j = lo + int(outside[-1])
    if j + 1 > k:
        return None
    a, b = pts[j], pts[j + 1]
    u = b - a
    f = a - c
    qa, qb, qc = u @ u, 2 * (f @ u), f @ f - r * r
    disc = max(qb * qb - 4 * qa * qc, 0.0)
    t = (-qb - math.sqrt(disc)) / (2 * qa)
    return a + min(max(t, 0.0), 1.0) * u


def reconstruct_tlike(data: TLikeData, step: float, length: float | None = None) -> np.ndarray:
    """March the disk center around the curve and return the traced polyline.

    The curve is normalised so that gamma(s_hat) = (0, 0) with unit tangent
    (1, 0). At each new center the entry point (the backward intersection of
    the circle with the curve traced so far) fixes the frame, and the exit
    angle from the boundary row places the next point.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if len(data.radial) == 0:
        raise TwoArcViolation("T-like data needs a radial leg")
    if len(data.boundary) < 2:
        raise TwoArcViolation("T-like data needs a boundary leg")
    r = data.r_hat
    bs = data.boundary[:, 0] - data.s_hat
    L = length or data.length or float(bs[-1] + (bs[-1] - bs[0]) / (len(bs) - 1))
    pts, sigma = _seed(data)
    pts, sigma = list(pts), list(sigma)
    n_steps = int(math.floor(L / step + 1e-9))
    for i in range(1, n_steps + 1):
        sc = i * step
        P, S = np.asarray(pts), np.asarray(sigma)
        if sc >= S[-1]:
            raise FrameLoss(f"marched past the traced curve at s={sc:.6g}")
        k = int(np.searchsorted(S, sc, side="right")) - 1
        w = (sc - S[k]) / (S[k + 1] - S[k])
        c = (1 - w) * P[k] + w * P[k + 1]
        if 0 < k < len(P) - 1:
            tan = (P[k + 1] - P[k - 1]) / (S[k + 1] - S[k - 1])
            if math.hypot(*tan) < 0.5:
                raise FrameLoss(f"tangent estimate collapsed at s={sc:.6g}")
        anchor = _backward_anchor(P, S, c, k, r)
        if anchor is None:
            raise FrameLoss(f"no backward intersection at s={sc:.6g}")
        row = [np.interp(sc, bs, data.boundary[:, j], period=L) for j in (2, 3)]
        t1, t2 = _angles(row[0], row[1], r, f"boundary row s={sc:.6g}")
        alpha = math.atan2(*(anchor - c)[::-1]) - t2
        new = c + r * np.array([math.cos(alpha + t1), math.sin(alpha + t1)])
        pts.append(new)
        sigma.append(sigma[-1] + math.hypot(*(new - pts[-2])))
    return np.asarray(pts)


_TDATA_HEADER = ["leg", "coord", "g", "g_r", "g_s"]


def tdata_to_csv(data: TLikeData) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_TDATA_HEADER)
    for leg, rows in (("boundary", data.boundary), ("radial", data.radial)):
        for row in rows:
            w.writerow([leg] + [f"{x:.17g}" for x in row])
    return buf.getvalue()


def write_tdata_csv(path, data: TLikeData) -> None:
    Path(path).write_text(tdata_to_csv(data), encoding="utf-8")


def read_tdata_csv(path) -> TLikeData:
    """Parse T-data; r_hat is the largest radial coordinate and s_hat is 0."""
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != _TDATA_HEADER:
        raise ValueError(f"expected header {','.join(_TDATA_HEADER)}")
    legs: dict[str, list] = {"boundary": [], "radial": []}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5 or row[0].strip() not in legs:
            raise ValueError(f"line {lineno}: malformed T-data row")
        legs[row[0].strip()].append([float(x) if x.strip() else math.nan for x in row[1:]])
    if not legs["radial"]:
        raise TwoArcViolation("T-data has no radial leg")
    if not legs["boundary"]:
        raise TwoArcViolation("T-data has no boundary leg")
    radial = np.array(legs["radial"])
    return TLikeData(float(radial[:, 0].max()), 0.0, legs["boundary"], radial)
