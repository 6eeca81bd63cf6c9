"""The area signature g(s, r) along a polygon boundary and its first partials.

The r-derivative is the length of the circle arc that lies inside the shape,
r * (theta2 - theta1); the s-derivative is the height difference of the entry
and exit points, r * (sin theta2 - sin theta1), measured in the frame of the
(one-sided) tangent at the disk center.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import NoSolution, TwoArcViolation
from .geometry import Polygon, circle_crossings, disk_polygon_areas, point_at, points_at

TWO_PI = 2.0 * math.pi


@dataclass
class TGLFrame:
    """Local picture of the disk D(gamma(s), r).

    Angles are measured from the one-sided tangent at gamma(s), with the
    interior of the shape "up". ``theta1`` belongs to the exit point s_plus,
    ``theta2`` to the entry point s_minus, and ``theta2 - theta1`` is the
    angular extent of the circle arc inside the shape.
    """

    s: float
    r: float
    theta1: float
    theta2: float
    s_plus: float
    s_minus: float
    nu1: float | None = None
    nu2: float | None = None

    @property
    def h1(self) -> float:
        return self.r * math.sin(self.theta1)

    @property
    def h2(self) -> float:
        return self.r * math.sin(self.theta2)

    @property
    def g_r(self) -> float:
        return self.r * (self.theta2 - self.theta1)

    @property
    def g_s(self) -> float:
        return self.h2 - self.h1


def _rot90(t: np.ndarray) -> np.ndarray:
    return np.array([-t[1], t[0]])


def _frames(polygon: Polygon, s: float, r: float, sides) -> list[TGLFrame]:
    bp = point_at(polygon, s)
    crossings = circle_crossings(polygon, bp.position, r)
    if len(crossings) != 2 or not all(c.transverse for c in crossings):
        raise TwoArcViolation(
            f"{len(crossings)} crossings at s={bp.s:.6g}, r={r:.6g}", crossing_count=len(crossings)
        )
    L = polygon.perimeter
    ahead = [(c.s - bp.s) % L for c in crossings]
    exit_, entry = (crossings[0], crossings[1]) if ahead[0] < ahead[1] else (crossings[1], crossings[0])
    u1 = exit_.point - bp.position
    u2 = entry.point - bp.position
    out = []
    for side in sides:
        t = bp.tangent_out if side == "plus" else bp.tangent_in
        n = _rot90(t)
        theta1 = math.atan2(u1 @ n, u1 @ t)
        theta2 = theta1 + (math.atan2(u2 @ n, u2 @ t) - theta1) % TWO_PI
        out.append(TGLFrame(bp.s, r, theta1, theta2, exit_.s, entry.s))
    return out


def tgl_frame(polygon: Polygon, s: float, r: float, side: str = "plus") -> TGLFrame:
    """Entry/exit geometry of the disk centred at gamma(s).

    ``side`` selects the tangent that defines the frame at a vertex:
    ``"minus"`` uses the incoming edge, ``"plus"`` the outgoing one.
    """
    if side not in ("minus", "plus"):
        raise ValueError(f"side must be 'minus' or 'plus', not {side!r}")
    return _frames(polygon, s, r, (side,))[0]


def tgl_frame_pair(polygon: Polygon, s: float, r: float) -> tuple[TGLFrame, TGLFrame]:
    """The incoming-side and outgoing-side frames at gamma(s)."""
    fm, fp = _frames(polygon, s, r, ("minus", "plus"))
    return fm, fp


def derivative_r(polygon: Polygon, s: float, r: float) -> float:
    """dg/dr: length of the circle C(gamma(s), r) inside the shape."""
    return tgl_frame(polygon, s, r).g_r


def derivative_s(polygon: Polygon, s: float, r: float, side: str = "both") -> tuple[float | None, float | None]:
    """One-sided dg/ds as ``(g_s_minus, g_s_plus)``; equal away from vertices."""
    minus = tgl_frame(polygon, s, r, "minus").g_s if side in ("minus", "both") else None
    plus = tgl_frame(polygon, s, r, "plus").g_s if side in ("plus", "both") else None
    return minus, plus


def solve_entry_exit_angles(g_r: float, g_s: float, r: float, *, strict: bool = False, tol: float = 1e-12):
    """Recover (theta1, theta2) from the arc length g_r and height gap g_s.

    The arc of angle g_r / r is slid around the circle until its endpoints
    differ in height by g_s. Along the interior-up branch, where the arc's
    midpoint lies in the upper half plane, sin(theta1 + D) - sin(theta1) is
    strictly decreasing in theta1, so bisection finds the unique solution.

    With ``strict=True`` the answer must also satisfy theta1 in (-pi/2, pi/2)
    and theta2 in (pi/2, 3pi/2), the windows forced by a tangentially
    graph-like boundary.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    delta = g_r / r
    if not 0.0 < delta < TWO_PI:
        raise NoSolution(f"arc angle {delta:.6g} outside (0, 2pi)")
    target = g_s / r
    lo, hi = -0.5 * delta, math.pi - 0.5 * delta
    if strict:
        lo = max(lo, -0.5 * math.pi, 0.5 * math.pi - delta)
        hi = min(hi, 0.5 * math.pi, 1.5 * math.pi - delta)
        if lo >= hi:
            raise NoSolution("arc angle incompatible with the graph-like windows")

    def f(t):
        return math.sin(t + delta) - math.sin(t) - target

    f_lo, f_hi = f(lo), f(hi)
    if not f_hi < 0.0 < f_lo:
        if abs(f_lo) <= 1e-15:
            return lo, lo + delta
        if abs(f_hi) <= 1e-15:
            return hi, hi + delta
        raise NoSolution(f"height gap {g_s:.6g} unreachable for arc {g_r:.6g} at r={r:.6g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    theta1 = 0.5 * (lo + hi)
    return theta1, theta1 + delta


@dataclass
class Signature:
    """Sampled g(s, r) at one radius; NaN marks an unavailable derivative."""

    r: float
    s: np.ndarray
    g: np.ndarray
    g_r: np.ndarray
    g_s_minus: np.ndarray
    g_s_plus: np.ndarray
    length: float | None = None

    def __post_init__(self):
        n = len(self.s)
        self.s = np.asarray(self.s, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        for name in ("g_r", "g_s_minus", "g_s_plus"):
            col = getattr(self, name)
            col = np.full(n, np.nan) if col is None else np.asarray(col, dtype=float)
            setattr(self, name, col)
        if n > 1 and np.any(np.diff(self.s) <= 0):
            raise ValueError("signature s values must be strictly increasing")

    def __len__(self) -> int:
        return len(self.s)

    def rows(self) -> Iterator[tuple[float, float, float, float, float]]:
        yield from zip(self.s, self.g, self.g_r, self.g_s_minus, self.g_s_plus)


def signature(polygon: Polygon, r: float, samples) -> Signature:
    """Evaluate g and, where the two-arc picture holds, its first partials."""
    if r <= 0:
        raise ValueError("r must be positive")
    s = np.sort(np.asarray(samples, dtype=float) % polygon.perimeter)
    g = disk_polygon_areas(polygon, points_at(polygon, s), r)
    g_r = np.full(len(s), np.nan)
    gm = np.full(len(s), np.nan)
    gp = np.full(len(s), np.nan)
    for i, si in enumerate(s):
        try:
            fm, fp = tgl_frame_pair(polygon, si, r)
        except TwoArcViolation:
            continue
        g_r[i] = fp.g_r
        gm[i] = fm.g_s
        gp[i] = fp.g_s
    return Signature(r, s, g, g_r, gm, gp, length=polygon.perimeter)


_HEADER = ["s", "g", "g_r", "g_s_minus", "g_s_plus"]


def _fmt(x: float) -> str:
    return "" if x is None or not np.isfinite(x) else f"{x:.17g}"


def signature_to_csv(sig: Signature) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_HEADER)
    for row in sig.rows():
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_signature_csv(path, sig: Signature) -> None:
    Path(path).write_text(signature_to_csv(sig), encoding="utf-8")


def read_signature_csv(path, r: float | None = None) -> Signature:
    """Parse a signature CSV. The file does not carry the radius, so pass it."""
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != _HEADER:
        raise ValueError(f"expected header {','.join(_HEADER)}")
    cols: list[list[float]] = [[] for _ in _HEADER]
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(_HEADER):
            raise ValueError(f"line {lineno}: expected {len(_HEADER)} fields")
        for k, field in enumerate(row):
            field = field.strip()
            if k < 2 and not field:
                raise ValueError(f"line {lineno}: missing {_HEADER[k]}")
            cols[k].append(float(field) if field else math.nan)
    return Signature(math.nan if r is None else r, *(np.array(c) for c in cols))
