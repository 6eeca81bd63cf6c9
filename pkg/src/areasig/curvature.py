"""Curvature from the area signature.

Two routes: the small-radius limit at the disk center, where
g / (pi r^2) = 1/2 - kappa r / (3 pi) + O(r^3), and the exit-point route,
which reads the angles nu between the circle normal and the boundary at the
two crossings from second partials of g and their r-derivatives from third
partials.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SingularSystem, VertexPoint
from .geometry import Polygon, disk_polygon_area, point_at
from .invariant import TGLFrame, tgl_frame

SINGULAR_TOL = 1e-9


@dataclass
class CurvatureEstimate:
    s: float
    kappa: float
    method: str
    which_point: str
    diagnostics: dict = field(default_factory=dict, repr=False)


def _g(shape, s: float, r: float) -> float:
    if isinstance(shape, Polygon):
        return disk_polygon_area(shape, point_at(shape, s).position, r)
    return shape.g(s, r)


def _frame(shape, s: float, r: float) -> TGLFrame:
    if isinstance(shape, Polygon):
        return tgl_frame(shape, s, r)
    return shape.frame(s, r)


def neville_at_zero(x, y) -> np.ndarray:
    """Neville table for the polynomial through (x_i, y_i) evaluated at x = 0.

    Row i, column j holds the extrapolation from points i-j..i; the last
    entry of the last row is the full extrapolant.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    T = np.full((n, n), np.nan)
    T[:, 0] = y
    for j in range(1, n):
        for i in range(j, n):
            T[i, j] = (x[i - j] * T[i, j - 1] - x[i] * T[i - 1, j - 1]) / (x[i - j] - x[i])
    return T


def curvature_small_r(shape, s: float, radii, rel_step: float = 1e-3) -> CurvatureEstimate:
    """kappa(s) = -3 pi lim_{r -> 0} d/dr [g(s, r) / (pi r^2)].

    The derivative is a central difference at each radius; the limit is a
    polynomial extrapolation in r^2 through all radii (each column removes
    the next even power of r).
    """
    radii = np.asarray(radii, dtype=float)
    if len(radii) < 3:
        raise ValueError("need at least three radii")
    if np.any(radii <= 0) or np.any(np.diff(radii) >= 0):
        raise ValueError("radii must be positive and strictly descending")
    if isinstance(shape, Polygon) and shape.vertex_index(s) is not None:
        raise VertexPoint(f"s={s:.6g} is a polygon vertex")
    est = []
    for r in radii:
        h = rel_step * r
        up = _g(shape, s, r + h) / (math.pi * (r + h) ** 2)
        dn = _g(shape, s, r - h) / (math.pi * (r - h) ** 2)
        est.append(-3.0 * math.pi * (up - dn) / (2.0 * h))
    table = neville_at_zero(radii**2, est)
    kappa = float(table[-1, -1])
    return CurvatureEstimate(
        float(s), kappa, "small_r_limit", "center", {"radii": radii.tolist(), "estimates": est, "table": table}
    )


def recover_nu(g_rr: float, g_rs: float, frame: TGLFrame) -> tuple[float, float]:
    """Solve for nu1, nu2 from

    g_rr = theta2 - theta1 + tan nu2 - tan nu1
    g_rs = sin theta2 - sin theta1 + cos theta2 tan nu2 - cos theta1 tan nu1
    """
    t1, t2 = frame.theta1, frame.theta2
    c1, c2 = math.cos(t1), math.cos(t2)
    det = c2 - c1
    if abs(det) <= SINGULAR_TOL:
        raise SingularSystem(f"cos(theta1) = cos(theta2) = {c1:.6g}")
    a = g_rr - (t2 - t1)
    b = g_rs - (math.sin(t2) - math.sin(t1))
    T1 = (b - a * c2) / det
    T2 = T1 + a
    return math.atan(T1), math.atan(T2)


def second_partials(nu1: float, nu2: float, frame: TGLFrame) -> tuple[float, float]:
    """Forward map (nu1, nu2) -> (g_rr, g_rs); the inverse of recover_nu."""
    t1, t2 = frame.theta1, frame.theta2
    T1, T2 = math.tan(nu1), math.tan(nu2)
    return (
        t2 - t1 + T2 - T1,
        math.sin(t2) - math.sin(t1) + math.cos(t2) * T2 - math.cos(t1) * T1,
    )


def exit_point_curvature(g_rrr: float, g_rrs: float, frame: TGLFrame, r: float | None = None) -> tuple[float, float]:
    """Curvatures at the exit point s+ and the entry point s-.

    Uses d theta_i / dr = tan(nu_i) / r and the r-derivatives of the two
    second-partial relations to get x_i = sec^2(nu_i) nu_i'. At s+ the
    boundary direction turns by theta1' + nu1' per unit r while the exit
    point advances sec(nu1) in arc length, so the curvature is the ratio
    cos(nu1) (theta1' + nu1'). At s- the boundary runs the other way, hence
    the sign.
    """
    if frame.nu1 is None or frame.nu2 is None:
        raise ValueError("frame needs nu1 and nu2 (see recover_nu)")
    r = frame.r if r is None else r
    t1, t2 = frame.theta1, frame.theta2
    c1, c2 = math.cos(t1), math.cos(t2)
    det = c2 - c1
    if abs(det) <= SINGULAR_TOL:
        raise SingularSystem(f"cos(theta1) = cos(theta2) = {c1:.6g}")
    T1, T2 = math.tan(frame.nu1), math.tan(frame.nu2)
    d1, d2 = T1 / r, T2 / r
    a = g_rrr - (d2 - d1)
    b = g_rrs - (c2 * d2 - c1 * d1 - math.sin(t2) * d2 * T2 + math.sin(t1) * d1 * T1)
    x1 = (b - a * c2) / det
    x2 = x1 + a
    nu1p = x1 * math.cos(frame.nu1) ** 2
    nu2p = x2 * math.cos(frame.nu2) ** 2
    k_plus = (d1 + nu1p) * math.cos(frame.nu1)
    k_minus = -(d2 + nu2p) * math.cos(frame.nu2)
    return k_plus, k_minus


def radial_partials(shape, s: float, r: float, rel_step: float = 1e-4) -> dict:
    """g_rr, g_rs, g_rrr, g_rrs by 5-point central differences in r of the
    exact first partials g_r and g_s at fixed s."""
    h = rel_step * r
    offsets = (-2, -1, 0, 1, 2)
    fr = [_frame(shape, s, r + k * h) for k in offsets]
    gr = np.array([f.g_r for f in fr])
    gs = np.array([f.g_s for f in fr])
    d1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    d2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
    return {
        "frame": fr[2],
        "g_rr": float(d1 @ gr),
        "g_rs": float(d1 @ gs),
        "g_rrr": float(d2 @ gr),
        "g_rrs": float(d2 @ gs),
    }


def curvature_exit_points(shape, s: float, r: float) -> tuple[CurvatureEstimate, CurvatureEstimate]:
    """kappa at s+(s) and s-(s) from finite-difference partials of exact g."""
    p = radial_partials(shape, s, r)
    frame = p["frame"]
    frame.nu1, frame.nu2 = recover_nu(p["g_rr"], p["g_rs"], frame)
    k_plus, k_minus = exit_point_curvature(p["g_rrr"], p["g_rrs"], frame, r)
    diag = {key: p[key] for key in ("g_rr", "g_rs", "g_rrr", "g_rrs")}
    diag.update(nu1=frame.nu1, nu2=frame.nu2, s_plus=frame.s_plus, s_minus=frame.s_minus)
    return (
        CurvatureEstimate(float(s), k_plus, "exit_point", "s_plus", diag),
        CurvatureEstimate(float(s), k_minus, "exit_point", "s_minus", diag),
    )


def curvature_rows_to_csv(rows) -> str:
    """rows: CurvatureEstimate or (s, method, which_point, message) for flagged points."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "method", "which_point", "kappa"])
    for row in rows:
        if isinstance(row, CurvatureEstimate):
            w.writerow([f"{row.s:.17g}", row.method, row.which_point, f"{row.kappa:.17g}"])
        else:
            s, method, which, flag = row
            w.writerow([f"{s:.17g}", method, which, flag])
    return buf.getvalue()


def write_curvature_csv(path, rows) -> None:
    Path(path).write_text(curvature_rows_to_csv(rows), encoding="utf-8")
