"""Smooth closed curves with exact area-invariant evaluation.

Each curve is a CCW periodic map t -> (x, y) on [0, 2pi). Arc length is
tabulated with Gauss-Legendre panels and inverted by Newton's method, circle
crossings are bracketed on a grid and polished with Brent's method, and
g(s, r) follows from Green's theorem on the boundary of Omega ∩ D: the curve
piece inside the disk plus the circle arc inside the shape.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .errors import TwoArcViolation
from .geometry import Polygon, disk_polygon_areas, validate_polygon
from .invariant import Signature, TGLFrame

TWO_PI = 2.0 * math.pi
_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def lens_area(R: float, r: float) -> float:
    """Area of a radius-R disk inside a radius-r disk centred on its boundary."""
    if r >= 2.0 * R:
        return math.pi * R * R
    return (
        r * r * math.acos(r / (2.0 * R))
        + R * R * math.acos(1.0 - r * r / (2.0 * R * R))
        - 0.5 * r * math.sqrt(4.0 * R * R - r * r)
    )


class ParametricCurve:
    """Base class; subclasses provide ``xy``, ``d1`` and ``d2``."""

    panels = 1024
    grid = 2048

    def xy(self, t):
        raise NotImplementedError

    def d1(self, t):
        raise NotImplementedError

    def d2(self, t):
        raise NotImplementedError

    def _speed(self, t):
        d = self.d1(t)
        return np.hypot(d[..., 0], d[..., 1])

    def _gl(self, f, a, b):
        """Composite Gauss-Legendre integral of f over [a, b] (vectorised f)."""
        if b == a:
            return 0.0
        k = max(1, int(math.ceil(abs(b - a) / TWO_PI * self.panels)))
        edges = np.linspace(a, b, k + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
        return float(np.sum(f(nodes) * _GL_W[None, :] * half[:, None]))

    # arc length --------------------------------------------------------

    def _table(self):
        if not hasattr(self, "_s_table"):
            edges = np.linspace(0.0, TWO_PI, self.panels + 1)
            half = 0.5 * np.diff(edges)
            mid = 0.5 * (edges[1:] + edges[:-1])
            nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
            pieces = np.sum(self._speed(nodes) * _GL_W[None, :], axis=1) * half
            self._t_edges = edges
            self._s_table = np.concatenate([[0.0], np.cumsum(pieces)])
        return self._t_edges, self._s_table

    @property
    def perimeter(self) -> float:
        return float(self._table()[1][-1])

    def s_of_t(self, t: float) -> float:
        edges, table = self._table()
        t = float(t) % TWO_PI
        k = min(int(t / TWO_PI * self.panels), self.panels - 1)
        a = edges[k]
        half = 0.5 * (t - a)
        nodes = a + half + half * _GL_X
        return float(table[k] + half * np.dot(self._speed(nodes), _GL_W))

    def t_of_s(self, s: float) -> float:
        edges, table = self._table()
        L = table[-1]
        s = float(s) % L
        k = min(int(np.searchsorted(table, s, side="right")) - 1, self.panels - 1)
        frac = (s - table[k]) / (table[k + 1] - table[k])
        t = edges[k] + frac * (edges[k + 1] - edges[k])
        for _ in range(8):
            err = self.s_of_t(t) - s
            if err > 0.5 * L:
                err -= L
            elif err < -0.5 * L:
                err += L
            t -= err / float(self._speed(np.array(t)))
            if abs(err) < 1e-15 * L:
                break
        return t % TWO_PI

    # geometry ----------------------------------------------------------

    def point(self, s: float) -> np.ndarray:
        return np.asarray(self.xy(np.array(self.t_of_s(s))), dtype=float)

    def tangent_at_t(self, t: float) -> np.ndarray:
        d = np.asarray(self.d1(np.array(t)), dtype=float)
        return d / np.hypot(d[0], d[1])

    def curvature_at_t(self, t):
        d, dd = self.d1(t), self.d2(t)
        num = d[..., 0] * dd[..., 1] - d[..., 1] * dd[..., 0]
        return num / np.hypot(d[..., 0], d[..., 1]) ** 3

    def curvature(self, s: float) -> float:
        return float(self.curvature_at_t(np.array(self.t_of_s(s))))

    def polygon(self, n: int) -> Polygon:
        t = TWO_PI * np.arange(n) / n
        return validate_polygon(self.xy(t))

    def crossings_t(self, center, r: float) -> list[float]:
        """Parameters t where |gamma(t) - center| = r, sorted."""
        c = np.asarray(center, dtype=float)

        def f(t):
            p = self.xy(t) - c
            return p[..., 0] ** 2 + p[..., 1] ** 2 - r * r

        grid = np.linspace(0.0, TWO_PI, self.grid + 1)
        vals = f(grid)
        roots = []
        for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0):
            a, b = grid[i], grid[i + 1]
            if vals[i] == 0.0:
                roots.append(a)
                continue
            if vals[i + 1] == 0.0:
                continue
            roots.append(brentq(lambda t: float(f(np.array(t))), a, b, xtol=1e-15, rtol=8.9e-16))
        return sorted(r_ % TWO_PI for r_ in roots)

    def _crossing_pair(self, s: float, r: float):
        ts = self.t_of_s(s)
        p = np.asarray(self.xy(np.array(ts)), dtype=float)
        roots = self.crossings_t(p, r)
        if len(roots) != 2:
            raise TwoArcViolation(f"{len(roots)} crossings at s={s:.6g}, r={r:.6g}", crossing_count=len(roots))
        ahead = [(t - ts) % TWO_PI for t in roots]
        t_exit, t_entry = (roots[0], roots[1]) if ahead[0] < ahead[1] else (roots[1], roots[0])
        return ts, p, t_exit, t_entry

    def frame(self, s: float, r: float) -> TGLFrame:
        ts, p, t_exit, t_entry = self._crossing_pair(s, r)
        t = self.tangent_at_t(ts)
        n = np.array([-t[1], t[0]])
        u1 = np.asarray(self.xy(np.array(t_exit))) - p
        u2 = np.asarray(self.xy(np.array(t_entry))) - p
        theta1 = math.atan2(u1 @ n, u1 @ t)
        theta2 = theta1 + (math.atan2(u2 @ n, u2 @ t) - theta1) % TWO_PI
        return TGLFrame(s % self.perimeter, r, theta1, theta2, self.s_of_t(t_exit), self.s_of_t(t_entry))

    def partials(self, s: float, r: float) -> tuple[float, float]:
        """Exact (g_r, g_s) at (s, r)."""
        fr = self.frame(s, r)
        return fr.g_r, fr.g_s

    def _sweep(self, t0: float, t1: float) -> float:
        """(1/2) * integral of (x y' - y x') dt over [t0, t1]."""

        def f(t):
            p, d = self.xy(t), self.d1(t)
            return 0.5 * (p[..., 0] * d[..., 1] - p[..., 1] * d[..., 0])

        return self._gl(f, t0, t1)

    def g(self, s: float, r: float) -> float:
        """Exact area of Omega ∩ D(gamma(s), r) in the two-arc regime."""
        _, p, t_exit, t_entry = self._crossing_pair(s, r)
        t_exit = t_entry + (t_exit - t_entry) % TWO_PI
        area = self._sweep(t_entry, t_exit)
        q1 = np.asarray(self.xy(np.array(t_exit))) - p
        q2 = np.asarray(self.xy(np.array(t_entry))) - p
        phi1 = math.atan2(q1[1], q1[0])
        phi2 = phi1 + (math.atan2(q2[1], q2[0]) - phi1) % TWO_PI
        cx, cy = p
        area += 0.5 * (
            r * r * (phi2 - phi1)
            + r * cx * (math.sin(phi2) - math.sin(phi1))
            - r * cy * (math.cos(phi2) - math.cos(phi1))
        )
        return area


class Ellipse(ParametricCurve):
    def __init__(self, a: float, b: float):
        self.a, self.b = float(a), float(b)

    def xy(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)

    def d1(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([-self.a * np.sin(t), self.b * np.cos(t)], axis=-1)

    def d2(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([-self.a * np.cos(t), -self.b * np.sin(t)], axis=-1)

    def _sweep(self, t0, t1):
        return 0.5 * self.a * self.b * (t1 - t0)

    def __repr__(self):
        return f"Ellipse({self.a}, {self.b})"


class Circle(Ellipse):
    def __init__(self, R: float):
        super().__init__(R, R)
        self.R = float(R)

    @property
    def perimeter(self) -> float:
        return TWO_PI * self.R

    def s_of_t(self, t):
        return self.R * (float(t) % TWO_PI)

    def t_of_s(self, s):
        return (float(s) / self.R) % TWO_PI

    def __repr__(self):
        return f"Circle({self.R})"


class Star(ParametricCurve):
    """Polar curve rho(t) = R + a cos(k t); k lobes."""

    def __init__(self, R: float = 1.0, a: float = 0.25, k: int = 4):
        if not 0 <= a < R:
            raise ValueError("need 0 <= a < R")
        self.R, self.a, self.k = float(R), float(a), int(k)

    def _rho(self, t):
        return self.R + self.a * np.cos(self.k * t), -self.a * self.k * np.sin(self.k * t), -self.a * self.k**2 * np.cos(
            self.k * t
        )

    def xy(self, t):
        t = np.asarray(t, dtype=float)
        rho, _, _ = self._rho(t)
        return np.stack([rho * np.cos(t), rho * np.sin(t)], axis=-1)

    def d1(self, t):
        t = np.asarray(t, dtype=float)
        rho, dr, _ = self._rho(t)
        c, s = np.cos(t), np.sin(t)
        return np.stack([dr * c - rho * s, dr * s + rho * c], axis=-1)

    def d2(self, t):
        t = np.asarray(t, dtype=float)
        rho, dr, ddr = self._rho(t)
        c, s = np.cos(t), np.sin(t)
        return np.stack([ddr * c - 2 * dr * s - rho * c, ddr * s + 2 * dr * c - rho * s], axis=-1)

    def _sweep(self, t0, t1):
        R, a, k = self.R, self.a, self.k
        return 0.5 * (
            R * R * (t1 - t0)
            + 2 * R * a * (math.sin(k * t1) - math.sin(k * t0)) / k
            + a * a * (0.5 * (t1 - t0) + (math.sin(2 * k * t1) - math.sin(2 * k * t0)) / (4 * k))
        )

    def __repr__(self):
        return f"Star({self.R}, {self.a}, {self.k})"


def curve_signature(curve: ParametricCurve, r: float, samples) -> Signature:
    """Exact signature of a smooth curve; both one-sided g_s columns agree."""
    if r <= 0:
        raise ValueError("r must be positive")
    L = curve.perimeter
    s = np.sort(np.asarray(samples, dtype=float) % L)
    g = np.full(len(s), np.nan)
    g_r = np.full(len(s), np.nan)
    g_s = np.full(len(s), np.nan)
    for i, si in enumerate(s):
        try:
            fr = curve.frame(si, r)
            g[i] = curve.g(si, r)
        except TwoArcViolation:
            continue
        g_r[i], g_s[i] = fr.g_r, fr.g_s
    if np.isnan(g).any():
        # fall back to a dense polygon for the area where the two-arc picture breaks
        dense = curve.polygon(8192)
        bad = np.isnan(g)
        g[bad] = disk_polygon_areas(dense, np.array([curve.point(x) for x in s[bad]]), r)
    return Signature(r, s, g, g_r, g_s, g_s.copy(), length=L)
