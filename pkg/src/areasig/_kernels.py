"""Compiled inner loops for the exact disk/polygon area and the simplicity test."""

import math

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def _sector(ux, uy, vx, vy, r2):
    return 0.5 * r2 * math.atan2(ux * vy - uy * vx, ux * vx + uy * vy)


@numba.njit(cache=True, nogil=True)
def disk_area(xs, ys, cx, cy, r):
    """Area of the CCW polygon (xs, ys) inside the disk D((cx, cy), r).

    Each directed edge contributes the signed area of triangle(center, a, b)
    clipped to the disk: a straight triangle for the sub-segment inside the
    disk, circular sectors for the parts outside.
    """
    n = xs.shape[0]
    r2 = r * r
    total = 0.0
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        ax = xs[i] - cx
        ay = ys[i] - cy
        bx = xs[j] - cx
        by = ys[j] - cy
        dx = bx - ax
        dy = by - ay
        qa = dx * dx + dy * dy
        if qa == 0.0:
            continue
        qb = 2.0 * (ax * dx + ay * dy)
        qc = ax * ax + ay * ay - r2
        disc = qb * qb - 4.0 * qa * qc
        if disc <= 0.0:
            total += _sector(ax, ay, bx, by, r2)
            continue
        sq = math.sqrt(disc)
        # numerically stable roots
        if qb >= 0.0:
            q = -0.5 * (qb + sq)
        else:
            q = -0.5 * (qb - sq)
        t1 = q / qa
        t2 = qc / q if q != 0.0 else t1
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 >= 1.0 or t2 <= 0.0:
            total += _sector(ax, ay, bx, by, r2)
            continue
        if t1 < 0.0:
            t1 = 0.0
        if t2 > 1.0:
            t2 = 1.0
        p1x = ax + t1 * dx
        p1y = ay + t1 * dy
        p2x = ax + t2 * dx
        p2y = ay + t2 * dy
        total += _sector(ax, ay, p1x, p1y, r2)
        total += 0.5 * (p1x * p2y - p1y * p2x)
        total += _sector(p2x, p2y, bx, by, r2)
    return total


@numba.njit(cache=True, nogil=True)
def disk_areas_at_vertices(xs, ys, r):
    n = xs.shape[0]
    out = np.empty(n)
    for k in range(n):
        out[k] = disk_area(xs, ys, xs[k], ys[k], r)
    return out


@numba.njit(cache=True, nogil=True)
def disk_areas_at_points(xs, ys, cxs, cys, r):
    m = cxs.shape[0]
    out = np.empty(m)
    for k in range(m):
        out[k] = disk_area(xs, ys, cxs[k], cys[k], r)
    return out


@numba.njit(cache=True, nogil=True)
def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


@numba.njit(cache=True, nogil=True)
def _on_segment(ax, ay, bx, by, px, py):
    return (min(ax, bx) <= px <= max(ax, bx)) and (min(ay, by) <= py <= max(ay, by))


@numba.njit(cache=True, nogil=True)
def _segments_meet(ax, ay, bx, by, cx, cy, dx, dy):
    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    if ((o1 > 0.0 and o2 < 0.0) or (o1 < 0.0 and o2 > 0.0)) and (
        (o3 > 0.0 and o4 < 0.0) or (o3 < 0.0 and o4 > 0.0)
    ):
        return True
    if o1 == 0.0 and _on_segment(ax, ay, bx, by, cx, cy):
        return True
    if o2 == 0.0 and _on_segment(ax, ay, bx, by, dx, dy):
        return True
    if o3 == 0.0 and _on_segment(cx, cy, dx, dy, ax, ay):
        return True
    if o4 == 0.0 and _on_segment(cx, cy, dx, dy, bx, by):
        return True
    return False


@numba.njit(cache=True, nogil=True)
def first_self_intersection(xs, ys):
    """Return the first offending edge pair (i, j), or (-1, -1) if simple.

    Edge i runs from vertex i to vertex i+1. Adjacent edges may only share
    their common vertex; a fold-back along the same line counts as overlap.
    """
    n = xs.shape[0]
    for i in range(n):
        i1 = (i + 1) % n
        i2 = (i + 2) % n
        # adjacent pair (i, i+1): reject collinear fold-back
        ux = xs[i1] - xs[i]
        uy = ys[i1] - ys[i]
        vx = xs[i2] - xs[i1]
        vy = ys[i2] - ys[i1]
        if ux * vy - uy * vx == 0.0 and ux * vx + uy * vy < 0.0:
            return i, i1
    for i in range(n):
        i1 = (i + 1) % n
        axmin = min(xs[i], xs[i1])
        axmax = max(xs[i], xs[i1])
        aymin = min(ys[i], ys[i1])
        aymax = max(ys[i], ys[i1])
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            j1 = (j + 1) % n
            if max(xs[j], xs[j1]) < axmin or min(xs[j], xs[j1]) > axmax:
                continue
            if max(ys[j], ys[j1]) < aymin or min(ys[j], ys[j1]) > aymax:
                continue
            if _segments_meet(xs[i], ys[i], xs[i1], ys[i1], xs[j], ys[j], xs[j1], ys[j1]):
                return i, j
    return -1, -1
