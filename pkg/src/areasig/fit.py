"""Fit a Fourier polygon to a target signature by mesh-adaptive direct search.

Vertex k of an N-gon with m harmonics is

    x_k = sum_j a1j cos(2 pi j k / N) + a2j sin(2 pi j k / N)
    y_k = sum_j a3j cos(2 pi j k / N) + a4j sin(2 pi j k / N)

for k = 0..N-1 and j = 0..m. The j = 0 column is the center and stays fixed
during the search; the 4m harmonic coefficients are the variables. Candidate
polygons that are not simple, degenerate or clockwise get an infinite
objective (extreme barrier).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np
from scipy.stats import qmc

from . import _kernels
from .errors import NoSolution
from .geometry import Polygon, validate_polygon
from .invariant import Signature
from .smooth import lens_area

POLL_FLOOR = 1e-9


@dataclass
class FourierShape:
    coeffs: np.ndarray  # shape (4, m + 1)
    N: int

    def __post_init__(self):
        self.coeffs = np.array(self.coeffs, dtype=float)
        if self.coeffs.ndim != 2 or self.coeffs.shape[0] != 4 or self.coeffs.shape[1] < 2:
            raise ValueError("coeffs must have shape (4, m + 1) with m >= 1")
        if self.N < 3:
            raise ValueError("N must be at least 3")

    @property
    def m(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def harmonics(self) -> np.ndarray:
        """The optimised part: columns 1..m flattened."""
        return self.coeffs[:, 1:].ravel()

    def with_harmonics(self, x) -> "FourierShape":
        c = self.coeffs.copy()
        c[:, 1:] = np.asarray(x, dtype=float).reshape(4, self.m)
        return FourierShape(c, self.N)

    def padded(self, m: int) -> "FourierShape":
        c = np.zeros((4, m + 1))
        c[:, : self.m + 1] = self.coeffs
        return FourierShape(c, self.N)

    def vertices(self) -> np.ndarray:
        cos_b, sin_b = _basis(self.N, self.m)
        return _synth(self.coeffs, cos_b, sin_b)

    def to_dict(self) -> dict:
        return {"N": self.N, "m": self.m, "coeffs": self.coeffs.tolist()}

    @classmethod
    def circle(cls, R: float, N: int, m: int = 1) -> "FourierShape":
        c = np.zeros((4, m + 1))
        c[0, 1] = c[3, 1] = R
        return cls(c, N)


_BASIS_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _basis(N: int, m: int):
    key = (N, m)
    if key not in _BASIS_CACHE:
        ang = 2.0 * math.pi * np.outer(np.arange(m + 1), np.arange(N)) / N
        _BASIS_CACHE[key] = (np.cos(ang), np.sin(ang))
    return _BASIS_CACHE[key]


@numba.njit(cache=True, nogil=True)
def _synth_xy(coeffs, cos_b, sin_b):
    m1 = coeffs.shape[1]
    n = cos_b.shape[1]
    xs = np.zeros(n)
    ys = np.zeros(n)
    for j in range(m1):
        for k in range(n):
            xs[k] += coeffs[0, j] * cos_b[j, k] + coeffs[1, j] * sin_b[j, k]
            ys[k] += coeffs[2, j] * cos_b[j, k] + coeffs[3, j] * sin_b[j, k]
    return xs, ys


def _synth(coeffs, cos_b, sin_b):
    # same summation order as the objective kernel, so both see identical vertices
    xs, ys = _synth_xy(np.ascontiguousarray(coeffs, dtype=float), cos_b, sin_b)
    return np.stack([xs, ys], axis=1)


def fourier_to_polygon(shape: FourierShape) -> Polygon:
    """The validated polygon; raises NotSimple or Degenerate when infeasible."""
    return validate_polygon(shape.vertices())


@numba.njit(cache=True, nogil=True)
def _objective_kernel(coeffs, cos_b, sin_b, target, r):
    xs, ys = _synth_xy(coeffs, cos_b, sin_b)
    n = xs.shape[0]
    # feasibility: distinct consecutive vertices, positive area, simple
    area = 0.0
    span = 0.0
    for k in range(n):
        k1 = (k + 1) % n
        area += xs[k] * ys[k1] - xs[k1] * ys[k]
        span = max(span, abs(xs[k] - xs[0]), abs(ys[k] - ys[0]))
    area *= 0.5
    if not (span > 0.0) or not (area > 1e-14 * span * span):
        return np.inf
    for k in range(n):
        k1 = (k + 1) % n
        if math.hypot(xs[k1] - xs[k], ys[k1] - ys[k]) <= 1e-12 * span:
            return np.inf
    i, _ = _kernels.first_self_intersection(xs, ys)
    if i >= 0:
        return np.inf
    total = 0.0
    cap = min(math.pi * r * r, area)
    for k in range(n):
        g = _kernels.disk_area(xs, ys, xs[k], ys[k], r)
        g = min(max(g, 0.0), cap)
        d = g - target[k]
        total += d * d
    return total


def _check_target(shape: FourierShape, target: Signature):
    if len(target) != shape.N:
        raise ValueError(f"target has {len(target)} rows but the shape has N={shape.N}")


def objective(shape: FourierShape, target: Signature) -> float:
    """Sum of squared g differences at the N vertices (radius target.r); +inf if infeasible."""
    _check_target(shape, target)
    cos_b, sin_b = _basis(shape.N, shape.m)
    return float(_objective_kernel(shape.coeffs, cos_b, sin_b, np.ascontiguousarray(target.g, dtype=float), float(target.r)))


def best_fit_circle(target: Signature, N: int | None = None) -> FourierShape:
    """Circle (centered at the origin) whose boundary-centered disks cover the
    same mean area as the target, found by bisection on the radius."""
    r = target.r
    if len(target) == 0:
        raise NoSolution("empty target")
    goal = float(np.mean(target.g))
    if not 0.0 < goal < math.pi * r * r:
        raise NoSolution(f"mean g {goal:.6g} outside (0, pi r^2)")
    if goal >= 0.5 * math.pi * r * r:
        raise NoSolution(f"mean g {goal:.6g} >= pi r^2 / 2: no circle has that density")

    def f(R):
        return (math.pi * R * R if R <= 0.5 * r else lens_area(R, r)) - goal

    lo, hi = 0.0, r
    while f(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return FourierShape.circle(0.5 * (lo + hi), N or len(target))


@dataclass
class MadsState:
    incumbent: FourierShape
    incumbent_value: float
    mesh_size: float
    poll_size: float
    evaluation_count: int = 0
    history: list = field(default_factory=list)  # (iteration, value, mesh_size)


def poll_basis(n: int, index: int, halton: qmc.Halton | None = None, seed: int = 0) -> np.ndarray:
    """Orthonormal n x n basis from a Householder reflection of a quasirandom vector."""
    if halton is None:
        halton = qmc.Halton(d=n, scramble=True, seed=seed)
        halton.fast_forward(index)
    q = halton.random(1)[0] * 2.0 - 1.0
    nq = np.linalg.norm(q)
    if nq == 0.0:
        return np.eye(n)
    v = q / nq
    return np.eye(n) - 2.0 * np.outer(v, v)


def mads_solve(
    start: FourierShape,
    target: Signature | None = None,
    budget: int = 1000,
    seed: int = 0,
    *,
    initial_poll: float | None = None,
    func=None,
    workers: int = 1,
) -> MadsState:
    """Mesh-adaptive direct search over the harmonic coefficients.

    Each iteration polls x + poll_size * d over the 2n directions of an
    orthonormal basis and its negation, trying the previous successful
    direction first and stopping at the first improvement. Success doubles
    the poll size (up to its initial value), failure halves it; the mesh
    size is poll_size^2. ``func`` replaces the signature misfit with any
    callable of the coefficient vector (used for testing the search itself).
    With ``workers`` > 1 polls are evaluated in concurrent batches of that
    size; the first improving point of a batch wins.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    if func is None:
        _check_target(start, target)
        cos_b, sin_b = _basis(start.N, start.m)
        tg = np.ascontiguousarray(target.g, dtype=float)
        r = float(target.r)
        coeffs0 = start.coeffs.copy()
        m = start.m

        def func(x):
            c = coeffs0.copy()
            c[:, 1:] = x.reshape(4, m)
            return float(_objective_kernel(c, cos_b, sin_b, tg, r))

    x = start.harmonics.copy()
    n = x.size
    if initial_poll is None:
        initial_poll = 0.1 * max(float(np.abs(x).max()), 1e-3)
    poll = max_poll = float(initial_poll)
    fx = func(x)
    evals = 1
    history = [(0, fx, poll * poll)]
    halton = qmc.Halton(d=n, scramble=True, seed=seed)
    last_dir = None
    iteration = 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while evals < budget and poll >= POLL_FLOOR:
            iteration += 1
            H = poll_basis(n, iteration, halton)
            dirs = np.vstack([H, -H])
            if last_dir is not None:
                dirs = np.vstack([last_dir, dirs])
            success = False
            i = 0
            while i < len(dirs) and evals < budget:
                size = min(workers, len(dirs) - i, budget - evals)
                batch = [x + poll * dirs[i + b] for b in range(size)]
                vals = list(pool.map(func, batch)) if pool else [func(batch[0])]
                evals += size
                for b, v in enumerate(vals):
                    if v < fx:
                        x, fx, last_dir, success = batch[b], v, dirs[i + b].copy(), True
                        break
                if success:
                    break
                i += size
            if success:
                poll = min(2.0 * poll, max_poll)
            else:
                poll *= 0.5
                last_dir = None
            history.append((iteration, fx, poll * poll))
    finally:
        if pool:
            pool.shutdown()
    return MadsState(start.with_harmonics(x), fx, poll * poll, poll, evals, history)


def coarse_to_fine_fit(
    target: Signature,
    m_max: int,
    budget_per_level: int,
    seed: int = 0,
    *,
    N: int | None = None,
    workers: int = 1,
    callback=None,
) -> list[MadsState]:
    """Levels m = 1..m_max; each starts from the previous incumbent zero-padded."""
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    shape = best_fit_circle(target, N)
    states = []
    for m in range(1, m_max + 1):
        start = shape.padded(m)
        scale = float(np.abs(start.harmonics).max())
        poll0 = 0.1 * scale if m == 1 else 0.02 * scale
        state = mads_solve(start, target, budget_per_level, seed + m, initial_poll=poll0, workers=workers)
        states.append(state)
        shape = state.incumbent
        if callback:
            callback(m, state)
    return states


def rms_misfit(value: float, target: Signature) -> float:
    return math.sqrt(value / len(target))


def write_shape_json(path, shape: FourierShape, value: float | None = None) -> None:
    data = shape.to_dict()
    if value is not None:
        data["objective"] = value
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def read_fit_config(path) -> dict:
    """{r, N, m_max, budget_per_level, seed}; raises ValueError on bad values."""
    cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    missing = {"r", "N", "m_max", "budget_per_level"} - set(cfg)
    if missing:
        raise ValueError(f"config is missing {sorted(missing)}")
    cfg.setdefault("seed", 0)
    if not (isinstance(cfg["N"], int) and cfg["N"] >= 3):
        raise ValueError("N must be an integer >= 3")
    if not (isinstance(cfg["m_max"], int) and cfg["m_max"] >= 1):
        raise ValueError("m_max must be an integer >= 1")
    if not (isinstance(cfg["budget_per_level"], int) and cfg["budget_per_level"] > 0):
        raise ValueError("budget_per_level must be a positive integer")
    if not (float(cfg["r"]) > 0):
        raise ValueError("r must be positive")
    return cfg
