import math

import numpy as np
from hypothesis import settings
from hypothesis import strategies as st

from areasig.geometry import validate_polygon

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def random_star_polygon(rng, n, r_lo=0.6, r_hi=1.4):
    """Simple polygon: sorted angles around the origin with random radii."""
    gaps = rng.uniform(0.5, 1.5, n)
    t = 2 * math.pi * np.cumsum(gaps) / gaps.sum()
    rad = rng.uniform(r_lo, r_hi, n)
    return validate_polygon(np.stack([rad * np.cos(t), rad * np.sin(t)], axis=1))


@st.composite
def star_polygons(draw, min_n=3, max_n=12):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_star_polygon(np.random.default_rng(seed), n)


def monte_carlo_disk_area(polygon, center, r, n=1_000_000, seed=0):
    """Estimate and standard error from uniform samples over the disk."""
    from areasig.geometry import point_in_polygon

    rng = np.random.default_rng(seed)
    rho = r * np.sqrt(rng.random(n))
    phi = 2 * math.pi * rng.random(n)
    pts = np.asarray(center) + np.stack([rho * np.cos(phi), rho * np.sin(phi)], axis=1)
    hits = sum(int(point_in_polygon(polygon, chunk).sum()) for chunk in np.array_split(pts, 10))
    p = hits / n
    A = math.pi * r * r
    return A * p, A * math.sqrt(p * (1 - p) / n)
