"""Random complex inputs for identity checks."""

from __future__ import annotations

import numpy as np

R_MIN, R_MAX = 0.3, 3.0
MIN_SEP = 0.05


def random_points(rng: np.random.Generator, n: int, avoid=(), r_min: float = R_MIN,
                  r_max: float = R_MAX, min_sep: float = MIN_SEP) -> np.ndarray:
    """n points in the annulus r_min <= |z| <= r_max, pairwise and from ``avoid`` at least min_sep apart."""
    taken = [complex(z) for z in avoid]
    out = []
    while len(out) < n:
        z = rng.uniform(r_min, r_max) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        if all(abs(z - w) >= min_sep for w in taken):
            out.append(z)
            taken.append(z)
    return np.array(out, dtype=complex)


def random_pair(rng: np.random.Generator, n_v: int, n_u: int) -> tuple[np.ndarray, np.ndarray]:
    u = random_points(rng, n_u)
    v = random_points(rng, n_v, avoid=u)
    return v, u


def random_beta(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8))


def rel_err(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale
