"""Rational functions, set products, Vandermonde-type products and partitions.

Conventions: ``g(u, v) = eta / (u - v)``, ``f = 1 + g``, ``h = f / g`` and
``t = g / h``.  Products over sets are double products; any product over an
empty set equals one.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import CapExceeded, CoincidingArguments, NotSquare

# poles closer than this (in units of |eta|) raise instead of returning junk
SEP_GUARD = 1e-10
ENUMERATION_CAP = 14


@dataclass(frozen=True)
class RapiditySet:
    """Ordered set of complex rapidities.

    A set may also record that it is a single string ``u_{j+1} - u_j =
    eta * (1 + delta_j)`` with ``log_gaps[j] = log(delta_j)``.  The gaps are
    kept separately because for large ``kappa * L`` they are far below the
    resolution of the rapidities themselves, and some quantities (Bethe
    residuals, ``f`` between neighbours) depend on them directly.
    """

    values: tuple[complex, ...]
    label: str = ""
    eta: complex | None = None
    log_gaps: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        if self.log_gaps is not None:
            if self.eta is None or len(self.log_gaps) != max(len(self.values) - 1, 0):
                raise ValueError("log_gaps needs eta and one entry per adjacent pair")
            object.__setattr__(self, "log_gaps", tuple(float(y) for y in self.log_gaps))

    @classmethod
    def of(cls, values: Iterable[complex], label: str = "") -> "RapiditySet":
        return cls(tuple(values), label)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, j):
        return self.values[j]

    @property
    def N(self) -> int:
        return len(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)

    @property
    def is_structured_string(self) -> bool:
        return self.log_gaps is not None

    def shifted(self, delta: complex, label: str | None = None) -> "RapiditySet":
        """Add a constant to every rapidity; string structure is kept."""
        return RapiditySet(tuple(v + delta for v in self.values),
                           self.label if label is None else label,
                           self.eta, self.log_gaps)

    def subset(self, indices: Sequence[int]) -> "RapiditySet":
        return RapiditySet(tuple(self.values[i] for i in indices), self.label)

    def without(self, j: int) -> "RapiditySet":
        return self.subset([k for k in range(len(self)) if k != j])

    def min_separation(self) -> float:
        a = self.array
        if len(a) < 2:
            return float("inf")
        d = np.abs(a[:, None] - a[None, :])
        d[np.diag_indices_from(d)] = np.inf
        return float(d.min())

    def shifted_differences(self, m: int, eta: complex) -> np.ndarray:
        """Matrix of ``u_j - u_k + m * eta``.

        For structured strings the entries are assembled from the gaps, so
        entries whose integer part cancels keep full relative precision.
        """
        a = self.array
        n = len(a)
        if self.log_gaps is None or n < 2:
            return a[:, None] - a[None, :] + m * eta
        # an eta differing from the string's own unit is not covered by the gaps
        if not cmath.isclose(self.eta, eta, rel_tol=1e-14):
            return a[:, None] - a[None, :] + m * eta
        delta = np.exp(np.array(self.log_gaps))
        out = np.empty((n, n), dtype=complex)
        for j in range(n):
            for k in range(n):
                if j >= k:
                    s = float(delta[k:j].sum())
                else:
                    s = -float(delta[j:k].sum())
                out[j, k] = self.eta * ((j - k + m) + s)
        return out


def as_array(x) -> np.ndarray:
    if isinstance(x, RapiditySet):
        return x.array
    if np.isscalar(x):
        return np.array([x], dtype=complex)
    return np.asarray(x, dtype=complex).ravel()


def _guard(d, eta) -> None:
    if np.any(np.abs(d) < SEP_GUARD * abs(eta)):
        raise CoincidingArguments("arguments coincide within the separation guard")


def g(u: complex, v: complex, eta: complex) -> complex:
    d = complex(u) - complex(v)
    _guard(d, eta)
    return eta / d


def f(u: complex, v: complex, eta: complex) -> complex:
    d = complex(u) - complex(v)
    _guard(d, eta)
    return (d + eta) / d


def h(u: complex, v: complex, eta: complex) -> complex:
    return (complex(u) - complex(v) + eta) / eta


def t(u: complex, v: complex, eta: complex) -> complex:
    d = complex(u) - complex(v)
    _guard(d, eta)
    dp = d + eta
    _guard(dp, eta)
    return eta * eta / (d * dp)


# Vectorised versions: entry [j, k] is fn(a_j, b_k).

def g_matrix(a, b, eta) -> np.ndarray:
    d = as_array(a)[:, None] - as_array(b)[None, :]
    _guard(d, eta)
    return eta / d


def f_matrix(a, b, eta) -> np.ndarray:
    d = as_array(a)[:, None] - as_array(b)[None, :]
    _guard(d, eta)
    return (d + eta) / d


def h_matrix(a, b, eta) -> np.ndarray:
    return (as_array(a)[:, None] - as_array(b)[None, :] + eta) / eta


def t_matrix(a, b, eta) -> np.ndarray:
    d = as_array(a)[:, None] - as_array(b)[None, :]
    _guard(d, eta)
    _guard(d + eta, eta)
    return eta * eta / (d * (d + eta))


def f_within(s: RapiditySet, eta: complex) -> np.ndarray:
    """``f(u_j, u_k)`` inside one set, diagonal set to 1.

    Uses the gap structure when present so ``f`` between string neighbours
    keeps its exponentially small value instead of rounding to zero.
    """
    n = len(s)
    if n == 0:
        return np.ones((0, 0), dtype=complex)
    num = s.shifted_differences(1, eta)
    den = s.shifted_differences(0, eta)
    np.fill_diagonal(den, 1.0)
    off = ~np.eye(n, dtype=bool)
    _guard(den[off], eta)
    out = num / den
    np.fill_diagonal(out, 1.0)
    return out


_SCALAR_FNS = {"g": g, "f": f, "h": h, "t": t}


def set_product(fn: str | Callable, left, right=None, eta: complex | None = None) -> complex:
    """Product of ``fn`` over one set, or double product over two sets.

    ``fn`` is one of ``"g", "f", "h", "t"`` (needs ``eta``) or a callable.  With
    ``right`` omitted the callable takes a single argument, e.g. ``r``.
    """
    if isinstance(fn, str):
        base = _SCALAR_FNS[fn]
        fn = lambda u, v: base(u, v, eta)  # noqa: E731
    a = as_array(left)
    if right is None:
        out = 1.0 + 0j
        for u in a:
            out *= fn(u)
        return out
    b = as_array(right)
    out = 1.0 + 0j
    for u in a:
        for v in b:
            out *= fn(u, v)
    return out


def delta(u, eta: complex) -> complex:
    """``prod_{j<k} g(u_k, u_j)``."""
    a = as_array(u)
    out = 1.0 + 0j
    for j in range(len(a)):
        for k in range(j + 1, len(a)):
            out *= g(a[k], a[j], eta)
    return out


def delta_prime(u, eta: complex) -> complex:
    """``prod_{j<k} g(u_j, u_k)``."""
    a = as_array(u)
    out = 1.0 + 0j
    for j in range(len(a)):
        for k in range(j + 1, len(a)):
            out *= g(a[j], a[k], eta)
    return out


@dataclass(frozen=True)
class Bipartition:
    mask: int
    part_I: tuple[int, ...]
    part_II: tuple[int, ...]


def enumerate_bipartitions(n: int, card_I: int, cap: int = ENUMERATION_CAP) -> Iterator[Bipartition]:
    """All splits of ``range(n)`` with ``card_I`` indices in part I, by ascending mask."""
    if n > cap:
        raise CapExceeded(f"N={n} exceeds enumeration cap {cap}")
    if not 0 <= card_I <= n:
        return
    masks = sorted(sum(1 << i for i in c) for c in itertools.combinations(range(n), card_I))
    for mask in masks:
        part_I = tuple(i for i in range(n) if mask >> i & 1)
        part_II = tuple(i for i in range(n) if not mask >> i & 1)
        yield Bipartition(mask, part_I, part_II)


def det(m) -> complex:
    """Determinant by LU with partial pivoting (LAPACK via numpy)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(f"matrix of shape {a.shape} is not square")
    if a.shape[0] == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(a))


def cauchy_eval(func: Callable[[np.ndarray], np.ndarray], z0: complex, radius: float,
                nodes: int = 32, center: complex = 0j) -> complex:
    """Value at ``z0`` of a function analytic in a disc, from samples on its rim.

    ``func`` receives the array of rim points.  The trapezoid rule for the
    Cauchy integral converges geometrically, so this evaluates removable
    singularities and 0/0 limits without cancellation in the samples.
    """
    w = np.exp(2j * np.pi * (np.arange(nodes) + 0.5) / nodes)
    zeta = center + radius * w
    vals = np.asarray(func(zeta), dtype=complex)
    weights = (zeta - center) / (zeta - z0)
    return complex(np.mean(vals * weights))
