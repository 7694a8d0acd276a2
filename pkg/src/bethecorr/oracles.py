"""Brute-force reference evaluators.

Every fast path in the package is tested against one of these: the highest
coefficient K, the partition sum for the scalar product, the three-way
partition sum for Omega^Psi, and the two summation lemmas behind the
determinant formulas.  They enumerate partitions explicitly and make no
attempt at efficiency beyond precomputing pair tables.
"""

from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

from .bethe import ModelParams
from .errors import CapExceeded, CardinalityMismatch
from .kernel import (ENUMERATION_CAP, RapiditySet, delta, delta_prime,
                     f_matrix, f_within, h_matrix, t_matrix)


def _arr(x) -> np.ndarray:
    if isinstance(x, RapiditySet):
        return x.array
    a = np.asarray(list(x) if not isinstance(x, np.ndarray) else x, dtype=complex)
    return a.ravel()


def highest_coefficient(v, u, eta: complex) -> complex:
    """K_N(v|u) = Delta'(v) Delta(u) h(v,u) det t(v_j,u_k); K_0 = 1."""
    va, ua = _arr(v), _arr(u)
    if len(va) != len(ua):
        raise CardinalityMismatch("K needs sets of equal size")
    if len(va) == 0:
        return 1.0 + 0j
    tm = t_matrix(va, ua, eta)
    return complex(delta_prime(va, eta) * delta(ua, eta) * h_matrix(va, ua, eta).prod()
                   * np.linalg.det(tm))


def _subsets(n: int, k: int):
    return itertools.combinations(range(n), k)


def _comp(n: int, idx) -> list[int]:
    s = set(idx)
    return [i for i in range(n) if i not in s]


def _block_prod(m: np.ndarray, rows, cols) -> complex:
    if len(rows) == 0 or len(cols) == 0:
        return 1.0 + 0j
    return complex(np.prod(m[np.ix_(rows, cols)]))


def scalar_product_sum(v: RapiditySet, u: RapiditySet, params: ModelParams,
                       cap: int = ENUMERATION_CAP // 2) -> complex:
    """Sum over v -> {v_I, v_II}, u -> {u_I, u_II} with #v_I = #u_I of
    r(v_II) r(u_I) K(v_I|u_I) K(u_II|v_II) f(u_II,u_I) f(v_I,v_II)."""
    n = len(u)
    if len(v) != n:
        raise CardinalityMismatch("scalar product needs #v = #u")
    if n > cap:
        raise CapExceeded(f"scalar product partition sum capped at N <= {cap}")
    eta = params.eta
    va, ua = v.array, u.array
    fu = f_within(u, eta)
    fv = f_within(v, eta)
    ru = np.exp(-1j * params.L * ua)
    rv = np.exp(-1j * params.L * va)
    total = []
    for k in range(n + 1):
        for ui in _subsets(n, k):
            uii = _comp(n, ui)
            for vi in _subsets(n, k):
                vii = _comp(n, vi)
                term = (np.prod(rv[vii]) * np.prod(ru[list(ui)])
                        * highest_coefficient(va[list(vi)], ua[list(ui)], eta)
                        * highest_coefficient(ua[uii], va[vii], eta)
                        * _block_prod(fu, uii, list(ui)) * _block_prod(fv, list(vi), vii))
                total.append(term)
    return complex(np.sum(total))


def omega_psi_partition_sum(v, u, beta: complex, eta: complex = 1j, cap: int = 8) -> complex:
    """Three-way partition sum for Omega^Psi.

    u -> {u0, u1, u2} with #u0 = 1 and v -> {v1, v2} with #v1 = #u1; each term is
    K(v1|u1) K(u2|v2) e^{#u2 beta} f(v2,v1) f(u1,u2) f(u1,u0) f(u0,u2).
    """
    va, ua = _arr(v), _arr(u)
    n = len(ua)
    if len(va) != n - 1:
        raise CardinalityMismatch("Omega^Psi needs #v = #u - 1")
    if n > cap:
        raise CapExceeded(f"Omega^Psi partition sum capped at n <= {cap}")
    fuu = _fself(ua, eta)
    fvv = _fself(va, eta)
    total = []
    for i0 in range(n):
        rest = [i for i in range(n) if i != i0]
        for k in range(n):
            for u1 in itertools.combinations(rest, k):
                u2 = [i for i in rest if i not in u1]
                for v1 in _subsets(n - 1, k):
                    v2 = _comp(n - 1, v1)
                    u1l, v1l = list(u1), list(v1)
                    term = (highest_coefficient(va[v1l], ua[u1l], eta)
                            * highest_coefficient(ua[u2], va[v2], eta)
                            * np.exp(len(u2) * beta)
                            * _block_prod(fvv, v2, v1l)
                            * _block_prod(fuu, u1l, u2)
                            * _block_prod(fuu, u1l, [i0])
                            * _block_prod(fuu, [i0], u2))
                    total.append(term)
    return complex(np.sum(total))


def _fself(a, eta) -> np.ndarray:
    """f(a_j, a_k) within one set, diagonal 1."""
    return f_within(RapiditySet(tuple(a)), eta)


def lemma_identity_K(xi, y, z, eta: complex) -> tuple[complex, complex]:
    """Sum over xi -> {xi_I, xi_II} of K(xi_I|y) K(z|xi_II) f(xi_II, xi_I)
    against (-1)^{m1} f(xi, y) K({y - eta, z}|xi)."""
    xa, ya, za = _arr(xi), _arr(y), _arr(z)
    m1, m2 = len(ya), len(za)
    n = len(xa)
    if n != m1 + m2:
        raise CardinalityMismatch("#xi must equal #y + #z")
    fxx = _fself(xa, eta)
    lhs = []
    for I in _subsets(n, m1):
        II = _comp(n, I)
        lhs.append(highest_coefficient(xa[list(I)], ya, eta)
                   * highest_coefficient(za, xa[II], eta)
                   * _block_prod(fxx, II, list(I)))
    rhs = ((-1) ** m1 * (f_matrix(xa, ya, eta).prod() if m1 and n else 1.0)
           * highest_coefficient(np.concatenate([ya - eta, za]), xa, eta))
    return complex(np.sum(lhs)), complex(rhs)


def lemma_long_det(w, xi, C1: Callable, C2: Callable, eta: complex,
                   ordering: str = "II,I") -> tuple[complex, complex]:
    """Partition sum of K({w_I - eta, w_II}|xi) f(xi,w_I) f(.,.) C1(w_I) C2(w_II)
    against the single determinant.

    ``ordering="II,I"`` uses f(w_II, w_I); ``"I,II"`` uses f(w_I, w_II), in
    which case the determinant side carries C1(w) f(w, w_k) / f(w_k, w) as in
    the corollary.
    """
    wa, xa = _arr(w), _arr(xi)
    m = len(wa)
    if len(xa) != m:
        raise CardinalityMismatch("#w must equal #xi")
    if ordering not in ("II,I", "I,II"):
        raise ValueError("ordering is 'II,I' or 'I,II'")
    fww = _fself(wa, eta)
    fxw = f_matrix(xa, wa, eta)
    c1 = np.array([C1(x) for x in wa], dtype=complex)
    c2 = np.array([C2(x) for x in wa], dtype=complex)
    lhs = []
    for k in range(m + 1):
        for I in _subsets(m, k):
            Il = list(I)
            II = _comp(m, I)
            args = np.concatenate([wa[Il] - eta, wa[II]])
            fpair = _block_prod(fww, II, Il) if ordering == "II,I" else _block_prod(fww, Il, II)
            lhs.append(highest_coefficient(args, xa, eta) * _block_prod(fxw, list(range(m)), Il)
                       * np.prod(c1[Il]) * np.prod(c2[II]) * fpair)
    c1_eff = c1.copy()
    if ordering == "I,II":
        for k in range(m):
            others = [j for j in range(m) if j != k]
            c1_eff[k] *= np.prod(fww[k, others]) / np.prod(fww[others, k])
    h_wx = h_matrix(wa, xa, eta)                  # [k,j] = h(w_k, xi_j)
    h_xw = h_matrix(xa, wa, eta)                  # [j,k] = h(xi_j, w_k)
    t_wx = t_matrix(wa, xa, eta)
    t_xw = t_matrix(xa, wa, eta)
    mat = (c2[None, :] * t_wx.T * h_wx.prod(axis=1)[None, :]
           + (-1) ** m * c1_eff[None, :] * t_xw * h_xw.prod(axis=0)[None, :])
    rhs = delta_prime(xa, eta) * delta(wa, eta) * (np.linalg.det(mat) if m else 1.0)
    return complex(np.sum(lhs)), complex(rhs)


def psi_weight_left(u0: complex, eta: complex) -> Callable:
    """C1(w) = -f(w, u0): the specialisation used for Omega^Psi."""
    return lambda w: -(w - u0 + eta) / (w - u0)


def psi_weight_right(u0: complex, beta: complex, eta: complex) -> Callable:
    """C2(w) = e^beta f(u0, w)."""
    return lambda w: np.exp(beta) * (u0 - w + eta) / (u0 - w)
