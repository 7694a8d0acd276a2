"""Generating functions for the field and density correlators.

Two evaluation paths.  The brute-force path sums the composite-model
partition expansion over every split of the on-shell pair (v, u); it is
exact for any on-shell pair and is the oracle.  The string path keeps only
the N + 1 partitions that survive on the ground-state string and resums them
into hypergeometric closed forms, up to corrections O((kappa L)^-inf).

In both paths the x dependence of every partition term is a plain exponential
exp(-i x D), so the partition sums are stored as x-independent "cores" and
derivatives in x are taken term by term.
"""

from __future__ import annotations

import cmath
import math
from itertools import combinations
from dataclasses import dataclass, field

import numpy as np

from .bethe import ModelParams, StringState, Twist, twist_roots, twisted_bethe_residual
from .errors import (CapExceeded, CardinalityMismatch, DomainError, IndexOutOfRange,
                     NotOnShell, PoleAtGamma)
from .formfactor import ON_SHELL_TOL, _require_on_shell, branch_free_residual, omega_value
from .kernel import RapiditySet, cauchy_eval, f_within
from .stringforms import cexpm1, hyp2f1_terminating, omega_J_s, omega_Psi_s

BETA_SWITCH = 1e-2
BRUTEFORCE_CAP = 7
GAMMA_POLE_RADIUS = 1e-8
# radius and node count of the beta circle used below BETA_SWITCH
SMALL_BETA_RADIUS = 0.1
SMALL_BETA_NODES = 32


# ------------------------------------------------------------------ inputs

@dataclass(frozen=True)
class GenFieldConfig:
    """Inputs of the field generating function.

    Either ``state`` (ground-state string; the dual roots are its twist) or
    ``pair = (v, u)`` with explicit ``params`` must be given.
    """

    x: float
    twist: Twist
    state: StringState | None = None
    pair: tuple[RapiditySet, RapiditySet] | None = None
    params: ModelParams | None = None
    mode: str = "bruteforce"

    def __post_init__(self):
        if self.mode not in ("bruteforce", "string"):
            raise ValueError("mode is 'bruteforce' or 'string'")
        if (self.state is None) == (self.pair is None):
            raise ValueError("give exactly one of state or pair")
        if self.pair is not None and self.params is None:
            raise ValueError("an explicit pair needs params")
        p = self.model
        if not 0 < self.x < p.L:
            raise DomainError("x must lie strictly inside (0, L)")
        if self.mode == "bruteforce" and p.N > BRUTEFORCE_CAP:
            raise CapExceeded(f"brute-force generating function capped at N <= {BRUTEFORCE_CAP}")
        if self.mode == "string" and self.state is None:
            raise ValueError("string mode needs the ground-state string")

    @property
    def model(self) -> ModelParams:
        return self.params if self.params is not None else self.state.params

    def rapidities(self) -> tuple[RapiditySet, RapiditySet]:
        """(v, u): dual (twisted) and plain on-shell roots."""
        if self.pair is not None:
            return self.pair
        return twist_roots(self.state, self.twist.beta), self.state.roots


def _resolve(state, twist: Twist, params: ModelParams | None):
    if isinstance(state, StringState):
        return twist_roots(state, twist.beta), state.roots, state.params
    v, u = state
    if params is None:
        raise ValueError("an explicit (v, u) pair needs params")
    return v, u, params


def _require_twisted_on_shell(v: RapiditySet, beta: complex, params: ModelParams) -> None:
    if len(v) == 0:
        return
    worst = branch_free_residual(twisted_bethe_residual(v, beta, params))
    if worst > ON_SHELL_TOL:
        raise NotOnShell(f"twisted Bethe residual {worst:.3e} exceeds {ON_SHELL_TOL:.0e}")


def _check_pair(v, u, beta, params, need_v):
    if len(u) != params.N or len(v) != need_v:
        raise CardinalityMismatch("rapidity sets do not match N")
    if params.N > BRUTEFORCE_CAP:
        raise CapExceeded(f"brute-force generating function capped at N <= {BRUTEFORCE_CAP}")
    _require_on_shell(u, params)
    _require_twisted_on_shell(v, beta, params)


# ------------------------------------------------------------- brute force

@dataclass(frozen=True)
class PartitionCore:
    """One partition term ``core * exp(-i x D)``."""

    u_I: tuple[int, ...]
    v_I: tuple[int, ...]
    D: complex
    core: complex

    def at(self, x: float, x_order: int = 0) -> complex:
        return self.core * (-1j * self.D) ** x_order * cmath.exp(-1j * x * self.D)


def _block(m: np.ndarray, rows, cols) -> complex:
    if not rows or not cols:
        return 1.0 + 0j
    return complex(np.prod(m[np.ix_(rows, cols)]))


def _splits(n: int, k: int):
    for part in combinations(range(n), k):
        s = set(part)
        yield list(part), [i for i in range(n) if i not in s]


def field_cores(v: RapiditySet, u: RapiditySet, params: ModelParams, beta: complex,
                check: bool = True) -> list[PartitionCore]:
    """Partition cores of the field generating function.

    Splits have ``#u_I = #v_I + 1`` and ``#v_II = #u_II + 1``; each core is
    ``-kappa f(u_II,u_I) f(v_I,v_II) Omega^Psi(v_I,u_I|beta) Omega^Psi(u_II,v_II|0)``.
    """
    N = params.N
    if check:
        _check_pair(v, u, beta, params, N)
    eta = params.eta
    va, ua = v.array, u.array
    fu, fv = f_within(u, eta), f_within(v, eta)
    out = []
    for k in range(N):                       # k = #v_I
        for vI, vII in _splits(N, k):
            for uI, uII in _splits(N, k + 1):
                w = (_block(fu, uII, uI) * _block(fv, vI, vII)
                     * omega_value(va[vI], ua[uI], beta, eta, "Psi")
                     * omega_value(ua[uII], va[vII], 0.0, eta, "Psi"))
                D = complex(np.sum(va[vII]) - np.sum(ua[uII]))
                out.append(PartitionCore(tuple(uI), tuple(vI), D, -params.kappa * w))
    return out


def density_cores(v: RapiditySet, u: RapiditySet, params: ModelParams, beta: complex,
                  alpha: complex, check: bool = True) -> list[PartitionCore]:
    """Partition cores of ``<0|C(v) e^{alpha Q_x} B(u)|0>``.

    Splits have ``#u_I = #v_I``; each core is
    ``e^{alpha N} f(u_II,u_I) f(v_I,v_II) Omega^J(v_I,u_I|beta-alpha) Omega^J(u_II,v_II|-alpha)``.
    """
    N = params.N
    if check:
        _check_pair(v, u, beta, params, N)
    eta = params.eta
    va, ua = v.array, u.array
    fu, fv = f_within(u, eta), f_within(v, eta)
    scale = cmath.exp(alpha * N)
    out = []
    for k in range(N + 1):
        for vI, vII in _splits(N, k):
            for uI, uII in _splits(N, k):
                w = (_block(fu, uII, uI) * _block(fv, vI, vII)
                     * omega_value(va[vI], ua[uI], beta - alpha, eta, "J")
                     * omega_value(ua[uII], va[vII], -alpha, eta, "J"))
                D = complex(np.sum(va[vII]) - np.sum(ua[uII]))
                out.append(PartitionCore(tuple(uI), tuple(vI), D, scale * w))
    return out


def sum_cores(cores: list[PartitionCore], x: float, x_order: int = 0) -> complex:
    vals = [c.at(x, x_order) for c in cores]
    return complex(math.fsum(z.real for z in vals), math.fsum(z.imag for z in vals))


def gen_field_bruteforce(cfg: GenFieldConfig) -> complex:
    """Field generating function by the full partition sum."""
    v, u = cfg.rapidities()
    return sum_cores(field_cores(v, u, cfg.model, cfg.twist.beta), cfg.x)


def gen_density_bruteforce(x: float, alpha: complex, state, twist: Twist,
                           params: ModelParams | None = None) -> complex:
    """Density generating function by the full partition sum.

    ``state`` is a ground-state string or an explicit on-shell ``(v, u)`` pair.
    """
    v, u, p = _resolve(state, twist, params)
    if not 0 < x < p.L:
        raise DomainError("x must lie strictly inside (0, L)")
    return sum_cores(density_cores(v, u, p, twist.beta, alpha), x)


def surviving_field_partition(ell: int, N: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(u_I, v_I) index sets of the field partition that survives on the string."""
    return tuple(range(ell)), tuple(range(N - ell + 1, N))


def surviving_density_partition(ell: int, N: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(range(ell)), tuple(range(N - ell, N))


@dataclass(frozen=True)
class PartitionAudit:
    total: complex
    magnitudes: list[tuple[tuple[int, ...], tuple[int, ...], float, bool]]

    @property
    def surviving_fraction(self) -> float:
        """1 minus the share of |total| carried by non-surviving partitions."""
        rest = math.fsum(m for *_, m, keep in self.magnitudes if not keep)
        return 1.0 - rest / abs(self.total)


def field_partition_audit(cfg: GenFieldConfig) -> PartitionAudit:
    """Per-partition magnitudes of the field sum, flagged by survival on the string."""
    v, u = cfg.rapidities()
    N = cfg.model.N
    keep = {surviving_field_partition(ell, N) for ell in range(1, N + 1)}
    cores = field_cores(v, u, cfg.model, cfg.twist.beta)
    mags = [(c.u_I, c.v_I, abs(c.at(cfg.x)), (c.u_I, c.v_I) in keep) for c in cores]
    return PartitionAudit(sum_cores(cores, cfg.x), mags)


# ------------------------------------------------------------- string form

def _gamma_poly(gamma: complex, N: int, skip_zero: bool = False) -> complex:
    """prod_{j=1-N}^{N-1} (gamma + j), optionally without the j = 0 factor."""
    out = 1.0 + 0j
    for j in range(1 - N, N):
        if skip_zero and j == 0:
            continue
        out *= gamma + j
    return out


def _check_gamma(gamma: complex) -> None:
    r = round(gamma.real)
    if r != 0 and abs(gamma.imag) < GAMMA_POLE_RADIUS and abs(gamma.real - r) < GAMMA_POLE_RADIUS:
        raise PoleAtGamma(f"gamma = {gamma} is within {GAMMA_POLE_RADIUS} of the integer {r}")


def _gamma(beta: complex, params: ModelParams) -> complex:
    return complex(beta) / params.kappaL


def lambda_psi(ell: int, x: float, params: ModelParams, beta: complex) -> complex:
    """(2l-N-1-gamma) e^{kappa gamma x (N-l+1)} 2F1(l-N-gamma, 1-l; 1; 1-e^beta)."""
    N = params.N
    if not 1 <= ell <= N:
        raise IndexOutOfRange(f"field index must satisfy 1 <= l <= {N}")
    gm = _gamma(beta, params)
    F = hyp2f1_terminating(ell - N - gm, 1 - ell, 1, -cexpm1(beta))
    return (2 * ell - N - 1 - gm) * cmath.exp(params.kappa * gm * x * (N - ell + 1)) * F


def lambda_J(ell: int, x: float, params: ModelParams, beta: complex, alpha: complex = 0.0) -> complex:
    """Bulk density term for 1 <= l <= N-1."""
    N = params.N
    if not 1 <= ell <= N - 1:
        raise IndexOutOfRange(f"density index must satisfy 1 <= l <= {N - 1}")
    gm = _gamma(beta, params)
    F1 = hyp2f1_terminating(ell + 1 - N - gm, 1 - ell, 2, -cexpm1(beta - alpha))
    F2 = hyp2f1_terminating(1 - ell + gm, ell + 1 - N, 2, -cexpm1(-alpha))
    return (N - 2 * ell + gm) * cmath.exp(params.kappa * gm * x * (N - ell)) * F1 * F2


def m_psi(ell: int, x: float, params: ModelParams, beta: complex) -> complex:
    """Symmetrised pair Lambda^Psi_l + Lambda^Psi_{N-l+1}; vanishes at beta = 0."""
    return lambda_psi(ell, x, params, beta) + lambda_psi(params.N + 1 - ell, x, params, beta)


def m_J(ell: int, x: float, params: ModelParams, beta: complex) -> complex:
    """Symmetrised pair Lambda^J_l + Lambda^J_{N-l} at alpha = 0."""
    return lambda_J(ell, x, params, beta) + lambda_J(params.N - ell, x, params, beta)


def m_psi_beta_derivative(ell: int, N: int, x: float, params: ModelParams) -> float:
    """dM^Psi_l/dbeta at beta = 0: -2/(kappa L) - (x/L)(N-2l+1)^2."""
    if not 1 <= ell <= N:
        raise IndexOutOfRange(f"field index must satisfy 1 <= l <= {N}")
    return -2.0 / params.kappaL - (x / params.L) * (N - 2 * ell + 1) ** 2


def m_J_beta_derivative(ell: int, N: int, x: float, params: ModelParams) -> float:
    """Half of dM^J_l/dbeta at beta = 0: (1 + (kappa x/2)(N-2l)^2)/(kappa L)."""
    if not 1 <= ell <= N - 1:
        raise IndexOutOfRange(f"density index must satisfy 1 <= l <= {N - 1}")
    return (1.0 + 0.5 * params.kappa * x * (N - 2 * ell) ** 2) / params.kappaL


def _over_gamma_poly(numer, beta: complex, params: ModelParams, small_beta: bool) -> complex:
    """numer(beta) / prod_j (gamma + j) for a numerator vanishing at beta = 0.

    Below BETA_SWITCH the ratio numer/beta is entire and is read off a circle
    in the beta plane, so the 0/0 at beta = 0 never appears in the samples.
    """
    N = params.N
    gm = _gamma(beta, params)
    _check_gamma(gm)
    if not small_beta:
        return numer(beta) / _gamma_poly(gm, N)
    ratio = cauchy_eval(lambda zs: np.array([numer(z) / z for z in zs]), beta,
                        SMALL_BETA_RADIUS, SMALL_BETA_NODES)
    return params.kappaL * ratio / _gamma_poly(gm, N, skip_zero=True)


def _field_string_numer(x: float, params: ModelParams):
    N = params.N

    def numer(beta):
        # pairs l <-> N+1-l; an unpaired middle term vanishes at beta = 0 by itself
        acc = 0j
        for ell in range(1, N // 2 + 1):
            acc += math.exp(-params.kappa * x * (ell - 1) * (N - ell)) * m_psi(ell, x, params, beta)
        if N % 2:
            mid = (N + 1) // 2
            acc += math.exp(-params.kappa * x * (mid - 1) * (N - mid)) * lambda_psi(mid, x, params, beta)
        return acc

    return numer


def gen_field_string(x: float, state: StringState, twist: Twist) -> complex:
    """String-reduced field generating function.

    kappa (N!)^2 e^{-i x lambda_1} / prod_j (gamma + j) * sum_l e^{-kappa x (l-1)(N-l)} Lambda^Psi_l,
    with lambda_1 the exact string end point.
    """
    params = state.params
    N = params.N
    if not 0 < x < params.L:
        raise DomainError("x must lie strictly inside (0, L)")
    beta = complex(twist.beta)
    lam1 = params.eta * (1 - N) / 2
    pref = params.kappa * math.factorial(N) ** 2 * cmath.exp(-1j * x * lam1)
    small = abs(beta) < BETA_SWITCH
    return pref * _over_gamma_poly(_field_string_numer(x, params), beta, params, small)


@dataclass(frozen=True)
class DensityStringValue:
    """Density generating function split into bulk and boundary (l = 0, N) parts."""

    bulk: complex
    boundary: complex
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def value(self) -> complex:
        return self.bulk + self.boundary

    def __complex__(self) -> complex:
        return complex(self.value)


def _density_bulk_numer(x, alpha, params):
    N = params.N

    def numer(beta):
        acc = 0j
        for ell in range(1, N):
            acc += math.exp(-params.kappa * x * ell * (N - ell)) * lambda_J(ell, x, params, beta, alpha)
        return -(cexpm1(beta - alpha) * cexpm1(-alpha) * cmath.exp(alpha * N)) * acc

    return numer


def _density_boundary_numer(x, alpha, params):
    N = params.N

    def numer(beta):
        gm = _gamma(beta, params)
        l0 = (cexpm1(-alpha) * cmath.exp(alpha * N + params.kappa * gm * x * N)
              * hyp2f1_terminating(1 + gm, 1 - N, 2, -cexpm1(-alpha)))
        lN = (-cexpm1(beta - alpha) * cmath.exp(alpha * N)
              * hyp2f1_terminating(1 - gm, 1 - N, 2, -cexpm1(beta - alpha)))
        return l0 + lN

    return numer


def gen_density_string(x: float, alpha: complex, state: StringState, twist: Twist) -> DensityStringValue:
    """String-reduced density generating function, bulk and boundary terms kept apart."""
    params = state.params
    if not 0 < x < params.L:
        raise DomainError("x must lie strictly inside (0, L)")
    beta = complex(twist.beta)
    small = abs(beta) < BETA_SWITCH
    pref = math.factorial(params.N) ** 2
    bulk = pref * _over_gamma_poly(_density_bulk_numer(x, alpha, params), beta, params, small)
    bnd = pref * _over_gamma_poly(_density_boundary_numer(x, alpha, params), beta, params, small)
    return DensityStringValue(bulk, bnd, {"small_beta_path": small})


# Pre-resummation forms: the surviving partitions evaluated with the two-string
# Omega functions.  Kept as an independent check of the closed forms above.

def gen_field_string_partitions(x: float, params: ModelParams, beta: complex) -> complex:
    N = params.N
    gm = _gamma(beta, params)
    lam1 = params.eta * (1 - N) / 2
    acc = 0j
    for ell in range(1, N + 1):
        phase = cmath.exp(-1j * x * lam1 - params.kappa * x * (ell - 1) * (N - ell)
                          + params.kappa * gm * x * (N - ell + 1))
        acc += (math.comb(N, ell) * math.comb(N, ell - 1) * phase
                * omega_Psi_s(ell, N + 1 - ell + gm, beta) * omega_Psi_s(N + 1 - ell, ell - gm, 0.0))
    return -params.kappa * acc


def gen_density_string_partitions(x: float, alpha: complex, params: ModelParams, beta: complex) -> complex:
    N = params.N
    gm = _gamma(beta, params)
    acc = 0j
    for ell in range(N + 1):
        phase = cmath.exp(alpha * N - params.kappa * x * (ell - gm) * (N - ell))
        acc += (math.comb(N, ell) ** 2 * phase
                * _omega_J_or_one(ell, N - ell + gm, beta - alpha)
                * _omega_J_or_one(N - ell, ell - gm, -alpha))
    return acc


def _omega_J_or_one(n: int, s: complex, beta: complex) -> complex:
    return 1.0 + 0j if n == 0 else omega_J_s(n, s, beta)
