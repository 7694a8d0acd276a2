"""Model parameters, vacuum ratios, Bethe residuals and the string ground state.

The attractive gas has coupling ``c = -kappa`` and ``eta = i*kappa``.  Its
ground state is a single string ``lambda_j = i*kappa*t_j`` with
``t_j = (1-N)/2 + j - 1 + eps_j``.  The corrections ``eps_j`` are exponentially
small in ``kappa*L``, so the solver works with the logarithms of the gap
deviations ``t_{j+1} - t_j - 1`` rather than with the roots themselves.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (BranchWarning, CoincidingArguments, DomainError, IllConditioned,
                     MaxIterations)
from .kernel import SEP_GUARD, RapiditySet, as_array


@dataclass(frozen=True)
class ModelParams:
    kappa: float
    L: float
    N: int

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")
        if not self.L > 0:
            raise DomainError("L must be positive")
        if int(self.N) != self.N or self.N < 0:
            raise DomainError("N must be a non-negative integer")
        object.__setattr__(self, "N", int(self.N))

    @property
    def eta(self) -> complex:
        return 1j * self.kappa

    @property
    def kappaL(self) -> float:
        return self.kappa * self.L


@dataclass(frozen=True)
class Twist:
    beta: complex

    @staticmethod
    def gamma_of(beta: complex, params: ModelParams) -> complex:
        return beta / params.kappaL

    def gamma(self, params: ModelParams) -> complex:
        return self.gamma_of(self.beta, params)


@dataclass(frozen=True)
class StringState:
    params: ModelParams
    roots: RapiditySet
    corrections: tuple[float, ...]
    residual_norm: float
    refined: bool = False
    iterations: int = 0
    # log of the gap deviations t_{j+1} - t_j - 1; None for the bare string
    log_gaps: tuple[float, ...] | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.params.N


def r(u, params: ModelParams):
    return np.exp(-1j * params.L * np.asarray(u, dtype=complex))


def _check_x(x, params):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > params.L):
        raise DomainError("x must lie in [0, L]")
    return x


def r1(u, x, params: ModelParams):
    x = _check_x(x, params)
    return np.exp(-1j * np.asarray(u, dtype=complex) * x)


def r2(u, x, params: ModelParams):
    x = _check_x(x, params)
    return np.exp(-1j * np.asarray(u, dtype=complex) * (params.L - x))


# ---------------------------------------------------------------- residuals

def _string_log_ratios(s: RapiditySet) -> np.ndarray:
    """``sum_k log|(d_jk + 1)/(d_jk - 1)|`` with ``d_jk = (u_j - u_k)/eta``.

    Evaluated from the gap representation; neighbour factors come straight from
    the stored log-gaps, so nothing underflows.
    """
    n = len(s)
    y = np.array(s.log_gaps)
    delta = np.exp(y)
    out = np.zeros(n)
    for j in range(n):
        terms = []
        for k in range(n):
            if k == j:
                continue
            sjk = float(delta[k:j].sum()) if j > k else -float(delta[j:k].sum())
            n_jk = j - k
            # numerator |d + 1|
            if n_jk + 1 == 0:          # k = j + 1: |d + 1| = delta_j
                terms.append(y[j])
            else:
                terms.append(math.log(abs(n_jk + 1 + sjk)))
            # denominator |d - 1|
            if n_jk - 1 == 0:          # k = j - 1: |d - 1| = delta_{j-1}
                terms.append(-y[k])
            else:
                terms.append(-math.log(abs(n_jk - 1 + sjk)))
        out[j] = math.fsum(terms)
    return out


def _residual(u: RapiditySet, beta: complex, params: ModelParams) -> list[complex]:
    eta = params.eta
    vals = u.array
    n = len(vals)
    if n > 1 and u.min_separation() < SEP_GUARD * abs(eta):
        raise CoincidingArguments("coinciding rapidities")
    phase = 1j * params.L * vals + beta
    if u.log_gaps is not None and n > 1 and abs(u.eta - eta) <= 1e-14 * abs(eta):
        # all pair ratios are real and positive on a structured string
        return [complex(p + lr) for p, lr in zip(phase, _string_log_ratios(u))]
    out = []
    for j in range(n):
        acc = [phase[j]]
        for k in range(n):
            if k == j:
                continue
            d = vals[j] - vals[k]
            num, den = d + eta, d - eta
            if abs(num) < SEP_GUARD * abs(eta) or abs(den) < SEP_GUARD * abs(eta):
                raise CoincidingArguments("Bethe factor has a zero or a pole")
            ratio = num / den
            if ratio.imag == 0 and ratio.real < 0:
                warnings.warn("Bethe factor on the negative real axis", BranchWarning)
            acc.append(np.log(ratio))
        out.append(complex(math.fsum(a.real for a in acc), math.fsum(a.imag for a in acc)))
    return out


def bethe_residual(u: RapiditySet | StringState, params: ModelParams | None = None) -> list[complex]:
    """Log-form residual of ``e^{iLu_j} prod_k (u_j-u_k+eta)/(u_j-u_k-eta) = 1``."""
    if isinstance(u, StringState):
        params = params or u.params
        u = u.roots
    return _residual(u, 0.0, params)


def twisted_bethe_residual(v: RapiditySet, beta: complex, params: ModelParams) -> list[complex]:
    """As :func:`bethe_residual` with the extra twist factor ``e^{-beta}``."""
    return _residual(v, beta, params)


# ------------------------------------------------------------------- solver

def _bare_string(N: int) -> np.ndarray:
    return (1 - N) / 2 + np.arange(N, dtype=float)


def _full_gaps(z: np.ndarray, N: int) -> np.ndarray:
    """Expand the independent log-gaps to all ``N-1`` using the mirror symmetry."""
    y = np.empty(N - 1)
    for l in range(N - 1):
        y[l] = z[min(l, N - 2 - l)]
    return y


def _string_t(y: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    delta = np.exp(y)
    c = np.concatenate([[0.0], np.cumsum(delta)])
    eps = c - c.mean()
    return _bare_string(N) + eps, eps


def _solver_residual(z: np.ndarray, N: int, kL: float) -> np.ndarray:
    """Real residual ``kappa*L*t_j + sum_k log|(d-1)/(d+1)|`` for the first half."""
    y = _full_gaps(z, N)
    tt, _ = _string_t(y, N)
    s = RapiditySet(tuple(1j * tt), eta=1j, log_gaps=tuple(y))
    lr = _string_log_ratios(s)
    m = len(z)
    return np.array([math.fsum([kL * tt[j], -lr[j]]) for j in range(m)])


def string_ground_state(params: ModelParams, refine: bool = True, tol: float = 1e-12,
                        max_iter: int = 60) -> StringState:
    """Ground-state string, optionally Newton-refined on the imaginary axis.

    The unknowns are ``log(t_{j+1} - t_j - 1)`` for the independent half of
    the gaps.  In these variables the residual is almost linear with unit
    coefficients, so the Jacobian stays O(1)-conditioned at any ``kappa*L``.
    """
    N = params.N
    if N < 1:
        raise DomainError("string_ground_state needs N >= 1")
    if max_iter < 1:
        raise DomainError("max_iter must be at least 1")
    eta = params.eta
    t0 = _bare_string(N)
    if N == 1:
        roots = RapiditySet((0j,), "lambda", eta, ())
        return StringState(params, roots, (0.0,), 0.0, refine, 0, ())
    if not refine:
        roots = RapiditySet(tuple(eta * t0), "lambda")
        return StringState(params, roots, tuple([0.0] * N), math.inf, False, 0, None)

    kL = params.kappaL
    m = N // 2
    # leading order: the residual is y_{j-1} - y_j + const_j; probe it at a tiny gap
    probe = np.full(m, -kL)
    z = probe - _linear_solve(_jacobian(probe, N, kL), _solver_residual(probe, N, kL))
    best = None
    for it in range(1, max_iter + 1):
        res = _solver_residual(z, N, kL)
        norm = float(np.max(np.abs(res)))
        if best is None or norm < best[1]:
            best = (z.copy(), norm)
        if norm <= tol:
            break
        jac = _jacobian(z, N, kL)
        if np.linalg.cond(jac) > 1e14:
            raise IllConditioned("Bethe Jacobian condition number exceeds 1e14")
        step = _linear_solve(jac, res)
        lam = 1.0
        while lam > 1e-6:
            trial = z - lam * step
            tn = float(np.max(np.abs(_solver_residual(trial, N, kL))))
            if np.isfinite(tn) and tn < norm:
                break
            lam *= 0.5
        else:
            # no descent left: accept the best iterate if it meets the tolerance
            break
        z = trial
    else:
        it = max_iter
    z, norm = best
    if norm > tol:
        raise MaxIterations(f"Bethe solver stalled at residual {norm:.3e}", best=z)
    y = _full_gaps(z, N)
    tt, eps = _string_t(y, N)
    roots = RapiditySet(tuple(eta * tt), "lambda", eta, tuple(y))
    res = bethe_residual(roots, params)
    resnorm = float(max(abs(c) for c in res))
    return StringState(params, roots, tuple(float(e) for e in eps), resnorm, True, it, tuple(y))


def _jacobian(z: np.ndarray, N: int, kL: float, step: float = 1e-6) -> np.ndarray:
    m = len(z)
    jac = np.empty((m, m))
    for i in range(m):
        dz = np.zeros(m)
        dz[i] = step
        jac[:, i] = (_solver_residual(z + dz, N, kL) - _solver_residual(z - dz, N, kL)) / (2 * step)
    return jac


def _linear_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.linalg.solve(a, b)


def energy(u) -> complex:
    """``sum_j u_j**2``."""
    a = as_array(u.roots if isinstance(u, StringState) else u)
    return complex(np.sum(a * a))


def real_energy(state: StringState) -> float:
    """Energy of a string state with the realness check applied."""
    e = energy(state.roots)
    if abs(e.imag) > 1e-10 * abs(e.real) + 1e-12:
        raise DomainError(f"energy has an imaginary part {e.imag:.3e}")
    return e.real


def twist_roots(state: StringState, beta: complex) -> RapiditySet:
    """``mu_j = lambda_j + i*beta/L``; solves the twisted equations if lambda solves the plain ones."""
    shift = 1j * beta / state.params.L
    return state.roots.shifted(shift, label="mu")
