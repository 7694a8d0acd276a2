"""Determinant and recursion forms of the density and field functions Omega^J, Omega^Psi.

Omega^J(v|u|beta) is the scalar product of a twisted dual on-shell vector with
an on-shell vector; Omega^Psi(v|u|beta) (one fewer v) carries the field form
factor.  Both are rational in the rapidities with poles only at v_j = u_k.

Near strings (h(u_j, u_k) close to zero) the literal matrices contain 0*inf
cancellations.  Multiplying column k by h(u, u_k) h(u_k, v) removes every
pole except v = u and leaves Delta'(v) Delta(u) / h(u, u) * det R.  When
h(u, u) itself is (nearly) zero, sizes up to RECURSION_CAP go through the
pole expansion in v, which has no singularity at u_j - u_k = eta.  Larger
sets average the column form over a circle of perturbed rapidities; that is
exact for an analytic function but loses digits as the string grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bethe import ModelParams, bethe_residual
from .errors import CapExceeded, CardinalityMismatch, CoincidingArguments, NotOnShell
from .kernel import SEP_GUARD, RapiditySet, as_array, delta, delta_prime

REG_THRESHOLD = 1e-3
RECURSION_CAP = 9
CIRCLE_NODES = 64
ON_SHELL_TOL = 1e-10


@dataclass(frozen=True)
class OmegaArgs:
    v: RapiditySet
    u: RapiditySet
    beta: complex
    kind: str = "J"
    eta: complex = 1j

    def __post_init__(self):
        if self.kind not in ("J", "Psi"):
            raise ValueError("kind must be 'J' or 'Psi'")
        need = len(self.u) if self.kind == "J" else len(self.u) - 1
        if len(self.v) != need:
            raise CardinalityMismatch(
                f"kind {self.kind} needs #v = {need}, got {len(self.v)} for #u = {len(self.u)}")


def _pole_check(v: np.ndarray, u: np.ndarray, eta: complex) -> None:
    guard = SEP_GUARD * abs(eta)
    if v.size and u.size and np.min(np.abs(v[:, None] - u[None, :])) < guard:
        raise CoincidingArguments("v_j = u_k pole")
    for a in (u, v):
        if a.size > 1:
            d = np.abs(a[:, None] - a[None, :])
            d[np.diag_indices_from(d)] = np.inf
            if d.min() < guard:
                raise CoincidingArguments("coinciding rapidities within one set")


# ------------------------------------------------------------ naive matrices

def _omega_naive(v, u, beta, eta, kind):
    n = len(u)
    hu_u = (u[:, None] - u[None, :] + eta) / eta        # [j,k] = h(u_j,u_k)
    h_to_k = hu_u.prod(axis=0)                           # h(ubar, u_k)
    h_from_k = hu_u.prod(axis=1)                         # h(u_k, ubar)
    h_uv = (u[:, None] - v[None, :] + eta) / eta         # [k,j] = h(u_k,v_j)
    h_vu = (v[:, None] - u[None, :] + eta) / eta         # [j,k] = h(v_j,u_k)
    d_uv = u[:, None] - v[None, :]
    t_uv = eta * eta / (d_uv * (d_uv + eta))             # [k,j] = t(u_k,v_j)
    d_vu = v[:, None] - u[None, :]
    t_vu = eta * eta / (d_vu * (d_vu + eta))             # [j,k] = t(v_j,u_k)
    ratio = h_from_k * h_vu.prod(axis=0) / (h_to_k * h_uv.prod(axis=1))
    sign = 1.0 if kind == "J" else -1.0
    m = np.exp(beta) * t_uv.T + sign * t_vu * ratio[None, :]
    if kind == "Psi":
        last = h_from_k / h_uv.prod(axis=1)
        m = np.vstack([m, last[None, :]])
    pref = delta_prime(v, eta) * delta(u, eta) * h_uv.prod()
    return complex(pref * np.linalg.det(m))


# ----------------------------------------------------------- column form

def _excl_prod(a):
    """``out[..., k, j] = prod_{j' != j} a[..., k, j']``."""
    m = a.shape[-1]
    rep = np.repeat(a[..., None, :], m, axis=-2)
    idx = np.arange(m)
    rep[..., idx, idx] = 1.0
    return rep.prod(axis=-1)


def _omega_columns(v, u, beta, eta, kind):
    """Column-rescaled form, batched over the leading axis of ``v`` and ``u``."""
    B, n = u.shape
    m = v.shape[1]
    hu_u = (u[:, :, None] - u[:, None, :] + eta) / eta
    h_to_k = hu_u.prod(axis=1)                            # (B,n)
    h_from_k = hu_u.prod(axis=2)
    eb = np.exp(beta)
    if m:
        d_uv = u[:, :, None] - v[:, None, :]              # [b,k,j] = u_k - v_j
        h_uv = (d_uv + eta) / eta
        h_vu = (-d_uv + eta) / eta                        # [b,k,j] = h(v_j,u_k)
        g_uv = eta / d_uv                                 # g(u_k,v_j)
        p_uv = _excl_prod(h_uv)                           # h(u_k, vbar minus v_j)
        p_vu = _excl_prod(h_vu)                           # h(vbar minus v_j, u_k)
        first = eb * g_uv * p_uv * h_to_k[:, :, None]
        second = -g_uv * p_vu * h_from_k[:, :, None]      # g(v_j,u_k) = -g(u_k,v_j)
        rows = first + second if kind == "J" else first - second
        mat = np.transpose(rows, (0, 2, 1))               # [b,j,k]
    else:
        mat = np.zeros((B, 0, n), dtype=complex)
    if kind == "Psi":
        mat = np.concatenate([mat, (h_from_k * h_to_k)[:, None, :]], axis=1)
    iu, ju = np.triu_indices(n, 1)
    d_prime_v = 1.0
    if m > 1:
        iv, jv = np.triu_indices(m, 1)
        d_prime_v = np.prod(eta / (v[:, iv] - v[:, jv]), axis=1)
    d_u = np.prod(eta / (u[:, ju] - u[:, iu]), axis=1) if n > 1 else 1.0
    huu = hu_u.prod(axis=(1, 2))
    return d_prime_v * d_u / huu * np.linalg.det(mat)


def _circle_average(v, u, beta, eta, kind, nodes=CIRCLE_NODES):
    """Average of the column form over u_k -> u_k + eps*k with |eps| = rho.

    Each v moves with its nearest u so that a near pole v ~ u keeps its
    distance; rho stays below half of every distance that does change.
    """
    n, m = len(u), len(v)
    a = np.arange(n, dtype=float)
    if m:
        nearest = np.argmin(np.abs(v[:, None] - u[None, :]), axis=1)
        b = a[nearest]
    else:
        b = np.zeros(0)
    rho = 0.25 * abs(eta) / max(n - 1, 1)
    for j in range(m):
        for k in range(n):
            w = abs(b[j] - a[k])
            if w > 0:
                rho = min(rho, abs(v[j] - u[k]) / (2 * w))
    for j in range(n):
        for k in range(j + 1, n):
            rho = min(rho, abs(u[j] - u[k]) / (2 * (k - j)))
    eps = rho * np.exp(2j * np.pi * (np.arange(nodes) + 0.5) / nodes)
    uu = u[None, :] + eps[:, None] * a[None, :]
    vv = v[None, :] + eps[:, None] * b[None, :]
    return complex(np.mean(_omega_columns(vv, uu, beta, eta, kind)))


def omega_value(v, u, beta: complex, eta: complex, kind: str,
                reg_threshold: float = REG_THRESHOLD) -> complex:
    """Omega^J or Omega^Psi from the determinant, choosing the stable path."""
    v = as_array(v) if len(v) else np.zeros(0, dtype=complex)
    u = as_array(u) if len(u) else np.zeros(0, dtype=complex)
    n = len(u)
    if kind == "J" and n == 0:
        return 1.0 + 0j
    _pole_check(v, u, eta)
    hu_u = np.abs((u[:, None] - u[None, :] + eta) / eta)
    hu_u[np.diag_indices_from(hu_u)] = np.inf
    min_uu = hu_u.min() if n > 1 else np.inf
    min_uv = np.abs((u[:, None] - v[None, :] + eta) / eta).min() if len(v) else np.inf
    if min_uu >= reg_threshold and min_uv >= reg_threshold:
        return _omega_naive(v, u, beta, eta, kind)
    if min_uu >= reg_threshold:
        return complex(_omega_columns(v[None, :], u[None, :], beta, eta, kind)[0])
    if n <= RECURSION_CAP:
        return _omega_rec(v, u, beta, eta, kind, RECURSION_CAP)
    return _circle_average(v, u, beta, eta, kind)


def omega_J_det(args: OmegaArgs) -> complex:
    if args.kind != "J":
        raise ValueError("omega_J_det needs kind='J'")
    return omega_value(args.v, args.u, args.beta, args.eta, "J")


def omega_Psi_det(args: OmegaArgs) -> complex:
    if args.kind != "Psi":
        raise ValueError("omega_Psi_det needs kind='Psi'")
    return omega_value(args.v, args.u, args.beta, args.eta, "Psi")


# --------------------------------------------------------------- recursions

def _rec_tables(v, u, eta):
    guard = SEP_GUARD * abs(eta)
    if v.size and np.min(np.abs(v[:, None] - u[None, :])) < guard:
        raise CoincidingArguments("v_j = u_k pole in the recursion")
    d_uu = u[:, None] - u[None, :]
    np.fill_diagonal(d_uu, 1.0)
    f_uu = (d_uu + eta) / d_uu
    np.fill_diagonal(f_uu, 1.0)
    d_uv = u[:, None] - v[None, :]                       # [j,l]
    f_uv = (d_uv + eta) / d_uv                           # f(u_j, v_l)
    f_vu = (-d_uv + eta) / -d_uv                         # [j,l] = f(v_l, u_j)
    g_uv = eta / d_uv                                    # g(u_j, v_l)
    return f_uu, f_uv, f_vu, g_uv


def _omega_rec(v, u, beta, eta, kind, cap):
    n = len(u)
    if n > cap:
        raise CapExceeded(f"recursion capped at N <= {cap}")
    if kind == "J" and n == 0:
        return 1.0 + 0j
    f_uu, f_uv, f_vu, g_uv = _rec_tables(v, u, eta)
    eb = np.exp(beta)
    memo: dict[int, complex] = {0: 1.0 + 0j}
    if kind == "Psi":
        for j in range(n):
            memo[1 << j] = 1.0 + 0j

    def solve(mask: int) -> complex:
        if mask in memo:
            return memo[mask]
        idx = [j for j in range(n) if mask >> j & 1]
        size = len(idx)
        # J: v_0..v_{size-1} with v_{size-1} removed; Psi: v_0..v_{size-2}
        last = size - 1 if kind == "J" else size - 2
        acc = 0j
        for j in idx:
            rest = [k for k in idx if k != j]
            fu_out = np.prod(f_uu[j, rest]) if rest else 1.0   # f(u_j, ubar_j)
            fu_in = np.prod(f_uu[rest, j]) if rest else 1.0    # f(ubar_j, u_j)
            fv_in = np.prod(f_vu[j, :last])                    # f(vbar', u_j)
            fv_out = np.prod(f_uv[j, :last])                   # f(u_j, vbar')
            sub = solve(mask & ~(1 << j))
            if kind == "J":
                acc += -g_uv[j, last] * (fu_out * fv_in - eb * fu_in * fv_out) * sub
            else:
                acc += g_uv[j, last] * (eb * fu_in * fv_out - fu_out * fv_in) * sub
        memo[mask] = acc
        return acc

    return complex(solve((1 << n) - 1))


def omega_J_rec(args: OmegaArgs, cap: int = RECURSION_CAP) -> complex:
    """Expansion over the poles at v_N = u_j, memoised on subsets of u."""
    return _omega_rec(as_array(args.v) if len(args.v) else np.zeros(0, complex),
                      as_array(args.u), args.beta, args.eta, "J", cap)


def omega_Psi_rec(args: OmegaArgs, cap: int = RECURSION_CAP) -> complex:
    return _omega_rec(as_array(args.v) if len(args.v) else np.zeros(0, complex),
                      as_array(args.u), args.beta, args.eta, "Psi", cap)


# -------------------------------------------------------------- form factors

def branch_free_residual(res) -> float:
    """Largest residual after removing whole multiples of 2*pi*i (the log branch)."""
    two_pi = 2 * np.pi
    return max((abs(c - 1j * two_pi * round(c.imag / two_pi)) for c in res), default=0.0)


def _require_on_shell(s: RapiditySet, params: ModelParams, tol=ON_SHELL_TOL) -> None:
    if len(s) == 0:
        return
    worst = branch_free_residual(bethe_residual(s, params))
    if worst > tol:
        raise NotOnShell(f"Bethe residual {worst:.3e} exceeds {tol:.0e}")


def density_form_factor(v: RapiditySet, u: RapiditySet, x: float, params: ModelParams,
                        dbeta: float = 1e-5) -> complex:
    """<0|C(v) j(x) B(u)|0> for on-shell v, u of equal size.

    The beta derivative of Omega^J at zero is a central difference with one
    Richardson step.
    """
    if len(v) != len(u):
        raise CardinalityMismatch("density form factor needs #v = #u")
    _require_on_shell(u, params)
    _require_on_shell(v, params)
    ua, va = u.array, v.array
    pref = 1j * np.sum(ua - va) * np.exp(1j * x * np.sum(ua - va))
    if pref == 0:
        return 0j
    eta = params.eta

    def d(hstep):
        return (omega_value(va, ua, hstep, eta, "J") - omega_value(va, ua, -hstep, eta, "J")) / (2 * hstep)

    deriv = (4 * d(dbeta / 2) - d(dbeta)) / 3
    return complex(pref * deriv)


def field_form_factor(v: RapiditySet, u: RapiditySet, x: float, params: ModelParams) -> complex:
    """<0|C(v) Psi(x) B(u)|0> with #v = #u - 1."""
    if len(v) != len(u) - 1:
        raise CardinalityMismatch("field form factor needs #v = #u - 1")
    _require_on_shell(u, params)
    _require_on_shell(v, params)
    ua = u.array
    va = v.array if len(v) else np.zeros(0, complex)
    phase = np.exp(1j * x * (np.sum(ua) - np.sum(va)))
    return complex(np.sqrt(params.kappa) * phase * omega_value(va, ua, 0.0, params.eta, "Psi"))
