"""Closed forms of Omega^J and Omega^Psi when u is an exact string u_{k+1} = u_k + eta.

Also the first-order beta expansions and the two-string specialisation
v_1 - u_1 = eta*s, where everything collapses to one terminating 2F1.  Using
Gamma(z) Gamma(1-z) = pi / sin(pi z), the ratio pi / (sin(pi s) Gamma(n-s))
becomes (-1)^{n+1} Gamma(1-n+s), so the s-dependence is a finite product
prod_j (s + j); it is accumulated as a sum of complex logarithms.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.special import loggamma

from .errors import NonTerminating, NotAString, PoleAtS
from .kernel import RapiditySet, as_array

STRING_TOL = 1e-12
POLE_RADIUS = 1e-8


def cexpm1(z: complex) -> complex:
    """``e^z - 1`` without cancellation for small complex ``z``."""
    z = complex(z)
    if z.imag == 0:
        return complex(math.expm1(z.real))
    x, y = z.real, z.imag
    return complex(math.expm1(x) * math.cos(y) - 2 * math.sin(y / 2) ** 2, math.exp(x) * math.sin(y))


def check_string(u, eta: complex, tol: float = STRING_TOL) -> np.ndarray:
    a = as_array(u)
    if len(a) > 1:
        dev = np.max(np.abs(np.diff(a) - eta))
        if dev > tol * abs(eta):
            raise NotAString(f"spacing deviates from eta by {dev:.3e}")
    return a


def _g_prod(x: complex, v: np.ndarray, eta: complex) -> complex:
    return complex(np.prod(eta / (x - v))) if len(v) else 1.0 + 0j


def _string_sum(v, u, beta, eta) -> complex:
    n = len(u)
    terms = [math.comb(n - 1, k) * cmath.exp(k * beta) * (-1) ** (n - 1 - k) / _g_prod(u[k], v, eta)
             for k in range(n)]
    return math.factorial(n) * _g_prod(u[0], v, eta) * _g_prod(u[-1], v, eta) * complex(np.sum(terms))


def omega_J_string(v, u, beta: complex, eta: complex = 1j) -> complex:
    """Omega^J on an exact string u; #v = #u."""
    ua = check_string(u, eta)
    va = as_array(v) if len(v) else np.zeros(0, complex)
    if len(va) != len(ua):
        raise ValueError("Omega^J needs #v = #u")
    return cexpm1(beta) * _string_sum(va, ua, beta, eta)


def omega_Psi_string(v, u, beta: complex, eta: complex = 1j) -> complex:
    """Omega^Psi on an exact string u; #v = #u - 1."""
    ua = check_string(u, eta)
    va = as_array(v) if len(v) else np.zeros(0, complex)
    if len(va) != len(ua) - 1:
        raise ValueError("Omega^Psi needs #v = #u - 1")
    return _string_sum(va, ua, beta, eta)


def string_set(u1: complex, n: int, eta: complex = 1j) -> np.ndarray:
    return u1 + eta * np.arange(n)


def double_string(n: int, s: complex, kind: str, u1: complex = 0.17 - 0.23j,
                  eta: complex = 1j) -> tuple[np.ndarray, np.ndarray]:
    """(v, u) with u a string of length n and v a string offset by eta*s."""
    m = n if kind == "J" else n - 1
    return string_set(u1 + eta * s, m, eta), string_set(u1, n, eta)


def binom_g_identity(n: int, k: int, eta: complex = 1j, u1: complex = 0.3 + 0.1j) -> tuple[complex, complex]:
    """g(u_{k+1}, u minus u_{k+1}) on a string against its binomial closed form."""
    u = string_set(u1, n, eta)
    others = np.delete(u, k)
    lhs = _g_prod(u[k], others, eta)
    rhs = (-1) ** (n - 1 - k) * math.comb(n - 1, k) / math.factorial(n - 1)
    return lhs, complex(rhs)


def omega_beta_expansion(v, u, kind: str, eta: complex = 1j) -> tuple[complex, complex]:
    """Coefficients of beta^0 and beta^1 of Omega on an exact string."""
    ua = check_string(u, eta)
    va = as_array(v) if len(v) else np.zeros(0, complex)
    n = len(ua)
    base = math.factorial(n) * math.factorial(n - 1) * _g_prod(ua[0], va, eta) * _g_prod(ua[-1], va, eta)
    if kind == "J":
        return 0j, base * complex(np.sum(ua - va)) / eta
    if kind == "Psi":
        return base, base * ((n - 1) + complex(np.sum(ua[:n - 1] - va)) / eta)
    raise ValueError("kind must be 'J' or 'Psi'")


def hyp2f1_terminating(a: complex, b: int, c: complex, z: complex) -> complex:
    """2F1(a, b; c; z) for a non-positive integer b, as a finite sum."""
    bc = complex(b)
    if bc.imag != 0 or bc.real != round(bc.real) or bc.real > 0:
        raise NonTerminating("b must be a non-positive integer")
    nb = -int(round(bc.real))
    term = 1.0 + 0j
    out = [term]
    for k in range(nb):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        out.append(term)
    return complex(math.fsum(x.real for x in out), math.fsum(x.imag for x in out))


def _check_pole(s: complex, lo: int, hi: int) -> None:
    r = round(s.real)
    if abs(s.imag) < POLE_RADIUS and abs(s.real - r) < POLE_RADIUS and lo <= r <= hi:
        raise PoleAtS(f"s = {s} sits on a pole (integer in [{lo}, {hi}])")


def _log_poly(s: complex, lo: int, hi: int) -> complex:
    return sum(cmath.log(s + j) for j in range(lo, hi + 1))


def log_omega_J_s(n: int, s: complex, beta: complex) -> complex:
    """Complex log of Omega^J_n(s|beta); None when the value is exactly zero."""
    s = complex(s)
    _check_pole(s, 1 - n, n - 1)
    em = cexpm1(beta)
    F = hyp2f1_terminating(1 - s, 1 - n, 2, -em)
    if em == 0 or F == 0:
        return None
    return (1j * math.pi + 2 * loggamma(n + 1) + cmath.log(em) + cmath.log(F)
            - _log_poly(s, 1 - n, n - 1))


def log_omega_Psi_s(n: int, s: complex, beta: complex) -> complex:
    s = complex(s)
    _check_pole(s, 1 - n, n - 1)
    F = hyp2f1_terminating(1 - s, 1 - n, 1, -cexpm1(beta))
    if F == 0:
        return None
    return loggamma(n + 1) + loggamma(n) + cmath.log(F) - _log_poly(s, 1 - n, n - 2)


def omega_J_s(n: int, s: complex, beta: complex) -> complex:
    """Omega^J_n on two strings with v_1 - u_1 = eta*s:
    (-1)^n pi (n!)^2 (e^beta - 1) 2F1(1-s, 1-n; 2; 1-e^beta) / (sin(pi s) Gamma(n+s) Gamma(n-s))."""
    lv = log_omega_J_s(n, s, beta)
    return 0j if lv is None else complex(cmath.exp(lv))


def omega_Psi_s(n: int, s: complex, beta: complex) -> complex:
    """(-1)^{n-1} pi n!(n-1)! 2F1(1-s, 1-n; 1; 1-e^beta) / (sin(pi s) Gamma(n-1+s) Gamma(n-s))."""
    lv = log_omega_Psi_s(n, s, beta)
    return 0j if lv is None else complex(cmath.exp(lv))
