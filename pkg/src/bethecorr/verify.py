"""Property suites behind ``bethecorr verify``.

Each suite draws its random inputs from a generator seeded once, in a fixed
order, so a given (suite, seed, trials) always produces the same report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernel as K
from . import oracles as O
from . import stringforms as S
from .bethe import ModelParams, Twist, string_ground_state
from .formfactor import _omega_rec, omega_value
from .generating import (GenFieldConfig, field_partition_audit, gen_density_bruteforce,
                         gen_density_string, gen_field_bruteforce, gen_field_string)
from .sampling import random_beta, random_pair, random_points, rel_err

ROUNDOFF_FLOOR = 1e-10
SUITES = ("kernel", "lemmas", "formfactor", "stringforms", "generating")

TOLERANCES = {
    "identity": 1e-12,
    "lemma": 1e-9,
    "omega": 1e-9,
    "exchange": 1e-10,
    "string": 1e-9,
    "brute_vs_string": 1e-6,
    "audit": 1e-6,
}


@dataclass(frozen=True)
class PropertyResult:
    name: str
    instances: int
    max_rel_err: float
    tol: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<44} n={self.instances:<5d} max_rel_err={self.max_rel_err:.3e} tol={self.tol:.0e}"


def _check(name: str, errs: list[float], tol: float) -> PropertyResult:
    worst = max(errs) if errs else 0.0
    return PropertyResult(name, len(errs), worst, tol, bool(worst <= tol))


# ------------------------------------------------------------------ suites

def suite_kernel(rng: np.random.Generator, trials: int) -> list[PropertyResult]:
    eta = 1j
    e_f, e_ht, e_gh, e_d = [], [], [], []
    for _ in range(trials):
        u, v = random_points(rng, 2)
        g = K.g(u, v, eta)
        e_f.append(rel_err(K.f(u, v, eta), 1 + g))
        e_ht.append(rel_err(K.h(u, v, eta) * K.t(u, v, eta), g))
        e_gh.append(rel_err(K.f(u, v, eta), g * K.h(u, v, eta)))
        n = int(rng.integers(0, 7))
        s = random_points(rng, n)
        e_d.append(rel_err(K.delta_prime(s, eta), (-1) ** (n * (n - 1) // 2) * K.delta(s, eta)))
    counts = []
    for n in range(0, 8):
        for k in range(n + 1):
            parts = list(K.enumerate_bipartitions(n, k))
            ok = len(parts) == math.comb(n, k) and all(
                sorted(p.part_I + p.part_II) == list(range(n)) for p in parts)
            counts.append(0.0 if ok else 1.0)
    tol = TOLERANCES["identity"]
    return [_check("f = 1 + g", e_f, tol), _check("h t = g", e_ht, tol), _check("f = g h", e_gh, tol),
            _check("Delta' = (-1)^{N(N-1)/2} Delta", e_d, tol),
            _check("bipartition count and cover", counts, 0.0)]


def _rand_affine(rng):
    a, b = random_beta(rng), random_beta(rng)
    return lambda w: a + b * w


def _rand_exp(rng):
    a, b = random_beta(rng), 0.3 * random_beta(rng)
    return lambda w: a * np.exp(b * w)


def suite_lemmas(rng: np.random.Generator, trials: int) -> list[PropertyResult]:
    eta = 1j
    e1, e2, e3, chain = [], [], [], []
    for _ in range(trials):
        m1 = int(rng.integers(0, 4))
        m2 = int(rng.integers(0, 6 - m1))
        m2 = max(m2, 0 if m1 else 1)
        y = random_points(rng, m1)
        z = random_points(rng, m2, avoid=y)
        xi = random_points(rng, m1 + m2, avoid=np.concatenate([y, z, y - eta]))
        e1.append(rel_err(*O.lemma_identity_K(xi, y, z, eta)))
        m = int(rng.integers(1, 6))
        w = random_points(rng, m)
        xi = random_points(rng, m, avoid=np.concatenate([w, w - eta]))
        c1, c2 = _rand_affine(rng), _rand_exp(rng)
        e2.append(rel_err(*O.lemma_long_det(w, xi, c1, c2, eta, "II,I")))
        e3.append(rel_err(*O.lemma_long_det(w, xi, c1, c2, eta, "I,II")))
    for _ in range(max(trials // 2, 1)):
        n = int(rng.integers(1, 7))
        v, u = random_pair(rng, n - 1, n)
        beta = random_beta(rng)
        ps = O.omega_psi_partition_sum(v, u, beta, eta)
        det = omega_value(v, u, beta, eta, "Psi")
        rec = _omega_rec(v, u, beta, eta, "Psi", 9)
        chain.append(max(rel_err(ps, det), rel_err(det, rec)))
    tol = TOLERANCES["lemma"]
    return [_check("K partition lemma", e1, tol), _check("long determinant lemma", e2, tol),
            _check("long determinant corollary", e3, tol),
            _check("Omega^Psi partition sum = det = rec", chain, TOLERANCES["omega"])]


def suite_formfactor(rng: np.random.Generator, trials: int) -> list[PropertyResult]:
    eta = 1j
    ej, ep, ex, perm = [], [], [], []
    for _ in range(trials):
        n = int(rng.integers(1, 7))
        v, u = random_pair(rng, n, n)
        beta = random_beta(rng)
        val = omega_value(v, u, beta, eta, "J")
        ej.append(rel_err(val, _omega_rec(v, u, beta, eta, "J", 9)))
        ex.append(rel_err(val, np.exp(beta * n) * omega_value(u, v, -beta, eta, "J")))
        p, q = rng.permutation(n), rng.permutation(n)
        perm.append(rel_err(val, omega_value(v[p], u[q], beta, eta, "J")))
        vp, up = random_pair(rng, n, n + 1)
        ep.append(rel_err(omega_value(vp, up, beta, eta, "Psi"), _omega_rec(vp, up, beta, eta, "Psi", 9)))
    return [_check("Omega^J det = rec", ej, TOLERANCES["omega"]),
            _check("Omega^Psi det = rec", ep, TOLERANCES["omega"]),
            _check("Omega^J exchange symmetry", ex, TOLERANCES["exchange"]),
            _check("Omega^J permutation invariance", perm, TOLERANCES["exchange"])]


def suite_stringforms(rng: np.random.Generator, trials: int) -> list[PropertyResult]:
    eta = 1j
    es, eh, eb = [], [], []
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        kind = "J" if rng.random() < 0.5 else "Psi"
        u = S.string_set(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), n, eta)
        v = random_points(rng, n if kind == "J" else n - 1, avoid=u, r_min=0.3, r_max=3 + n)
        beta = random_beta(rng)
        closed = (S.omega_J_string if kind == "J" else S.omega_Psi_string)(v, u, beta, eta)
        es.append(rel_err(closed, omega_value(v, u, beta, eta, kind)))
        n2 = int(rng.integers(1, 11))
        s = complex(rng.uniform(-3, 3), rng.uniform(0.1, 1.0))
        vv, uu = S.double_string(n2, s, kind)
        sf = (S.omega_J_s if kind == "J" else S.omega_Psi_s)(n2, s, beta)
        ref = (S.omega_J_string if kind == "J" else S.omega_Psi_string)(vv, uu, beta)
        eh.append(rel_err(sf, ref))
    for n in range(1, 9):
        for k in range(n):
            eb.append(rel_err(*S.binom_g_identity(n, k)))
    return [_check("string closed form = determinant", es, TOLERANCES["string"]),
            _check("hypergeometric form = string form", eh, TOLERANCES["string"]),
            _check("binomial g identity", eb, TOLERANCES["identity"])]


def _brute_vs_string(kL: float, N: int, beta: float, x: float) -> float:
    p = ModelParams(1.0, kL, N)
    st = string_ground_state(p)
    tw = Twist(beta)
    bf = gen_field_bruteforce(GenFieldConfig(x, tw, state=st))
    sf = gen_field_string(x, st, tw)
    bd = gen_density_bruteforce(x, 0.2, st, tw)
    sd = gen_density_string(x, 0.2, st, tw).value
    return max(rel_err(bf, sf), rel_err(bd, sd))


def suite_generating(rng: np.random.Generator, trials: int) -> list[PropertyResult]:
    gaps = {20.0: [], 40.0: []}
    for N in (2, 3, 4, 5):
        for beta in (0.05, 0.2):
            x = float(rng.uniform(0.2, 3.0))
            for kL in gaps:
                gaps[kL].append(_brute_vs_string(kL, N, beta, x))
    # only gaps above the roundoff floor say anything about the decay
    mono = [0.0 if a > b else 1.0 for a, b in zip(gaps[20.0], gaps[40.0]) if a > ROUNDOFF_FLOOR]
    st = string_ground_state(ModelParams(1.0, 40.0, 4))
    audit = field_partition_audit(GenFieldConfig(0.7, Twist(0.1), state=st))
    return [_check("brute force = string form, kappa L = 40", gaps[40.0], TOLERANCES["brute_vs_string"]),
            PropertyResult("brute force = string form, kappa L = 20", len(gaps[20.0]),
                           max(gaps[20.0]), float("inf"), True),
            _check("gap shrinks from kappa L = 20 to 40", mono, 0.0),
            _check("surviving partitions carry the sum", [1.0 - audit.surviving_fraction],
                   TOLERANCES["audit"])]


_SUITE_FNS: dict[str, Callable] = {
    "kernel": suite_kernel,
    "lemmas": suite_lemmas,
    "formfactor": suite_formfactor,
    "stringforms": suite_stringforms,
    "generating": suite_generating,
}


def run_suite(name: str, seed: int, trials: int) -> list[tuple[str, list[PropertyResult]]]:
    names = SUITES if name == "all" else (name,)
    if any(n not in _SUITE_FNS for n in names):
        raise ValueError(f"unknown suite {name!r}")
    rng = np.random.default_rng(seed)
    return [(n, _SUITE_FNS[n](rng, trials)) for n in names]


def format_report(results, seed: int, trials: int) -> str:
    lines = [f"bethecorr verify  seed={seed} trials={trials}"]
    for name, props in results:
        lines.append(f"[{name}]")
        lines.extend("  " + p.line() for p in props)
    ok = all(p.passed for _, props in results for p in props)
    lines.append("ALL PASS" if ok else "FAILURES PRESENT")
    return "\n".join(lines) + "\n"
