"""Acceptance criteria, one PASS/FAIL line each.

Run as ``python3 tests/test_acceptance.py`` for the ten-line report, or under
pytest (``pytest -s tests/test_acceptance.py`` shows the lines).
"""

import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bethecorr.bethe import ModelParams, Twist, string_ground_state
from bethecorr.correlations import (LimitOracle, density_correlation, density_pre_derivative,
                                    field_correlation, ground_state_norm, numerical_norm)
from bethecorr.errors import RegimeWarning
from bethecorr.generating import (GenFieldConfig, field_partition_audit, m_J, m_J_beta_derivative,
                                  m_psi, m_psi_beta_derivative)
from bethecorr.verify import suite_formfactor, suite_lemmas, suite_stringforms

from conftest import ground_state, rel

SEED = 20240611
X_POINTS = (0.3, 0.7, 1.5, 3.0, 5.0)


def _by_name(results):
    return {r.name: r for r in results}


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def lemma_suite():
    res, secs = _timed(lambda: _by_name(suite_lemmas(np.random.default_rng(SEED), 100)))
    parts = [res[k] for k in ("K partition lemma", "long determinant lemma", "long determinant corollary")]
    ok = all(p.passed and p.instances >= 100 and p.tol == 1e-9 for p in parts) and secs < 10
    worst = max(p.max_rel_err for p in parts)
    return ok, f"{sum(p.instances for p in parts)} instances, max rel err {worst:.2e}, {secs:.1f}s"


def psi_chain():
    res, secs = _timed(lambda: _by_name(suite_lemmas(np.random.default_rng(SEED + 1), 100)))
    chain = res["Omega^Psi partition sum = det = rec"]
    ok = chain.passed and chain.instances >= 50 and secs < 30
    return ok, f"{chain.instances} instances, max rel err {chain.max_rel_err:.2e}, {secs:.1f}s"


def omega_J_equivalence():
    res = _by_name(suite_formfactor(np.random.default_rng(SEED), 100))
    rec, exch = res["Omega^J det = rec"], res["Omega^J exchange symmetry"]
    ok = rec.passed and exch.passed and rec.instances >= 100 and exch.tol == 1e-10
    return ok, f"det vs rec {rec.max_rel_err:.2e}, exchange {exch.max_rel_err:.2e}"


def string_closed_forms():
    res = _by_name(suite_stringforms(np.random.default_rng(SEED), 100))
    a, b = res["string closed form = determinant"], res["hypergeometric form = string form"]
    return a.passed and b.passed, f"string {a.max_rel_err:.2e}, hypergeometric {b.max_rel_err:.2e}"


def norm_limit():
    errs = []
    for N in (1, 2, 3, 4):
        p = ModelParams(1.0, 40.0, N)
        errs.append(rel(numerical_norm(p, state=ground_state(1.0, 40.0, N)), ground_state_norm(p)))
    return max(errs) <= 1e-5, "rel errs " + ", ".join(f"{e:.1e}" for e in errs)


def master_check():
    tol = {"field": 1e-5, "density": 1e-4}
    worst = {}
    for kL in (40.0, 20.0):
        for N in (2, 3, 4):
            p = ModelParams(1.0, kL, N)
            for kind in ("field", "density"):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RegimeWarning)
                    oracle = LimitOracle(p, kind, state=ground_state(1.0, kL, N))
                fn = field_correlation if kind == "field" else density_correlation
                worst[kL, N, kind] = max(rel(oracle.evaluate(x).value, fn(x, p)) for x in X_POINTS)
    keys = [(N, kind) for N in (2, 3, 4) for kind in ("field", "density")]
    within = all(worst[40.0, N, kind] <= tol[kind] for N, kind in keys)
    larger = all(worst[20.0, N, kind] > worst[40.0, N, kind] for N, kind in keys)
    detail = "; ".join(f"N={N} {kind} {worst[40.0, N, kind]:.1e}/{worst[20.0, N, kind]:.1e}" for N, kind in keys)
    return within and larger, detail + " (kappa L 40/20)"


def exact_limits():
    origin = max(abs(field_correlation(0.0, ModelParams(1.0, 40.0, N)) - N / 40.0) / (N / 40.0)
                 for N in range(1, 51))
    one = ModelParams(1.7, 25.0, 1)
    xs = np.linspace(0.01, 24.0, 40)
    dens = max(abs(density_correlation(x, one)) for x in xs)
    field = max(abs(field_correlation(x, one) - 1 / one.L) for x in xs)
    ok = origin <= 2 * np.finfo(float).eps and dens == 0 and field <= 1e-16
    return ok, f"origin {origin:.1e}, N=1 density {dens:.1e}, N=1 field {field:.1e}"


def derivative_oracles():
    e2 = []
    for N in (2, 3, 5, 8):
        p = ModelParams(1.3, 40.0, N)
        h = 1e-4 / p.kappa
        for x in X_POINTS:
            fd = (density_pre_derivative(x + h, p) - 2 * density_pre_derivative(x, p)
                  + density_pre_derivative(x - h, p)) / h ** 2
            e2.append(rel(0.5 * fd, density_correlation(x, p)))
    em = []
    db = 1e-6
    for N in (2, 3, 4, 5):
        p = ModelParams(1.0, 40.0, N)
        for x in (0.4, 1.2):
            for ell in range(1, N + 1):
                fd = (m_psi(ell, x, p, db) - m_psi(ell, x, p, -db)) / (2 * db)
                em.append(rel(fd, m_psi_beta_derivative(ell, N, x, p)))
            for ell in range(1, N):
                fd = (m_J(ell, x, p, db) - m_J(ell, x, p, -db)) / (2 * db)
                em.append(rel(fd / 2, m_J_beta_derivative(ell, N, x, p)))
    return max(e2) <= 1e-6 and max(em) <= 1e-4, f"second derivative {max(e2):.1e}, dM/dbeta {max(em):.1e}"


def bethe_solver():
    worst_res, sym, decay = 0.0, True, True
    for N in range(2, 9):
        corr = {}
        for kL in (20.0, 40.0):
            st = ground_state(1.0, kL, N)
            lam = st.roots.array
            worst_res = max(worst_res, st.residual_norm)
            sym &= bool(np.allclose(lam, -lam[::-1], atol=1e-9) and np.max(np.abs(lam.real)) <= 1e-9)
            corr[kL] = max(abs(e) for e in st.corrections)
        decay &= corr[40.0] < corr[20.0]
    return worst_res <= 1e-12 and sym and decay, f"max residual {worst_res:.1e}, symmetric {sym}, decay {decay}"


def partition_audit():
    st = ground_state(1.0, 40.0, 4)
    audit = field_partition_audit(GenFieldConfig(0.7, Twist(0.1), state=st))
    return audit.surviving_fraction >= 1 - 1e-6, f"surviving share {audit.surviving_fraction:.12f}"


CRITERIA = [
    ("lemma suite", lemma_suite),
    ("Omega^Psi equivalence chain", psi_chain),
    ("Omega^J equivalence and exchange", omega_J_equivalence),
    ("string and hypergeometric closed forms", string_closed_forms),
    ("norm from the beta -> 0 limit", norm_limit),
    ("closed forms vs limit oracle", master_check),
    ("exact limits", exact_limits),
    ("derivative oracles", derivative_oracles),
    ("Bethe solver", bethe_solver),
    ("partition audit", partition_audit),
]


def _line(i, name, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} {i:2d} {name}: {detail}"


@pytest.mark.parametrize("i,name,fn", [(i, n, f) for i, (n, f) in enumerate(CRITERIA, 1)],
                         ids=[n.replace(" ", "_") for n, _ in CRITERIA])
def test_criterion(i, name, fn):
    ok, detail = fn()
    print(_line(i, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for i, (name, fn) in enumerate(CRITERIA, 1):
        ok, detail = fn()
        results.append(ok)
        print(_line(i, name, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
