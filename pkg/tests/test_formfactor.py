import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bethecorr.bethe import ModelParams
from bethecorr.errors import CardinalityMismatch, CoincidingArguments, NotOnShell
from bethecorr.formfactor import (OmegaArgs, branch_free_residual, density_form_factor,
                                  field_form_factor, omega_J_det, omega_J_rec, omega_Psi_det,
                                  omega_Psi_rec, omega_value)
from bethecorr.kernel import RapiditySet
from bethecorr.sampling import random_beta, random_pair
from bethecorr.stringforms import omega_J_string, omega_Psi_string, string_set

from conftest import ground_state, rel

ETA = 1j


def _rs(a):
    return RapiditySet(tuple(complex(z) for z in a))


def test_empty_and_single():
    assert omega_value([], [], 0.3, ETA, "J") == 1
    assert omega_value([], [0.2 + 0.1j], 0.3, ETA, "Psi") == pytest.approx(1)
    v, u, b = 0.4 - 0.1j, -0.2 + 0.3j, 0.25
    assert abs(omega_value([v], [u], b, ETA, "J")) > 0
    # Omega^J carries a factor that vanishes at beta = 0
    assert omega_value([v], [u], 0.0, ETA, "J") == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("n", range(1, 7))
def test_det_and_recursion_agree(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        v, u = random_pair(rng, n, n)
        b = random_beta(rng)
        args = OmegaArgs(_rs(v), _rs(u), b, "J")
        assert rel(omega_J_det(args), omega_J_rec(args)) < 1e-9
        vp, up = random_pair(rng, n - 1, n)
        pargs = OmegaArgs(_rs(vp) if n > 1 else RapiditySet(()), _rs(up), b, "Psi")
        assert rel(omega_Psi_det(pargs), omega_Psi_rec(pargs)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_exchange_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    v, u = random_pair(rng, n, n)
    b = random_beta(rng)
    assert rel(omega_value(v, u, b, ETA, "J"), np.exp(b * n) * omega_value(u, v, -b, ETA, "J")) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10**6))
def test_permutation_invariance(n, seed):
    rng = np.random.default_rng(seed)
    v, u = random_pair(rng, n, n)
    b = random_beta(rng)
    p, q = rng.permutation(n), rng.permutation(n)
    assert rel(omega_value(v, u, b, ETA, "J"), omega_value(v[p], u[q], b, ETA, "J")) < 1e-10


def test_cardinality_checks():
    with pytest.raises(CardinalityMismatch):
        OmegaArgs(_rs([0.1]), _rs([0.2, 0.5]), 0.1, "J")
    with pytest.raises(CardinalityMismatch):
        OmegaArgs(_rs([0.1, 0.7]), _rs([0.2, 0.5]), 0.1, "Psi")
    with pytest.raises(ValueError):
        OmegaArgs(_rs([0.1]), _rs([0.2]), 0.1, "X")


def test_pole_raises():
    with pytest.raises(CoincidingArguments):
        omega_value([0.3 + 0j], [0.3 + 0j], 0.1, ETA, "J")


@pytest.mark.parametrize("n", [2, 4, 7, 9])
@pytest.mark.parametrize("kind", ["J", "Psi"])
def test_exact_string_matches_closed_form(n, kind):
    u = string_set(0.1 - 0.05j, n, ETA)
    v = np.array([complex(2.5 + 0.3 * j, 0.4 * j - 1) for j in range(n if kind == "J" else n - 1)])
    closed = (omega_J_string if kind == "J" else omega_Psi_string)(v, u, 0.3 + 0.1j, ETA)
    assert rel(omega_value(v, u, 0.3 + 0.1j, ETA, kind), closed) < 1e-9


def test_near_string_is_continuous():
    u = string_set(0.0, 4, ETA)
    v = np.array([2.1 + 0.2j, -1.7 + 0.4j, 0.9 - 2.0j, 3.0 + 1.0j])
    exact = omega_value(v, u, 0.2, ETA, "J")
    nudged = u + np.array([0, 1e-9, -1e-9, 2e-9])
    assert rel(omega_value(v, nudged, 0.2, ETA, "J"), exact) < 1e-6


def test_branch_free_residual():
    assert branch_free_residual([2j * np.pi, -4j * np.pi + 1e-3]) == pytest.approx(1e-3)
    assert branch_free_residual([]) == 0


def test_field_form_factor_single_particle():
    p = ModelParams(1.0, 10.0, 1)
    u = RapiditySet((0j,))
    val = field_form_factor(RapiditySet(()), u, 0.7, p)
    assert val == pytest.approx(np.sqrt(p.kappa))


def test_form_factors_need_on_shell_states():
    p = ModelParams(1.0, 10.0, 2)
    off = _rs([0.3, -0.1])
    with pytest.raises(NotOnShell):
        density_form_factor(off, off, 0.5, p)


def test_density_form_factor_diagonal_vanishes():
    st = ground_state(1.0, 40.0, 3)
    assert density_form_factor(st.roots, st.roots, 0.4, st.params) == 0


def test_density_form_factor_to_boosted_state():
    st = ground_state(1.0, 40.0, 2)
    p = st.params
    boosted = st.roots.shifted(2 * np.pi / p.L)
    val = density_form_factor(boosted, st.roots, 0.3, p)
    assert np.isfinite(val) and abs(val) > 0
    # x only enters through the phase
    other = density_form_factor(boosted, st.roots, 1.3, p)
    assert abs(other) == pytest.approx(abs(val), rel=1e-10)
