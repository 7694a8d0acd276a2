import json
import math

import pytest

from bethecorr.bethe import ModelParams
from bethecorr.correlations import (CorrelationCurve, LimitOracle, OracleConfig, density_contact_limit,
                                    density_correlation, density_pre_derivative, field_correlation,
                                    ground_state_norm, numerical_norm)
from bethecorr.errors import CapExceeded, DomainError, RegimeWarning

from conftest import rel


def test_norm_sign_and_size():
    assert ground_state_norm(ModelParams(1.0, 40.0, 3)) == -360
    assert ground_state_norm(ModelParams(0.5, 40.0, 2)) == 80


@pytest.mark.parametrize("N", [1, 2, 7, 50])
def test_field_at_origin_is_density(N):
    p = ModelParams(1.0, 40.0, N)
    assert field_correlation(0.0, p) == pytest.approx(N / p.L, rel=1e-14)


def test_field_closed_form_example():
    p = ModelParams(1.0, 100.0, 3)
    # middle term is e^{-kappa x (l-1)(N-l)} = e^{-1}, outer terms 1 + 2
    expected = math.exp(-1) / 100 * (6 + math.exp(-1))
    assert field_correlation(1.0, p) == pytest.approx(expected, rel=1e-14)


def test_two_particle_density():
    p = ModelParams(1.5, 40.0, 2)
    for x in (0.1, 0.9, 4.0):
        assert density_correlation(x, p) == pytest.approx(p.kappa / p.L * math.exp(-p.kappa * x), rel=1e-14)


def test_single_particle_correlators():
    p = ModelParams(2.0, 30.0, 1)
    for x in (0.1, 1.0, 10.0):
        assert field_correlation(x, p) == pytest.approx(1 / p.L)
        assert density_correlation(x, p) == 0


def test_domains():
    p = ModelParams(1.0, 40.0, 3)
    with pytest.raises(DomainError):
        field_correlation(-0.1, p)
    with pytest.raises(DomainError):
        density_correlation(0.0, p)


@pytest.mark.parametrize("N", [2, 3, 6])
def test_density_is_half_second_derivative(N):
    p = ModelParams(1.3, 40.0, N)
    h = 1e-4 / p.kappa
    for x in (0.2, 1.0, 2.5):
        fd = (density_pre_derivative(x + h, p) - 2 * density_pre_derivative(x, p)
              + density_pre_derivative(x - h, p)) / h ** 2
        assert rel(0.5 * fd, density_correlation(x, p)) < 1e-6


def test_density_decays_towards_contact_value():
    p = ModelParams(1.0, 40.0, 3)
    assert density_correlation(1e-9, p) == pytest.approx(density_contact_limit(p), rel=1e-6)
    assert abs(density_correlation(20.0, p)) < 1e-10


def test_numerical_norm_matches_closed_form():
    for N in (2, 3, 4):
        p = ModelParams(1.0, 40.0, N)
        assert rel(numerical_norm(p), ground_state_norm(p)) < 1e-5


class TestLimitOracle:
    def test_field(self):
        p = ModelParams(1.0, 40.0, 3)
        oracle = LimitOracle(p, "field")
        for x in (0.0, 0.7, 3.0):
            res = oracle.evaluate(x)
            assert rel(res.value, field_correlation(x, p)) < 1e-5
            assert abs(res.imag) < 1e-8

    def test_density(self):
        p = ModelParams(1.0, 40.0, 2)
        oracle = LimitOracle(p, "density")
        for x in (0.3, 1.5):
            assert rel(oracle.evaluate(x).value, density_correlation(x, p)) < 1e-4
        with pytest.raises(DomainError):
            oracle.evaluate(0.0)

    def test_decayed_tail_is_accurate_in_absolute_terms(self):
        p = ModelParams(1.0, 40.0, 4)
        oracle = LimitOracle(p, "density")
        for x in (10.0, 20.0):
            res = oracle.evaluate(x)
            assert abs(res.value - density_correlation(x, p)) <= res.abs_err
            assert res.abs_err < 1e-12

    def test_richardson_limit(self):
        p = ModelParams(1.0, 40.0, 2)
        oracle = LimitOracle(p, "field", OracleConfig(beta_method="richardson", beta_step=1e-3))
        assert rel(oracle.evaluate(0.7).value, field_correlation(0.7, p)) < 1e-4

    def test_cap(self):
        with pytest.raises(CapExceeded):
            LimitOracle(ModelParams(1.0, 40.0, 6), "field")

    def test_small_kappa_L_warns(self):
        with pytest.warns(RegimeWarning):
            LimitOracle(ModelParams(1.0, 20.0, 2), "field")

    def test_bad_settings(self):
        with pytest.raises(ValueError):
            OracleConfig(beta_method="euler")
        with pytest.raises(ValueError):
            LimitOracle(ModelParams(1.0, 40.0, 2), "current")


class TestCurve:
    def test_csv_layout(self):
        p = ModelParams(1.0, 40.0, 2)
        curve = CorrelationCurve.closed_form(p, "field", [0.0, 1.0, 2.0])
        text = curve.to_csv()
        lines = text.split("\r\n")
        assert lines[0] == "x,value"
        assert lines[1] == f"{0.0:.16e},{0.05:.16e}"
        assert text.endswith("\r\n")

    def test_oracle_columns_and_json(self):
        p = ModelParams(1.0, 40.0, 2)
        curve = CorrelationCurve.closed_form(p, "density", [0.5, 1.0])
        curve.attach_oracle([y * (1 + 1e-9) for _, y in curve.samples])
        assert curve.rows()[0] == ["x", "value", "oracle_value", "rel_diff"]
        doc = json.loads(curve.to_json())
        assert doc["metadata"]["kind"] == "density"
        assert doc["samples"][1]["rel_diff"] == pytest.approx(1e-9, rel=1e-3)

    def test_no_negative_zero(self):
        curve = CorrelationCurve.closed_form(ModelParams(1.0, 40.0, 1), "density", [1.0])
        assert "-0.0" not in curve.to_csv()

    def test_grid_must_increase(self):
        with pytest.raises(DomainError):
            CorrelationCurve(ModelParams(1.0, 40.0, 2), "field", "closed_form", [(1.0, 0.0), (0.5, 0.0)])
