import json

import pytest

from bethecorr import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_roots_csv(capsys):
    code, out, _ = run(capsys, "roots", "--N", "3", "--L", "40")
    assert code == 0
    lines = out.split("\r\n")
    assert lines[0] == "index,re,im,eps,residual"
    middle = lines[2].split(",")
    assert abs(float(middle[1])) < 1e-15 and abs(float(middle[2])) < 1e-15


def test_roots_unrefined_residual_is_infinite(capsys):
    code, out, _ = run(capsys, "roots", "--N", "2", "--no-refine", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["metadata"]["refined"] is False
    assert all(r["residual"] == "inf" for r in doc["rows"])


def test_corr_field_starts_at_density(capsys):
    code, out, _ = run(capsys, "corr", "--N", "2", "--L", "40", "--x-count", "3")
    assert code == 0
    first = out.split("\r\n")[1].split(",")
    assert float(first[0]) == 0 and float(first[1]) == pytest.approx(2 / 40, rel=1e-15)


def test_corr_single_particle_density_is_zero(capsys):
    code, out, _ = run(capsys, "corr", "--N", "1", "--kind", "density", "--x-count", "4")
    assert code == 0
    assert all(float(row.split(",")[1]) == 0 for row in out.split("\r\n")[1:] if row)


def test_corr_with_oracle(capsys):
    code, out, _ = run(capsys, "corr", "--N", "2", "--x-start", "0.5", "--x-stop", "2", "--x-count", "2",
                       "--oracle", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert all(r["rel_diff"] < 1e-5 for r in doc["samples"])
    assert doc["metadata"]["tolerances"]["oracle"]["beta_method"] == "contour"


def test_oracle_cap_exit_code(capsys):
    code, _, err = run(capsys, "corr", "--N", "6", "--oracle")
    assert code == 4 and "capability" in err


def test_bad_parameters_exit_code(capsys):
    code, _, _ = run(capsys, "corr", "--kappa", "-1")
    assert code == 2


def test_solver_failure_exit_code(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tolerances": {"solver_tol": 1e-40, "max_iter": 3}}))
    code, _, err = run(capsys, "roots", "--N", "4", "--config", str(cfg))
    assert code == 3 and "solver" in err
    cfg.write_text(json.dumps({"tolerances": {"max_iter": 0}}))
    code, _, _ = run(capsys, "roots", "--N", "4", "--config", str(cfg))
    assert code == 2


def test_verify_is_deterministic(capsys):
    first = run(capsys, "verify", "kernel", "--seed", "3", "--trials", "20")
    second = run(capsys, "verify", "kernel", "--seed", "3", "--trials", "20")
    assert first == second
    assert first[0] == 0 and "ALL PASS" in first[1]


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "stringforms", "--trials", "5", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["results"][0]["suite"] == "stringforms"


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": 4, "L": 20.0, "x_count": 2}))
    # file beats defaults
    _, out, _ = run(capsys, "corr", "--config", str(cfg))
    assert float(out.split("\r\n")[1].split(",")[1]) == pytest.approx(4 / 20)
    # flag beats file
    _, out, _ = run(capsys, "corr", "--config", str(cfg), "--N", "3")
    assert float(out.split("\r\n")[1].split(",")[1]) == pytest.approx(3 / 20)


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"temperature": 3}))
    code, _, err = run(capsys, "roots", "--config", str(cfg))
    assert code == 2 and "temperature" in err


def test_out_file(capsys, tmp_path):
    target = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "corr", "--x-count", "2", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_bytes().startswith(b"x,value\r\n")


def test_thread_count_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("BETHECORR_THREADS", "3")
    assert cli.worker_count() == 3
    serial = run(capsys, "corr", "--x-count", "5")
    monkeypatch.setenv("BETHECORR_THREADS", "1")
    assert run(capsys, "corr", "--x-count", "5") == serial
    monkeypatch.setenv("BETHECORR_THREADS", "many")
    code, _, _ = run(capsys, "corr")
    assert code == 2


def test_ffactor(capsys):
    code, out, _ = run(capsys, "ffactor", "--N", "1", "--kind", "field", "--x", "0.3", "--L", "10")
    assert code == 0
    re_part = float(out.split("\r\n")[1].split(",")[1])
    assert re_part == pytest.approx(1.0)
    code, _, _ = run(capsys, "ffactor", "--N", "2", "--kind", "density", "--branch", "1")
    assert code == 0


def _genfun_total(capsys, mode):
    code, out, _ = run(capsys, "genfun", "--N", "3", "--kind", "density", "--mode", mode,
                       "--alpha", "0.2", "--beta", "0.05", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    return complex(rows[0]["re"], rows[0]["im"]), [r["part"] for r in rows]


def test_genfun_modes_agree(capsys):
    string, parts = _genfun_total(capsys, "string")
    brute, _ = _genfun_total(capsys, "bruteforce")
    assert parts == ["total", "bulk", "boundary"]
    assert abs(string - brute) <= 1e-6 * abs(string)


def test_genfun_bruteforce_cap(capsys):
    code, _, _ = run(capsys, "genfun", "--N", "8", "--mode", "bruteforce")
    assert code == 4
