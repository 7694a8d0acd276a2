"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 solver failure, 4 capability error.  Settings come from flags, then from
an optional JSON config file, then from built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .bethe import ModelParams, StringState, Twist, bethe_residual, string_ground_state
from .correlations import (ORACLE_CAP, CorrelationCurve, LimitOracle, OracleConfig,
                           density_correlation, field_correlation)
from .errors import (BetheCorrError, CapExceeded, IllConditioned, MaxIterations, NotConverged)
from .formfactor import REG_THRESHOLD, ON_SHELL_TOL, density_form_factor, field_form_factor
from .generating import (BETA_SWITCH, BRUTEFORCE_CAP, GenFieldConfig, gen_density_bruteforce,
                         gen_density_string, gen_field_bruteforce, gen_field_string)
from .kernel import ENUMERATION_CAP, RapiditySet
from .verify import SUITES, TOLERANCES, format_report, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_SOLVER, EXIT_CAPABILITY = 0, 1, 2, 3, 4

DEFAULTS = {
    "kappa": 1.0, "L": 40.0, "N": 3, "kind": "field", "refine": True,
    "x_start": None, "x_stop": None, "x_count": 10, "oracle": False,
    "seed": 0, "trials": 100, "suite": "all", "format": "csv", "out": None,
    "x": 1.0, "beta": 0.1, "alpha": 0.0, "mode": "string", "branch": 1,
    "tolerances": {},
}


class ConfigError(Exception):
    pass


def worker_count() -> int:
    raw = os.environ.get("BETHECORR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"BETHECORR_THREADS must be an integer, got {raw!r}")


def _fmt(v: float) -> str:
    return f"{v + 0.0:.16e}"


# ------------------------------------------------------------ configuration

def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def resolve(args: argparse.Namespace) -> dict:
    """Flags over config file over defaults."""
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(getattr(args, "config", None)))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _params(cfg: dict) -> ModelParams:
    try:
        return ModelParams(float(cfg["kappa"]), float(cfg["L"]), int(cfg["N"]))
    except (BetheCorrError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _solver_kwargs(cfg: dict) -> dict:
    tol = cfg["tolerances"]
    out = {}
    if "solver_tol" in tol:
        out["tol"] = float(tol["solver_tol"])
    if "max_iter" in tol:
        out["max_iter"] = int(tol["max_iter"])
    return out


def _oracle_config(cfg: dict) -> OracleConfig:
    try:
        return OracleConfig(**cfg["tolerances"].get("oracle", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad oracle settings: {exc}")


def _tolerance_block(cfg: dict) -> dict:
    return {
        "enumeration_cap": ENUMERATION_CAP,
        "bruteforce_cap": BRUTEFORCE_CAP,
        "oracle_cap": ORACLE_CAP,
        "reg_threshold": REG_THRESHOLD,
        "on_shell_tol": ON_SHELL_TOL,
        "beta_switch": BETA_SWITCH,
        "solver": {"tol": 1e-12, "max_iter": 60, **_solver_kwargs(cfg)},
        "oracle": vars(_oracle_config(cfg)) if cfg["oracle"] else None,
    }


def _emit(text: str, cfg: dict) -> None:
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_doc(meta: dict, header: list[str], rows: list[list]) -> str:
    return json.dumps({"metadata": meta, "rows": [dict(zip(header, r)) for r in rows]}, indent=2) + "\n"


# ------------------------------------------------------------------ commands

def cmd_roots(cfg: dict) -> int:
    params = _params(cfg)
    if params.N < 1:
        raise ConfigError("roots needs N >= 1")
    state = string_ground_state(params, refine=bool(cfg["refine"]), **_solver_kwargs(cfg))
    res = _root_residuals(state)
    header = ["index", "re", "im", "eps", "residual"]
    rows = [[j + 1, lam.real, lam.imag, eps, r]
            for j, (lam, eps, r) in enumerate(zip(state.roots, state.corrections, res))]
    meta = {"kappa": params.kappa, "L": params.L, "N": params.N, "refined": state.refined,
            "iterations": state.iterations, "version": __version__, "tolerances": _tolerance_block(cfg)}
    if cfg["format"] == "json":
        _emit(_json_doc(meta, header, [[c if not isinstance(c, float) or math.isfinite(c) else str(c)
                                         for c in r] for r in rows]), cfg)
    else:
        _emit(_table(header, [[str(r[0])] + [_fmt(c) for c in r[1:]] for r in rows]), cfg)
    return EXIT_OK


def _root_residuals(state: StringState) -> list[float]:
    if not state.refined:
        return [math.inf] * state.N
    return [abs(c) for c in bethe_residual(state)]


def _grid(cfg: dict, params: ModelParams) -> np.ndarray:
    count = int(cfg["x_count"])
    stop = cfg["x_stop"] if cfg["x_stop"] is not None else params.L / 2
    if count < 1:
        raise ConfigError("x-count must be positive")
    if not stop < params.L:
        raise ConfigError("x-stop must be below L")
    start = cfg["x_start"]
    if start is None:
        start = 0.0 if cfg["kind"] == "field" else stop / count
    if start < 0 or (cfg["kind"] == "density" and start <= 0):
        raise ConfigError("x-start must be >= 0 (field) or > 0 (density)")
    if count > 1 and not start < stop:
        raise ConfigError("x-start must be below x-stop")
    return np.linspace(float(start), float(stop), count)


def cmd_corr(cfg: dict) -> int:
    params = _params(cfg)
    kind = cfg["kind"]
    if kind not in ("field", "density"):
        raise ConfigError("kind must be field or density")
    xs = _grid(cfg, params)
    fn = field_correlation if kind == "field" else density_correlation
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        values = list(pool.map(lambda x: fn(float(x), params), xs))
    curve = CorrelationCurve(params, kind, "closed_form", list(zip(map(float, xs), values)))
    curve.tolerances = _tolerance_block(cfg)
    if cfg["oracle"]:
        if params.N > ORACLE_CAP:
            raise CapExceeded(f"--oracle supports N <= {ORACLE_CAP}")
        oracle = LimitOracle(params, kind, _oracle_config(cfg))
        with ThreadPoolExecutor(max_workers=worker_count()) as pool:
            curve.attach_oracle(list(pool.map(lambda x: oracle.evaluate(float(x)).value, xs)))
    _emit(curve.to_json() + "\n" if cfg["format"] == "json" else curve.to_csv(), cfg)
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    suite = cfg["suite"]
    if suite not in SUITES + ("all",):
        raise ConfigError(f"suite must be one of {SUITES + ('all',)}")
    seed, trials = int(cfg["seed"]), int(cfg["trials"])
    if trials < 1:
        raise ConfigError("trials must be positive")
    results = run_suite(suite, seed, trials)
    if cfg["format"] == "json":
        doc = {"metadata": {"suite": suite, "seed": seed, "trials": trials, "version": __version__,
                            "tolerances": TOLERANCES},
               "results": [{"suite": n, "properties": [vars(p) for p in props]} for n, props in results]}
        _emit(json.dumps(doc, indent=2) + "\n", cfg)
    else:
        _emit(format_report(results, seed, trials), cfg)
    ok = all(p.passed for _, props in results for p in props)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_ffactor(cfg: dict) -> int:
    """Form factors between ground-state strings.

    field: <N-1 ground state| Psi(x) |N ground state>.
    density: <N ground state boosted by 2 pi branch / L| j(x) |N ground state>.
    """
    params = _params(cfg)
    if params.N < 1:
        raise ConfigError("ffactor needs N >= 1")
    x = float(cfg["x"])
    kw = _solver_kwargs(cfg)
    u = string_ground_state(params, **kw)
    if cfg["kind"] == "field":
        if params.N == 1:
            v = RapiditySet((), "lambda")
        else:
            v = string_ground_state(ModelParams(params.kappa, params.L, params.N - 1), **kw).roots
        val = field_form_factor(v, u.roots, x, params)
    elif cfg["kind"] == "density":
        shift = 2 * math.pi * int(cfg["branch"]) / params.L
        val = density_form_factor(u.roots.shifted(shift), u.roots, x, params)
    else:
        raise ConfigError("kind must be field or density")
    header = ["x", "re", "im"]
    row = [x, val.real, val.imag]
    meta = {"kappa": params.kappa, "L": params.L, "N": params.N, "kind": cfg["kind"],
            "branch": cfg["branch"], "version": __version__, "tolerances": _tolerance_block(cfg)}
    if cfg["format"] == "json":
        _emit(_json_doc(meta, header, [row]), cfg)
    else:
        _emit(_table(header, [[_fmt(c) for c in row]]), cfg)
    return EXIT_OK


def cmd_genfun(cfg: dict) -> int:
    params = _params(cfg)
    if params.N < 1:
        raise ConfigError("genfun needs N >= 1")
    mode, kind = cfg["mode"], cfg["kind"]
    if mode not in ("string", "bruteforce"):
        raise ConfigError("mode must be string or bruteforce")
    if mode == "bruteforce" and params.N > BRUTEFORCE_CAP:
        raise CapExceeded(f"brute-force mode supports N <= {BRUTEFORCE_CAP}")
    x, beta, alpha = float(cfg["x"]), complex(cfg["beta"]), complex(cfg["alpha"])
    state = string_ground_state(params, **_solver_kwargs(cfg))
    tw = Twist(beta)
    extra = {}
    if kind == "field":
        val = (gen_field_string(x, state, tw) if mode == "string"
               else gen_field_bruteforce(GenFieldConfig(x, tw, state=state)))
    elif kind == "density":
        if mode == "string":
            res = gen_density_string(x, alpha, state, tw)
            val, extra = res.value, {"bulk": res.bulk, "boundary": res.boundary}
        else:
            val = gen_density_bruteforce(x, alpha, state, tw)
    else:
        raise ConfigError("kind must be field or density")
    header = ["part", "re", "im"]
    rows = [["total", val.real, val.imag]] + [[k, z.real, z.imag] for k, z in extra.items()]
    meta = {"kappa": params.kappa, "L": params.L, "N": params.N, "kind": kind, "mode": mode,
            "x": x, "beta": str(beta), "alpha": str(alpha), "version": __version__,
            "tolerances": _tolerance_block(cfg)}
    if cfg["format"] == "json":
        _emit(_json_doc(meta, header, rows), cfg)
    else:
        _emit(_table(header, [[r[0], _fmt(r[1]), _fmt(r[2])] for r in rows]), cfg)
    return EXIT_OK


# -------------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--N", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--refine", action=argparse.BooleanOptionalAction, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bethecorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bethecorr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", help="ground-state string roots")
    _common(p)

    p = sub.add_parser("corr", help="correlation curve on an x grid")
    _common(p)
    p.add_argument("--kind", choices=("field", "density"))
    p.add_argument("--x-start", dest="x_start", type=float)
    p.add_argument("--x-stop", dest="x_stop", type=float)
    p.add_argument("--x-count", dest="x_count", type=int)
    p.add_argument("--oracle", action="store_true", default=None)

    p = sub.add_parser("verify", help="run a property suite")
    _common(p)
    p.add_argument("suite", nargs="?", choices=SUITES + ("all",))
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)

    p = sub.add_parser("ffactor", help="form factor between ground-state strings")
    _common(p)
    p.add_argument("--kind", choices=("field", "density"))
    p.add_argument("--x", type=float)
    p.add_argument("--branch", type=int)

    p = sub.add_parser("genfun", help="generating function value")
    _common(p)
    p.add_argument("--kind", choices=("field", "density"))
    p.add_argument("--mode", choices=("string", "bruteforce"))
    p.add_argument("--x", type=float)
    p.add_argument("--beta", type=complex)
    p.add_argument("--alpha", type=complex)
    return parser


COMMANDS = {"roots": cmd_roots, "corr": cmd_corr, "verify": cmd_verify,
            "ffactor": cmd_ffactor, "genfun": cmd_genfun}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (MaxIterations, IllConditioned, NotConverged) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except BetheCorrError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
