"""Ground-state norm and equal-time field and density correlators.

The closed forms are finite sums of exponential-times-polynomial terms and
are evaluated with compensated summation.  ``LimitOracle`` reaches the same
numbers the long way: refined roots, brute-force generating functions,
numerical beta -> 0 limits and derivatives in alpha, divided by a
numerically computed norm.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bethe import ModelParams, StringState, string_ground_state, twist_roots
from .errors import CapExceeded, DomainError, NotConverged, RegimeWarning
from .formfactor import omega_value
from .generating import density_cores, field_cores, sum_cores

ORACLE_CAP = 5
ORACLE_MIN_KAPPA_L = 40.0
IMAG_TOL = 1e-10
# beta -> 0 estimates are trusted to this fraction of the largest sampled value
LIMIT_ROUNDOFF = 1e-11


def ground_state_norm(params: ModelParams) -> complex:
    """(-1)^N kappa L N^2."""
    N = params.N
    return complex((-1) ** N * params.kappaL * N * N)


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise ArithmeticError(f"{what} has imaginary residue {value.imag:.3e}")
    return float(value.real)


def field_correlation(x: float, params: ModelParams) -> float:
    """<Psi^dagger(x) Psi(0)> on the ground-state string."""
    if x < 0:
        raise DomainError("x must be non-negative")
    N, k = params.N, params.kappa
    terms = [math.exp(-k * x * ((N - 1) / 2 + (l - 1) * (N - l))) * (1 + 0.5 * k * x * (N - 2 * l + 1) ** 2)
             for l in range(1, N + 1)]
    return math.fsum(terms) / params.L


def _density_terms(x, params):
    N, k = params.N, params.kappa
    for l in range(1, N):
        yield l * (N - l), (N - 2 * l) ** 2


def density_correlation(x: float, params: ModelParams) -> float:
    """<j(x) j(0)> for x > 0, second derivative taken analytically."""
    if x <= 0:
        raise DomainError("density correlation is defined for x > 0")
    k = params.kappa
    terms = [math.exp(-k * x * m) * (m * m * (1 + 0.5 * k * x * s2) - m * s2)
             for m, s2 in _density_terms(x, params)]
    return k / params.L * math.fsum(terms)


def density_pre_derivative(x: float, params: ModelParams) -> float:
    """Series whose half second x-derivative is the density correlator."""
    k = params.kappa
    terms = [math.exp(-k * x * m) * (2 + k * x * s2) for m, s2 in _density_terms(x, params)]
    return math.fsum(terms) / params.kappaL


def density_contact_limit(params: ModelParams) -> float:
    """Formal x -> 0 value of the density series; not a physical contact value."""
    return params.kappa / params.L * math.fsum(m * (m - s2) for m, s2 in _density_terms(0.0, params))


# ---------------------------------------------------------------- limit path

@dataclass(frozen=True)
class OracleConfig:
    """Numerical limit settings.

    ``beta_method="contour"`` takes beta -> 0 as the mean over circles of radius
    ``beta_radius`` and half of it; ``"richardson"`` uses the steps
    ``beta_step``, ``/2``, ``/4`` on the real axis.  Either way two estimates
    are formed and must agree to ``convergence_tol``.
    """

    beta_method: str = "contour"
    beta_radius: float = 0.6
    beta_nodes: int = 24
    beta_step: float = 1e-4
    alpha_step: float = 1e-3
    alpha_method: str = "stencil"
    alpha_radius: float = 0.5
    alpha_nodes: int = 24
    convergence_tol: float = 1e-4

    def __post_init__(self):
        if self.beta_method not in ("contour", "richardson"):
            raise ValueError("beta_method is 'contour' or 'richardson'")
        if self.alpha_method not in ("stencil", "contour"):
            raise ValueError("alpha_method is 'stencil' or 'contour'")


@dataclass(frozen=True)
class OracleResult:
    x: float
    kind: str
    value: float
    imag: float
    norm: complex
    estimates: tuple[complex, complex]
    abs_err: float


def _circle(radius: float, nodes: int) -> list[complex]:
    return list(radius * np.exp(2j * np.pi * (np.arange(nodes) + 0.5) / nodes))


def _beta_groups(c: OracleConfig) -> tuple:
    if c.beta_method == "contour":
        return (_circle(c.beta_radius, c.beta_nodes), _circle(c.beta_radius / 2, c.beta_nodes))
    h = c.beta_step
    return ((h, h / 2), (h / 2, h / 4))


def _beta_limit(c: OracleConfig, groups, vals: dict, what: str) -> tuple[tuple[complex, complex], complex, float]:
    """Two beta -> 0 estimates and the finer one; NotConverged when they disagree.

    Agreement is relative, with an absolute floor at the roundoff level of the
    sampled values, so limits that decay far below the samples still pass.
    """
    if c.beta_method == "contour":
        r1, r2 = (complex(np.mean([vals[b] for b in g])) for g in groups)
    else:
        r1, r2 = (2 * vals[g[1]] - vals[g[0]] for g in groups)
    floor = LIMIT_ROUNDOFF * max(abs(v) for v in vals.values())
    if abs(r1 - r2) > c.convergence_tol * abs(r2) + floor:
        raise NotConverged(f"{what}: beta -> 0 estimates {r1} and {r2} disagree")
    return (r1, r2), r2, abs(r1 - r2) + floor


def _omega_norm_values(state: StringState, betas) -> dict:
    u = state.roots.array
    return {b: omega_value(twist_roots(state, b).array, u, b, state.params.eta, "J") for b in betas}


def numerical_norm(params: ModelParams, config: OracleConfig = OracleConfig(beta_method="richardson"),
                   state: StringState | None = None) -> complex:
    """beta -> 0 limit of Omega^J(mu(beta), lambda | beta) on refined roots."""
    state = state if state is not None else string_ground_state(params)
    groups = _beta_groups(config)
    vals = _omega_norm_values(state, {b for g in groups for b in g})
    return _beta_limit(config, groups, vals, "norm")[1]


class LimitOracle:
    """End-to-end generating-function path for one parameter set.

    The x-independent partition cores are built once per (beta, alpha) node,
    so evaluating many x-points costs little beyond the first.  Near beta = 0
    single partition terms grow like (L/beta)^N and cancel, which is why the
    default limit samples a circle of radius O(1) instead of small real steps.
    """

    def __init__(self, params: ModelParams, kind: str, config: OracleConfig = OracleConfig(),
                 state: StringState | None = None):
        if kind not in ("field", "density"):
            raise ValueError("kind is 'field' or 'density'")
        if params.N > ORACLE_CAP:
            raise CapExceeded(f"limit oracle capped at N <= {ORACLE_CAP}")
        if params.N < 1:
            raise DomainError("limit oracle needs N >= 1")
        if params.kappaL < ORACLE_MIN_KAPPA_L:
            warnings.warn(f"kappa*L = {params.kappaL} is below {ORACLE_MIN_KAPPA_L}; "
                          "string corrections are no longer negligible", RegimeWarning, stacklevel=2)
        self.params = params
        self.kind = kind
        self.config = config
        self.state = state if state is not None else string_ground_state(params)
        self.groups = _beta_groups(config)
        betas = sorted({b for g in self.groups for b in g}, key=lambda z: (z.real, z.imag))
        self._cores = {b: self._build(b) for b in betas}
        self.norm = self._norm()

    def _alpha_nodes(self):
        c = self.config
        if c.alpha_method == "stencil":
            a = c.alpha_step
            alphas = np.array([-2 * a, -a, 0.0, a, 2 * a])
            w = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12 * a * a)
            return alphas.astype(complex), w.astype(complex)
        # f''(0) = 2/(2 pi i) * contour integral f(z)/z^3, trapezoid on |z| = r
        z = np.array(_circle(c.alpha_radius, c.alpha_nodes))
        return z, 2.0 / (c.alpha_nodes * z * z)

    def _build(self, beta):
        v = twist_roots(self.state, beta)
        u = self.state.roots
        if self.kind == "field":
            return [(1.0 + 0j, field_cores(v, u, self.params, beta))]
        alphas, weights = self._alpha_nodes()
        return [(w, density_cores(v, u, self.params, beta, a)) for a, w in zip(alphas, weights)]

    def _norm(self) -> complex:
        vals = _omega_norm_values(self.state, self._cores)
        return _beta_limit(self.config, self.groups, vals, "norm")[1]

    def _at_beta(self, beta, x) -> complex:
        if self.kind == "field":
            return sum_cores(self._cores[beta][0][1], x)
        # half of d^2/dx^2 d^2/dalpha^2 at alpha = 0
        return 0.5 * sum(w * sum_cores(cores, x, x_order=2) for w, cores in self._cores[beta])

    def evaluate(self, x: float) -> OracleResult:
        # every core is entire in x, so x = 0 is reached as a plain limit
        if not 0 <= x < self.params.L or (x == 0 and self.kind == "density"):
            raise DomainError("x must lie in [0, L) for the field and in (0, L) for the density")
        vals = {b: self._at_beta(b, x) for b in self._cores}
        est, lim, err = _beta_limit(self.config, self.groups, vals, f"{self.kind} correlation at x={x}")
        val = lim / self.norm
        return OracleResult(x, self.kind, float(val.real), float(val.imag), self.norm, est,
                            err / abs(self.norm))


def correlation_limit_oracle(x: float, params: ModelParams, kind: str,
                             config: OracleConfig = OracleConfig()) -> float:
    """Correlator at x from the brute-force generating function (real part)."""
    return LimitOracle(params, kind, config).evaluate(x).value


# ------------------------------------------------------------------- curves

@dataclass
class CorrelationCurve:
    params: ModelParams
    kind: str
    method: str
    samples: list[tuple[float, float]]
    oracle: list[float] | None = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        xs = [s[0] for s in self.samples]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("curve x values must be strictly increasing")
        if xs and (xs[0] < 0 or xs[-1] >= self.params.L):
            raise DomainError("curve x values must lie in [0, L)")

    @classmethod
    def closed_form(cls, params: ModelParams, kind: str, xs) -> "CorrelationCurve":
        fn = field_correlation if kind == "field" else density_correlation
        return cls(params, kind, "closed_form", [(float(x), fn(float(x), params)) for x in xs])

    def attach_oracle(self, values) -> None:
        self.oracle = [float(v) for v in values]

    def rows(self) -> list[list[str]]:
        head = ["x", "value"] + (["oracle_value", "rel_diff"] if self.oracle is not None else [])
        out = [head]
        for i, (x, y) in enumerate(self.samples):
            row = [_fmt(x), _fmt(y)]
            if self.oracle is not None:
                o = self.oracle[i]
                row += [_fmt(o), _fmt(abs(o - y) / abs(y) if y != 0 else abs(o - y))]
            out.append(row)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\r\n").writerows(self.rows())
        return buf.getvalue()

    def metadata(self) -> dict:
        return {"kappa": self.params.kappa, "L": self.params.L, "N": self.params.N,
                "kind": self.kind, "method": self.method, "version": __version__,
                "tolerances": self.tolerances}

    def to_json(self) -> str:
        rows = self.rows()
        body = [dict(zip(rows[0], (float(c) for c in r))) for r in rows[1:]]
        return json.dumps({"metadata": self.metadata(), "samples": body}, indent=2)


def _fmt(v: float) -> str:
    return f"{v + 0.0:.16e}"
