"""Quantitative checks of the decay, integrability, and inequality claims.

Each check compares a measured quantity against a value recomputed from the
parameter tuple at run time and reports pass/fail at a pinned tolerance.
Claims that hold only up to unspecified constants (the two-sided "comparable
to" statements and the norm inequalities) are tested as two-sided ratio
boundedness over a deterministic battery of source profiles and a spatial
scale family, never as equalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import ParameterError
from .params import (
    Parameters,
    Regime,
    classify_regime,
    exponents,
    integrability_interval,
    validate,
)
from .potential import PotentialConfig, riesz_eval, weighted_source, wolff_eval
from .radial import (
    RadialFunction,
    RadialGrid,
    _laggauss,
    is_infinite,
    lp_norm,
)
from .solver import Ansatz, SolveResult, make_ansatz

EXPONENT_RTOL = 0.05
LOG_POWER_ATOL = 0.3
LOG_LIMIT_RTOL = 0.02
RIESZ_IDENTITY_RTOL = 1e-3
RATIO_WINDOW = 1e3


@dataclass(frozen=True)
class CheckEntry:
    name: str
    paper_ref: str  # human-readable tag of the mathematical statement checked
    status: str  # "pass" | "fail" | "skipped"
    measured: Any
    expected: Any
    tolerance: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "paper_ref": self.paper_ref,
            "status": self.status,
            "measured": _jsonable(self.measured),
            "expected": _jsonable(self.expected),
            "tolerance": self.tolerance,
        }
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        return out


def _jsonable(value):
    if is_infinite(value):
        return "Infinite"
    if isinstance(value, (np.floating, np.integer)):
        return float(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass(frozen=True)
class VerificationReport:
    params: Parameters
    checks: list[CheckEntry]

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "checks": [c.to_dict() for c in self.checks],
        }


def _entry(name, ref, ok, measured, expected, tol, **details) -> CheckEntry:
    return CheckEntry(
        name=name,
        paper_ref=ref,
        status="pass" if ok else "fail",
        measured=measured,
        expected=expected,
        tolerance=tol,
        details=details,
    )


def _skipped(name, ref, reason) -> CheckEntry:
    return CheckEntry(
        name=name,
        paper_ref=ref,
        status="skipped",
        measured=None,
        expected=None,
        tolerance=0.0,
        details={"reason": reason},
    )


# -- fast decay rates ---------------------------------------------------------


def check_fast_rates(result: SolveResult, params: Parameters) -> list[CheckEntry]:
    """Fitted tail exponents of a converged solution against the predicted rates."""
    ref = "fast decay-rate trichotomy"
    if not result.converged:
        return [
            _skipped("fast_rate_u", ref, "solution not converged"),
            _skipped("fast_rate_v", ref, "solution not converged"),
            _skipped("v_log_power", ref, "solution not converged"),
        ]
    report = result.report
    out = []
    m, e = result.rate_u.exponent, report.predicted_u_exponent
    out.append(_entry("fast_rate_u", ref, abs(m / e - 1) <= EXPONENT_RTOL, m, e, EXPONENT_RTOL))
    m, e = result.rate_v.exponent, report.predicted_v_exponent
    out.append(_entry("fast_rate_v", ref, abs(m / e - 1) <= EXPONENT_RTOL, m, e, EXPONENT_RTOL))
    m, e = result.rate_v.log_power, report.v_log_power
    out.append(_entry("v_log_power", ref, abs(m - e) <= LOG_POWER_ATOL, m, e, LOG_POWER_ATOL))
    return out


# -- optimal integrability ----------------------------------------------------


def check_integrability(result: SolveResult, params: Parameters) -> list[CheckEntry]:
    """Norm finiteness strictly inside the optimal interval, divergence at endpoints."""
    ref = "optimal integrability interval"
    if not result.converged:
        return [_skipped("integrability", ref, "solution not converged")]
    (u_low, _), (v_low, _) = integrability_interval(params)
    n = params.n
    out = []
    for tag, f, low in (("u", result.u, u_low), ("v", result.v, v_low)):
        inside = lp_norm(f, low * 1.1, 0.0, n=n)
        far = lp_norm(f, low * 2.0, 0.0, n=n)
        at_end = lp_norm(f, low, 0.0, n=n)
        out.append(
            _entry(
                f"{tag}_norm_inside_interval",
                ref,
                not is_infinite(inside) and not is_infinite(far),
                [inside, far],
                "finite",
                0.0,
                exponents=[low * 1.1, low * 2.0],
            )
        )
        out.append(
            _entry(
                f"{tag}_norm_at_endpoint",
                ref,
                is_infinite(at_end),
                at_end,
                "Infinite",
                0.0,
                exponent=low,
            )
        )
        tail = f.values[f.grid.points >= f.grid.r_max / 10.0]
        vanishes = f.tail_exponent > 0.0 and tail[-1] < tail[0]
        out.append(
            _entry(
                f"{tag}_vanishes_at_infinity",
                "ground-state vanishing",
                bool(vanishes),
                float(tail[-1] / max(tail[0], 1e-300)),
                "< 1",
                0.0,
            )
        )
        bounded = bool(np.max(f.values) < np.inf and f.head_exponent <= 0.0)
        out.append(
            _entry(
                f"{tag}_bounded",
                "ground-state boundedness",
                bounded,
                float(np.max(f.values)),
                "finite sup-norm",
                0.0,
            )
        )
    return out


# -- equivalence between integrability and fast decay -------------------------


def check_equivalence_theorem(
    params: Parameters, grid: Optional[RadialGrid] = None
) -> list[CheckEntry]:
    """Both directions on synthetic tails: fast tails are integrable, slow are not."""
    ref = "integrable iff fast-decaying"
    grid = grid or RadialGrid.per_decade(1e-2, 1e4, 16)
    exps = exponents(params)
    n = params.n
    u_fast, v_fast = make_ansatz(Ansatz.FAST, params, grid)
    u_slow, v_slow = make_ansatz(Ansatz.SLOW, params, grid)
    out = []
    nu = lp_norm(u_fast, exps.r0, 0.0, n=n)
    nv = lp_norm(v_fast, exps.s0, 0.0, n=n)
    out.append(
        _entry(
            "fast_tail_is_integrable",
            ref,
            not is_infinite(nu) and not is_infinite(nv),
            [nu, nv],
            "finite",
            0.0,
            norm_exponents=[exps.r0, exps.s0],
        )
    )
    report = classify_regime(params)
    if report.regime is Regime.LOGARITHMIC:
        out.append(
            _entry(
                "log_tail_is_integrable",
                ref,
                not is_infinite(nv),
                nv,
                "finite",
                0.0,
                log_power=report.v_log_power,
            )
        )
    nu_slow = lp_norm(u_slow, exps.r0, 0.0, n=n)
    nv_slow = lp_norm(v_slow, exps.s0, 0.0, n=n)
    out.append(
        _entry(
            "slow_tail_not_integrable",
            ref,
            is_infinite(nu_slow) and is_infinite(nv_slow),
            [nu_slow, nv_slow],
            "Infinite",
            0.0,
            tail_exponents=[exps.q0, exps.p0],
        )
    )
    return out


# -- borderline log-tail limit -------------------------------------------------


def log_tail_expression(n: int, beta: float, gamma: float, lam: float, x: float) -> float:
    """x^{A/g} / (ln(lam x))^{1/g} * int_{lam x}^inf (ln t / t^A)^{1/g} dt/t.

    A = n - beta*gamma, g = gamma - 1; evaluated by Gauss-Laguerre in
    tau = ln t, so arbitrarily large x costs nothing.
    """
    g = gamma - 1.0
    A = n - beta * gamma
    if not (A > 0.0 and lam > 0.0 and x > 1.0):
        raise ParameterError("requires beta*gamma < n, lam > 0, x > 1")
    a = A / g
    tau0 = math.log(lam * x)
    nodes, wts = _laggauss(96)
    tau = tau0 + nodes / a
    integral = float(np.dot(wts, tau ** (1.0 / g))) / a * math.exp(-a * tau0)
    return x**a / math.log(lam * x) ** (1.0 / g) * integral


def check_log_limit(params: Parameters, lam: float = 1.0) -> list[CheckEntry]:
    """Approach of the borderline tail integral to its closed-form limit.

    The limit equals (gamma-1)/(n-beta*gamma) * lam^{-(n-beta*gamma)/(gamma-1)}.
    The finite-x expression exceeds it by a relative gap of about
    1/(3 ln(lam x)) in the second-order case, which still exceeds the pinned
    2% tolerance at x = 1e5; the entry reports that honestly, and a companion
    entry extrapolates the 1/ln x trend to confirm the limit itself.
    """
    validate(params)
    if lam <= 0.0:
        raise ParameterError("lam must be positive")
    ref = "borderline log-tail limit"
    g = params.gamma - 1.0
    A = params.n - params.beta * params.gamma
    expected = g / A * lam ** (-A / g)
    xs = (1e3, 1e4, 1e5)
    values = [log_tail_expression(params.n, params.beta, params.gamma, lam, x) for x in xs]
    gaps = [abs(v - expected) for v in values]
    monotone = gaps[0] > gaps[1] > gaps[2]
    final_ok = gaps[2] <= LOG_LIMIT_RTOL * expected
    out = [
        _entry(
            "log_limit_at_1e5",
            ref,
            monotone and final_ok,
            values[2],
            expected,
            LOG_LIMIT_RTOL,
            values_at=[list(xs), values],
            monotone_approach=monotone,
        )
    ]
    # Richardson step in 1/ln(x): the gap is asymptotically proportional to it
    w1, w2 = 1.0 / math.log(lam * xs[1]), 1.0 / math.log(lam * xs[2])
    extrapolated = values[2] + (values[2] - values[1]) * w2 / (w1 - w2)
    out.append(
        _entry(
            "log_limit_extrapolated",
            ref,
            abs(extrapolated / expected - 1.0) <= LOG_LIMIT_RTOL,
            extrapolated,
            expected,
            LOG_LIMIT_RTOL,
        )
    )
    return out


# -- inequality ratio boundedness ----------------------------------------------


def standard_battery(n: int, seed: int = 0, count: int = 20) -> list[RadialFunction]:
    """Deterministic nonnegative source profiles with declared tails."""
    rng = np.random.default_rng(seed)
    battery = []
    base = RadialGrid.per_decade(1e-2, 1e2, 16)
    r = base.points
    for k in range(count):
        kind = k % 4
        if kind == 3:
            R = float(rng.uniform(0.5, 2.0))
            grid = RadialGrid.per_decade(R / 100.0, R, 16)
            battery.append(
                RadialFunction(
                    grid, np.ones(grid.count), head_exponent=0.0, tail_exponent=math.inf
                )
            )
            continue
        amp = float(rng.uniform(0.5, 2.0))
        R = float(np.exp(rng.uniform(math.log(0.3), math.log(3.0))))
        m = float(rng.uniform(n + 2.0, n + 8.0))
        vals = amp * (1.0 + (r / R) ** 2) ** (-m / 2.0)
        if kind == 2:
            m2 = float(rng.uniform(n + 2.0, n + 8.0))
            R2 = float(np.exp(rng.uniform(math.log(0.3), math.log(3.0))))
            vals = vals + 0.5 * (1.0 + (r / R2) ** 2) ** (-m2 / 2.0)
            m = min(m, m2)
        battery.append(RadialFunction(base, vals, head_exponent=0.0, tail_exponent=m))
    return battery


SCALE_FAMILY = (0.25, 0.5, 1.0, 2.0, 4.0)


def _ratio_entry(name, ref, ratios_by_profile) -> CheckEntry:
    flat = [r for fam in ratios_by_profile for r in fam]
    spread = max(flat) / min(flat)
    monotone_diverging = False
    for fam in ratios_by_profile:
        diffs = np.diff(fam)
        if (np.all(diffs > 0) or np.all(diffs < 0)) and max(fam) / min(fam) > 3.0:
            monotone_diverging = True
    ok = spread <= RATIO_WINDOW and not monotone_diverging
    return _entry(
        name,
        ref,
        ok,
        spread,
        f"ratio spread <= {RATIO_WINDOW:g}",
        RATIO_WINDOW,
        monotone_divergence=monotone_diverging,
        ratio_range=[min(flat), max(flat)],
    )


def check_inequalities(
    battery_seed: int,
    params: Parameters,
    p: Optional[float] = None,
    q: Optional[float] = None,
    count: int = 20,
    cfg: Optional[PotentialConfig] = None,
) -> list[CheckEntry]:
    """Two-sided ratio boundedness for the weighted convolution inequality and
    the comparison between the nonlinear and Riesz potentials.

    The convolution inequality requires 1/p - 1/q = (alpha + sigma)/n with
    q > n/(n - alpha) (alpha = beta*gamma, sigma = sigma1); explicitly
    supplied exponents violating the relation raise ParameterError.
    """
    validate(params)
    n = params.n
    alpha = params.beta * params.gamma
    sigma = params.sigma1
    g = params.gamma - 1.0
    if p is None:
        p = 2.0
    inv_q = 1.0 / p - (alpha + sigma) / n
    if q is None:
        if inv_q <= 0.0:
            raise ParameterError(f"norm exponent p = {p} leaves no admissible q")
        q = 1.0 / inv_q
    elif abs(1.0 / p - 1.0 / q - (alpha + sigma) / n) > 1e-9:
        raise ParameterError(
            f"exponents violate 1/p - 1/q = (alpha+sigma)/n: "
            f"1/{p} - 1/{q} != ({alpha} + {sigma})/{n}"
        )
    if q <= n / (n - alpha):
        raise ParameterError(f"q = {q} must exceed n/(n-alpha) = {n / (n - alpha)}")

    battery = standard_battery(n, seed=battery_seed, count=count)
    hls_ratios, cmp_ratios = [], []
    for f in battery:
        fam_hls, fam_cmp = [], []
        for lam in SCALE_FAMILY:
            fl = f.dilate(lam)
            src = weighted_source(sigma, 1.0, fl)
            img = riesz_eval(src, n, alpha, cfg)
            num = lp_norm(img, q, 0.0, n=n)
            den = lp_norm(fl, p, 0.0, n=n)
            fam_hls.append(float(num) / float(den))
            wimg = wolff_eval(fl, n, params.beta, params.gamma, cfg)
            rimg = riesz_eval(fl, n, alpha, cfg)
            num2 = float(lp_norm(rimg, p / g, 0.0, n=n)) ** (1.0 / g)
            den2 = float(lp_norm(wimg, p, 0.0, n=n))
            fam_cmp.append(num2 / den2)
        hls_ratios.append(fam_hls)
        cmp_ratios.append(fam_cmp)

    out = [
        _ratio_entry("weighted_hls_ratio", "weighted convolution inequality", hls_ratios),
        _ratio_entry("wolff_riesz_comparison", "potential comparison inequality", cmp_ratios),
    ]
    if abs(params.gamma - 2.0) <= 1e-12:
        flat = np.array([r for fam in cmp_ratios for r in fam])
        expected = n - alpha
        dev = float(np.max(np.abs(flat / expected - 1.0)))
        out.append(
            _entry(
                "comparison_constant_second_order",
                "potential comparison inequality, linear case",
                dev <= RIESZ_IDENTITY_RTOL,
                dev,
                0.0,
                RIESZ_IDENTITY_RTOL,
                constant=expected,
            )
        )
    return out


def check_riesz_identity(
    params: Parameters,
    cfg: Optional[PotentialConfig] = None,
    count: int = 6,
    seed: int = 0,
) -> list[CheckEntry]:
    """Pointwise agreement of the gamma = 2 potential with the Riesz form."""
    n = params.n
    alpha = params.beta * 2.0
    if alpha >= n:
        raise ParameterError("beta*2 must stay below n for the identity check")
    worst = 0.0
    for f in standard_battery(n, seed=seed, count=count):
        w = wolff_eval(f, n, params.beta, 2.0, cfg)
        r = riesz_eval(f, n, alpha, cfg)
        rel = np.max(np.abs(w.values / (r.values / (n - alpha)) - 1.0))
        worst = max(worst, float(rel))
    return [
        _entry(
            "riesz_identity_gamma2",
            "second-order reduction to the Riesz potential",
            worst <= RIESZ_IDENTITY_RTOL,
            worst,
            0.0,
            RIESZ_IDENTITY_RTOL,
        )
    ]


# -- suite orchestration --------------------------------------------------------


SUITES = ("all", "rates", "integrability", "inequalities", "loglimit")


def run_suite(
    params: Parameters,
    suite: str = "all",
    seed: int = 0,
    solve_result: Optional[SolveResult] = None,
) -> VerificationReport:
    """Assemble the requested checks into a reproducible report."""
    if suite not in SUITES:
        raise ParameterError(f"unknown suite {suite!r}; choose from {SUITES}")
    checks: list[CheckEntry] = []
    needs_solution = suite in ("all", "rates", "integrability")
    result = solve_result
    if needs_solution and result is None:
        result = _obtain_solution(params)
    if suite in ("all", "rates"):
        if result is None:
            checks.append(_skipped("fast_rate_u", "fast decay-rate trichotomy", "no solver available"))
        else:
            checks.extend(check_fast_rates(result, params))
    if suite in ("all", "integrability"):
        if result is None:
            checks.append(_skipped("integrability", "optimal integrability interval", "no solver available"))
        else:
            checks.extend(check_integrability(result, params))
        checks.extend(check_equivalence_theorem(params))
    if suite in ("all", "loglimit"):
        checks.extend(check_log_limit(params, lam=1.0))
        checks.extend(check_log_limit(params, lam=2.0))
    if suite in ("all", "inequalities"):
        checks.extend(check_inequalities(seed, params))
        if abs(params.gamma - 2.0) <= 1e-12:
            checks.extend(check_riesz_identity(params, seed=seed))
    return VerificationReport(params=params, checks=checks)


def _obtain_solution(params: Parameters) -> Optional[SolveResult]:
    """Ground state via shooting when available (beta = 1), else the Picard solver."""
    from .quasilinear import find_fast_ground_state
    from .solver import SolveConfig, solve_system

    if abs(params.beta - 1.0) <= 1e-12:
        try:
            return find_fast_ground_state(params)
        except Exception:
            pass
    try:
        return solve_system(params, SolveConfig(max_iters=25))
    except Exception:
        return None
