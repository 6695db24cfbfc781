import math

import numpy as np
import pytest

from wolffkit.errors import (
    DegenerateIterationError,
    NotConvergedError,
    ParameterError,
)
from wolffkit.params import Parameters, classify_regime
from wolffkit.radial import RadialFunction, RadialGrid
from wolffkit.solver import (
    Ansatz,
    Normalization,
    SolveConfig,
    bubble_profile,
    default_solver_grid,
    make_ansatz,
    picard_step,
    potential_images,
    solve_system,
    system_residual,
)

CRITICAL_SCALAR = Parameters(5, 1.0, 2.0, 7 / 3, 7 / 3, 0.0, 0.0)


def test_fast_ansatz_tails_match_predictions():
    params = Parameters(5, 1.0, 2.0, 1.5, 3.0, 0.0, 0.0)
    report = classify_regime(params)
    u, v = make_ansatz(Ansatz.FAST, params, default_solver_grid())
    assert u.tail_exponent == pytest.approx(report.predicted_u_exponent)
    assert v.tail_exponent == pytest.approx(report.predicted_v_exponent)
    assert v.tail_log_power == pytest.approx(report.v_log_power)
    assert np.all(u.values > 0) and np.all(v.values > 0)


def test_log_regime_ansatz_carries_log_factor():
    params = Parameters(5, 1.0, 2.0, 5 / 3, 31 / 9, 0.0, 0.0)
    _, v = make_ansatz(Ansatz.FAST, params, default_solver_grid())
    assert v.tail_log_power == pytest.approx(1.0)


def test_slow_ansatz_reduces_to_scalar_slow_rate():
    # second-order scalar case: slow tail must equal (2 + sigma)/(p - 1)
    params = Parameters(3, 1.0, 2.0, 5.0, 5.0, -0.5, -0.5)
    u, v = make_ansatz(Ansatz.SLOW, params, default_solver_grid())
    assert u.tail_exponent == pytest.approx((2.0 - 0.5) / (5.0 - 1.0), rel=1e-12)
    assert v.tail_exponent == pytest.approx(u.tail_exponent)


def test_bubble_profile_is_a_near_fixed_point():
    grid = default_solver_grid()
    u = bubble_profile(5, grid)
    res_u, res_v = system_residual(
        CRITICAL_SCALAR, u, u, window=(grid.r_min, grid.r_max / 10.0)
    )
    assert res_u <= 1e-2
    assert res_v <= 1e-2


def test_picard_step_identity_damping_is_plain_image():
    grid = default_solver_grid()
    u = bubble_profile(5, grid)
    cfg = SolveConfig(damping=1.0, normalization=Normalization.NONE)
    img_u, img_v = potential_images(CRITICAL_SCALAR, u, u, cfg)
    step_u, step_v = picard_step(CRITICAL_SCALAR, u, u, cfg)
    assert np.array_equal(step_u.values, img_u.values)
    assert np.array_equal(step_v.values, img_v.values)


def test_picard_step_rejects_vanishing_iterate():
    grid = default_solver_grid()
    zero = RadialFunction(grid, np.zeros(grid.count), tail_exponent=math.inf)
    with pytest.raises(DegenerateIterationError):
        picard_step(CRITICAL_SCALAR, zero, zero, SolveConfig())


def test_solver_refuses_subcritical_by_default():
    sub = Parameters(5, 1.0, 2.0, 2.0, 2.0, 0.0, 0.0)
    with pytest.raises(ParameterError, match="subcritical"):
        solve_system(sub, SolveConfig(max_iters=1))


def test_solver_strict_mode_raises_not_converged():
    cfg = SolveConfig(max_iters=1, rel_tol=1e-14, strict=True)
    with pytest.raises(NotConvergedError) as err:
        solve_system(CRITICAL_SCALAR, cfg)
    assert err.value.trace


def test_solver_converges_from_bubble_and_matches_it():
    grid = RadialGrid.per_decade(1e-2, 1e3, 16)
    u0 = bubble_profile(5, grid)
    cfg = SolveConfig(
        max_iters=6,
        rel_tol=5e-3,
        damping=1.0,
        grid=grid,
        initial=Ansatz.CUSTOM,
        custom_initial=(u0, u0),
    )
    res = solve_system(CRITICAL_SCALAR, cfg)
    assert res.converged
    assert res.residual_u <= cfg.rel_tol
    rel = np.abs(res.u.values / u0.values - 1.0)
    assert rel.max() <= 2e-2
    assert res.rate_u.exponent == pytest.approx(3.0, rel=0.02)


def test_converged_result_solves_unit_coefficient_system():
    res = solve_system(CRITICAL_SCALAR, SolveConfig(max_iters=8, rel_tol=5e-3))
    assert res.converged
    ru, rv = system_residual(CRITICAL_SCALAR, res.u, res.v)
    assert ru <= 2 * res.residual_u + 1e-9
    assert rv <= 2 * res.residual_v + 1e-9
    assert np.all(res.u.values > 0) and np.all(res.v.values > 0)


def test_double_bounded_coefficients_do_not_change_declared_rates():
    grid = default_solver_grid()
    u, v = make_ansatz(Ansatz.FAST, CRITICAL_SCALAR, grid)
    wobble = 1.0 + 0.5 * np.sin(np.log(grid.points))  # within [1/2, 2]
    c1 = RadialFunction(grid, wobble, tail_exponent=0.0)
    c2 = RadialFunction(grid, 2.0 - wobble + 1.0, tail_exponent=0.0)
    plain = SolveConfig()
    coef = SolveConfig(coefficients=(c1, c2))
    img_u, img_v = potential_images(CRITICAL_SCALAR, u, v, plain)
    img_uc, img_vc = potential_images(CRITICAL_SCALAR, u, v, coef)
    # coefficient application is pointwise and bounded, so the declared tail
    # models and two-sided bounds survive
    assert img_uc.tail_exponent == img_u.tail_exponent
    ratio = img_uc.values / img_u.values
    assert 0.5 - 1e-12 <= ratio.min() and ratio.max() <= 2.0 + 1e-12


def test_annulus_boundedness_and_weighted_mass_of_fast_solution():
    # for a fast-decay pair: v * r^{(n+sigma1)/q} stays bounded over dyadic
    # annuli (and decays under strict non-subcriticality), and the weighted
    # source r^{sigma1} v^q has finite total mass
    from wolffkit.potential import weighted_source
    from wolffkit.quasilinear import GroundStateConfig, ShootConfig, find_fast_ground_state
    from wolffkit.radial import is_infinite, lp_norm

    params = Parameters(5, 1.0, 2.0, 2.0, 2.75, 0.0, 0.0)
    res = find_fast_ground_state(params, GroundStateConfig(shoot=ShootConfig(r_stop=1e5)))
    assert res.converged
    v = res.v
    expo = (params.n + params.sigma1) / params.q
    r_lo, r_hi = v.grid.r_max / 100.0, v.grid.r_max
    sups = []
    k = 0
    while r_lo * 2 ** (k + 1) <= r_hi:
        lo, hi = r_lo * 2**k, r_lo * 2 ** (k + 1)
        r = np.geomspace(lo, hi, 16)
        sups.append(float(np.max(v(r) * r**expo)))
        k += 1
    assert len(sups) >= 4
    assert max(sups) <= 2.0 * sups[0]  # bounded uniformly in the annulus index
    assert sups[-1] <= sups[0]  # decaying at these (critical) parameters
    src = weighted_source(params.sigma1, params.q, v)
    assert not is_infinite(lp_norm(src, 1.0, 0.0, n=params.n))


def test_solve_config_from_dict():
    cfg = SolveConfig.from_dict(
        {
            "damping": 0.5,
            "max_iters": 7,
            "rel_tol": 1e-2,
            "normalization": "FixValueAtOne",
            "initial": "FastAnsatz",
            "grid": {"r_min": 1e-2, "r_max": 1e2, "nodes_per_decade": 16},
        }
    )
    assert cfg.damping == 0.5
    assert cfg.normalization is Normalization.FIX_VALUE_AT_ONE
    assert cfg.initial is Ansatz.FAST
    assert cfg.grid.r_max == pytest.approx(1e2)
    with pytest.raises(ParameterError):
        SolveConfig(damping=1.5)
