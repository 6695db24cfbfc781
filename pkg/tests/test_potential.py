import numpy as np
import pytest

from wolffkit.errors import DivergentIntegralError, ParameterError
from wolffkit.potential import (
    PotentialConfig,
    riesz_eval,
    riesz_eval_at,
    weighted_source,
    wolff_eval,
    wolff_eval_at,
)
from wolffkit.radial import (
    RadialFunction,
    RadialGrid,
    fit_decay_rate,
    sphere_surface,
    unit_ball_volume,
)

from conftest import indicator_of_ball, power_tail_profile


def wolff_indicator_at_origin(n, beta, gamma):
    # the inner mass is omega_n * min(t,1)^n, making both t-pieces elementary
    g = gamma - 1.0
    bg = beta * gamma
    return unit_ball_volume(n) ** (1.0 / g) * (g / bg + g / (n - bg))


@pytest.mark.parametrize(
    "n, beta, gamma",
    [(5, 1.0, 2.0), (3, 0.5, 1.5), (6, 2.0, 1.8), (4, 1.2, 2.0), (5, 2.2, 1.3)],
)
def test_wolff_indicator_closed_form_at_origin(unit_indicator, n, beta, gamma):
    got = wolff_eval_at(unit_indicator, n, beta, gamma, [0.0])[0]
    assert got == pytest.approx(wolff_indicator_at_origin(n, beta, gamma), rel=1e-6)


def test_wolff_homogeneity(unit_indicator):
    lam = 3.7
    gamma = 1.6
    base = wolff_eval_at(unit_indicator, 5, 1.0, gamma, [0.0, 0.5, 2.0])
    scaled = wolff_eval_at(unit_indicator.scaled(lam), 5, 1.0, gamma, [0.0, 0.5, 2.0])
    assert np.allclose(scaled, lam ** (1.0 / (gamma - 1.0)) * base, rtol=1e-12)


def test_riesz_indicator_closed_form_at_origin(unit_indicator):
    for n, alpha in [(5, 2.0), (3, 1.5), (4, 2.5)]:
        got = riesz_eval_at(unit_indicator, n, alpha, [0.0])[0]
        assert got == pytest.approx(sphere_surface(n) / alpha, rel=1e-8)


def test_riesz_far_field_is_point_mass_kernel(unit_indicator):
    # far from a compactly supported source, I_alpha(f)(x) ~ mass * |x|^{alpha-n}
    n, alpha = 5, 2.0
    rho = 250.0
    got = riesz_eval_at(unit_indicator, n, alpha, [rho])[0]
    assert got == pytest.approx(unit_ball_volume(n) * rho ** (alpha - n), rel=1e-3)


def test_radial_evaluation_is_deterministic(unit_indicator):
    a = wolff_eval_at(unit_indicator, 5, 1.0, 2.0, [0.3, 1.0, 2.0])
    b = wolff_eval_at(unit_indicator, 5, 1.0, 2.0, [0.3, 1.0, 2.0])
    assert np.array_equal(a, b)


def test_weighted_source_algebra():
    g = RadialGrid.per_decade(1e-2, 1e2, 16)
    f = power_tail_profile(g, 1.0, 3.0)
    out = weighted_source(-1.0, 2.0, f)
    assert out.tail_exponent == pytest.approx(7.0)  # 2*3 + 1
    assert out.head_exponent == pytest.approx(1.0)  # 2*0 - (-1)
    assert np.allclose(out.values, g.points**-1.0 * f.values**2)
    ident = weighted_source(0.0, 1.0, f)
    assert np.array_equal(ident.values, f.values)
    assert ident.tail_exponent == f.tail_exponent


def test_weighted_source_log_power_scales():
    g = RadialGrid.per_decade(10.0, 1e4, 16)
    f = RadialFunction(g, g.points**-3.0, head_exponent=3.0, tail_exponent=3.0, tail_log_power=1.0)
    out = weighted_source(0.0, 2.5, f)
    assert out.tail_log_power == pytest.approx(2.5)


def test_second_order_identity_on_battery():
    grids = RadialGrid.per_decade(1e-2, 1e2, 16)
    battery = [
        indicator_of_ball(1.0),
        power_tail_profile(grids, 0.5, 9.0),  # sharply localized bump
        power_tail_profile(grids, 1.0, 7.0),  # power-law tail
    ]
    n, alpha = 5, 2.0
    for f in battery:
        w = wolff_eval(f, n, alpha / 2.0, 2.0)
        r = riesz_eval(f, n, alpha)
        assert np.max(np.abs(w.values / (r.values / (n - alpha)) - 1.0)) <= 1e-3


def test_wolff_monotone_in_source():
    g = RadialGrid.per_decade(1e-2, 1e2, 16)
    f = power_tail_profile(g, 1.0, 7.0)
    bigger = f.with_values(f.values * (1.0 + 0.4 * np.cos(np.log(g.points)) ** 2))
    wf = wolff_eval(f, 5, 1.0, 1.7)
    wg = wolff_eval(bigger, 5, 1.0, 1.7)
    assert np.all(wf.values <= wg.values * (1.0 + 1e-10))


def test_wolff_output_fast_tail_and_lower_bound():
    # any compactly-supported-mass source decays no faster than the fast rate
    n, beta, gamma = 5, 1.0, 2.0
    fast = (n - beta * gamma) / (gamma - 1.0)
    f = indicator_of_ball(1.0)
    grid = RadialGrid.per_decade(1e-1, 1e3, 16)
    w = wolff_eval(f, n, beta, gamma, eval_grid=grid)
    assert w.tail_exponent == pytest.approx(fast)
    fit = fit_decay_rate(w, (10.0, 1e3))
    assert fit.exponent <= fast + 0.02


def test_wolff_output_tail_trichotomy():
    n, beta, gamma = 5, 1.0, 2.0
    g = RadialGrid.per_decade(1e-2, 1e2, 16)
    finite = wolff_eval(power_tail_profile(g, 1.0, 7.0), n, beta, gamma)
    assert finite.tail_exponent == pytest.approx(3.0)
    assert finite.tail_log_power == 0.0
    borderline = wolff_eval(power_tail_profile(g, 1.0, 5.0), n, beta, gamma)
    assert borderline.tail_exponent == pytest.approx(3.0)
    assert borderline.tail_log_power == pytest.approx(1.0)
    slow = wolff_eval(power_tail_profile(g, 1.0, 4.0), n, beta, gamma)
    assert slow.tail_exponent == pytest.approx(2.0)  # (4 - 2)/(2 - 1)


def test_wolff_borderline_source_grows_log_factor():
    # mass ~ log t makes the potential carry (ln r)^{1/(gamma-1)}
    n, beta, gamma = 5, 1.0, 2.0
    g = RadialGrid.per_decade(1e-2, 1e3, 16)
    src = power_tail_profile(g, 1.0, 5.0)
    grid = RadialGrid.per_decade(1.5, 1e3, 16)
    w = wolff_eval(src, n, beta, gamma, eval_grid=grid)
    fit = fit_decay_rate(w, (10.0, 1e3), allow_log=True)
    assert fit.exponent == pytest.approx(3.0, abs=0.1)
    assert fit.log_power == pytest.approx(1.0, abs=0.35)


def test_wolff_divergence_errors():
    g = RadialGrid.per_decade(1e-2, 1e2, 16)
    too_slow = power_tail_profile(g, 1.0, 1.5)  # tail below beta*gamma = 2
    with pytest.raises(DivergentIntegralError):
        wolff_eval(too_slow, 5, 1.0, 2.0)
    singular = RadialFunction(g, g.points**-5.0, head_exponent=5.0, tail_exponent=7.0)
    with pytest.raises(DivergentIntegralError):
        wolff_eval(singular, 5, 1.0, 2.0)
    with pytest.raises(DivergentIntegralError):
        riesz_eval(too_slow, 5, 2.0)


def test_config_invariants(unit_indicator):
    with pytest.raises(ParameterError):
        wolff_eval(unit_indicator, 5, 1.0, 2.0, PotentialConfig(t_min=0.5))
    with pytest.raises(ParameterError):
        wolff_eval(unit_indicator, 5, 1.0, 2.0, PotentialConfig(t_max=2.0))
    with pytest.raises(ParameterError):
        PotentialConfig(t_nodes_per_decade=4)


def test_parameter_validation(unit_indicator):
    with pytest.raises(ParameterError, match="gamma"):
        wolff_eval(unit_indicator, 5, 1.0, 2.5)
    with pytest.raises(ParameterError):
        wolff_eval(unit_indicator, 5, 3.0, 2.0)  # beta*gamma >= n
    with pytest.raises(ParameterError, match="alpha"):
        riesz_eval(unit_indicator, 5, 6.0)


def test_config_round_trip():
    cfg = PotentialConfig(t_min=1e-4, t_max=1e5, t_nodes_per_decade=24, tail_correction=False)
    assert PotentialConfig.from_dict(cfg.to_dict()) == cfg
