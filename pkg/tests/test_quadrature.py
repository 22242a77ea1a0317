import math

import numpy as np
import pytest
from scipy.integrate import quad

from hypineq.quadrature import (
    QuadratureConfig,
    QuadratureResult,
    integrate,
    integrate_piecewise,
    log_grid,
)

# (f, a, b, gamma, exact or scipy, rel target) covering the integrand shapes in use;
# the barely-integrable tail compresses to an edge singularity, so it gets a looser bar
CASES = [
    (lambda t: np.exp(-t), 0.0, math.inf, None, 1.0, 1e-8),
    (lambda t: np.exp(-(t**2)), 0.0, math.inf, None, 0.5 * math.sqrt(math.pi), 1e-8),
    (lambda t: t ** (-0.25), 0.0, 1.0, 0.75, 4.0 / 3.0, 1e-8),
    (lambda t: np.log(t) ** 2, 0.0, 1.0, None, 2.0, 1e-8),
    (lambda t: np.sin(t) * np.exp(-0.5 * t), 0.0, math.inf, None, 1.0 / 1.25, 1e-8),
    (lambda t: 1.0 / (1.0 + t * t), 0.0, math.inf, None, 0.5 * math.pi, 1e-8),
    (lambda t: t**2.5 * np.exp(-3.0 * t), 0.0, math.inf, None, None, 1e-8),
    (lambda t: (2.0 + np.cos(7.0 * t)) / (1.0 + t) ** 3, 0.0, 40.0, None, None, 1e-8),
    (lambda t: t ** (-0.6) * np.exp(-t), 0.0, math.inf, 0.4, math.gamma(0.4), 1e-8),
    (lambda t: (1.0 + t) ** (-1.45), 0.0, math.inf, None, 1.0 / 0.45, 1e-6),
]


def _reference(f, a, b, exact):
    if exact is not None:
        return exact
    val, _ = quad(lambda t: float(f(np.array([t]))[0]), a, b, epsabs=1e-14, epsrel=1e-13, limit=400)
    return val


@pytest.mark.parametrize("case", range(len(CASES)))
def test_integrate_battery(case):
    f, a, b, gamma, exact, rel = CASES[case]
    ref = _reference(f, a, b, exact)
    cfg = QuadratureConfig(rel_tol=1e-11, singular_exponent_left=gamma)
    res = integrate(f, a, b, cfg)
    actual = abs(res.value - ref)
    # the estimate must bound the real error up to a small factor
    assert actual <= 10.0 * res.error_estimate + 1e-12 * abs(ref)
    assert actual <= rel * max(abs(ref), 1.0)


def test_sine_case_reference_value():
    # int_0^inf sin(t) e^(-t/2) dt = 1/(1/4+1) = 0.8
    f = lambda t: np.sin(t) * np.exp(-0.5 * t)
    res = integrate(f, 0.0, math.inf)
    assert res.value == pytest.approx(0.8, rel=1e-10)


def test_slow_power_tail():
    # decays like t^(-1.45): the compressed integrand is endpoint singular
    f = lambda t: (1.0 + t) ** (-1.45)
    res = integrate(f, 0.0, math.inf)
    assert res.value == pytest.approx(1.0 / 0.45, rel=1e-5)
    assert abs(res.value - 1.0 / 0.45) <= 10.0 * res.error_estimate


def test_zero_width_interval():
    res = integrate(lambda t: np.exp(t), 2.0, 2.0)
    assert res == QuadratureResult(0.0, 0.0, 0, True)


def test_additivity_of_results():
    f = lambda t: np.exp(-t) * t
    r1 = integrate(f, 0.0, 1.0)
    r2 = integrate(f, 1.0, math.inf)
    total = r1 + r2
    assert total.value == pytest.approx(1.0, rel=1e-11)
    assert total.error_estimate >= r1.error_estimate
    assert total.converged


def test_piecewise_matches_single_call():
    f = lambda t: np.exp(-t) / (1.0 + t)
    whole = integrate(f, 0.0, math.inf)
    pieces = integrate_piecewise(f, [0.0, 0.5, 3.0, math.inf])
    assert pieces.value == pytest.approx(whole.value, rel=1e-10)


def test_piecewise_head_exponent():
    q_over_p = 0.5
    f = lambda t: t ** (q_over_p - 1.0) * np.exp(-t)
    res = integrate_piecewise(f, [0.0, 1.0, math.inf], head_exponent=q_over_p)
    assert res.value == pytest.approx(math.gamma(q_over_p), rel=1e-10)


def test_non_finite_integrand_raises():
    f = lambda t: np.where(t > 0.5, np.nan, 1.0)
    with pytest.raises(ValueError, match="non-finite"):
        integrate(f, 0.0, 1.0)


def test_reversed_and_infinite_left_rejected():
    with pytest.raises(ValueError):
        integrate(lambda t: t, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(lambda t: t, math.inf, math.inf)


def test_bad_edges_rejected():
    with pytest.raises(ValueError):
        integrate_piecewise(lambda t: t, [0.0])
    with pytest.raises(ValueError):
        integrate_piecewise(lambda t: t, [0.0, 0.0, 1.0])


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0, abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_subdivisions=4)
    with pytest.raises(ValueError):
        QuadratureConfig(singular_exponent_left=-0.5)


def test_log_grid_endpoints_exact():
    g = log_grid(1e-3, 1e5, 41)
    assert g[0] == 1e-3
    assert g[-1] == 1e5
    assert np.all(np.diff(np.log(g)) > 0)
    ratios = g[1:] / g[:-1]
    assert ratios.max() / ratios.min() == pytest.approx(1.0, abs=1e-12)
