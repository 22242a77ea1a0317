import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hypineq.constants import LorentzIndex, frac_sobolev_constant, poincare_constant
from hypineq.profiles import (
    family_cone,
    family_exp,
    family_frac_extremal,
    family_frac_pullback,
    family_mt,
)
from hypineq.verifiers import (
    BATTERY_SUITES,
    SweepResult,
    mt_functional,
    mt_lambda_sweep,
    run_battery,
    sharpness_sweep_poincare,
    verify_abreu_scaling,
    verify_convexity_ineq,
    verify_frac_sobolev,
    verify_hardy_1d,
    verify_key_estimate,
    verify_maximal,
    verify_mt,
    verify_pointwise_headbound,
    verify_poincare,
    verify_poincare_sobolev,
)


# ---------------------------------------------------------------------------
# the Poincare verifier against independent arithmetic


def test_poincare_sides_match_scipy_for_cone():
    # gradient field is 1 on (0,S): lhs = (p/q) S^(q/p) exactly
    n, S = 4, 10.0
    p = q = 3.0
    u = family_cone(n, S)
    rep = verify_poincare(u, n, LorentzIndex(p, q))
    assert rep.lhs == pytest.approx((p / q) * S ** (q / p), rel=1e-9)
    mass, _ = quad(lambda t: float(u(t)) ** q, 0.0, S, limit=300)
    assert rep.rhs == pytest.approx(((n - 1.0) / p) ** q * mass, rel=1e-8)
    assert rep.passed and rep.margin == rep.lhs - rep.rhs


def test_poincare_margin_is_q_homogeneous():
    n = 4
    idx = LorentzIndex(3.5, 3.0)
    u = family_exp(1.0)
    base = verify_poincare(u, n, idx)
    c = 3.7
    scaled = verify_poincare(u.scaled(c), n, idx)
    assert scaled.margin == pytest.approx(c**idx.q * base.margin, rel=1e-9)


def test_poincare_window_rejected():
    with pytest.raises(ValueError, match="1 < q <= p"):
        verify_poincare(family_exp(), 4, LorentzIndex(2.0, 3.0))


def test_divergent_profile_is_flagged_not_passed():
    n, p, q = 3, 3.0, 2.0
    beta_crit = q + n * (q - 1.0) / p
    u = family_frac_pullback(n, beta_crit, q)
    rep = verify_poincare(u, n, LorentzIndex(p, q))
    assert not rep.passed
    assert rep.params.get("divergent") is True
    assert rep.margin == -math.inf
    assert rep.to_dict()["pass"] is False


def test_sweep_grid_validation():
    idx = LorentzIndex(4.0, 3.0)
    with pytest.raises(ValueError, match="strictly increasing"):
        sharpness_sweep_poincare(4, idx, 1.0, [])
    with pytest.raises(ValueError, match="strictly increasing"):
        sharpness_sweep_poincare(4, idx, 1.0, [2.0, 2.0])
    with pytest.raises(ValueError, match="a must be positive"):
        sharpness_sweep_poincare(4, idx, 0.0, [1.0, 2.0])


def test_sweep_ratios_descend_toward_constant():
    idx = LorentzIndex(4.0, 3.0)
    sweep = sharpness_sweep_poincare(4, idx, 50.0, [4.0, 8.0, 12.0], cells=2048)
    assert sweep.target == poincare_constant(4, idx.p, idx.q)
    assert all(r > sweep.target for r in sweep.ratios)
    assert sweep.ratios[0] > sweep.ratios[1] > sweep.ratios[2]
    assert sweep.rows()[1] == (8.0, sweep.ratios[1], sweep.target)


def test_key_estimate_dimension_guard():
    with pytest.raises(ValueError, match="n >= 3"):
        verify_key_estimate(family_exp(), 2, LorentzIndex(4.0, 4.0))


def test_ps_l_range_guard():
    u = family_frac_pullback(4, 10.0, 3.0)
    with pytest.raises(ValueError, match="q <= l"):
        verify_poincare_sobolev(u, 4, 3.5, 3.0, 2.0)
    with pytest.raises(ValueError, match="q <= l"):
        verify_poincare_sobolev(u, 4, 3.5, 3.0, 30.0)


# ---------------------------------------------------------------------------
# scalar convexity inequality


@settings(max_examples=300, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=50.0),
    st.floats(min_value=0.0, max_value=100.0),
    st.floats(min_value=2.0, max_value=4.5),
)
def test_convexity_property(b, gap, q):
    rep = verify_convexity_ineq(b - gap, b, q)
    assert rep.passed


def test_convexity_bulk_random():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        b = rng.uniform(0.0, 1e3)
        a = b - rng.uniform(0.0, 2e3)
        q = rng.uniform(2.0, 6.0)
        assert verify_convexity_ineq(a, b, q).passed


def test_convexity_equality_cases():
    assert verify_convexity_ineq(0.0, 5.0, 3.0).margin == 0.0
    assert verify_convexity_ineq(5.0, 5.0, 2.0).margin == 0.0
    with pytest.raises(ValueError):
        verify_convexity_ineq(2.0, 1.0, 3.0)
    with pytest.raises(ValueError):
        verify_convexity_ineq(0.0, 1.0, 1.5)


# ---------------------------------------------------------------------------
# half-line quotients


def test_frac_sobolev_extremal_attains_constant():
    beta, q = 7.0, 2.5
    rep = verify_frac_sobolev(family_frac_extremal(beta, q), beta, q)
    assert rep.passed
    assert rep.lhs == pytest.approx(frac_sobolev_constant(beta, q), rel=1e-8)


def test_frac_sobolev_perturbation_increases_quotient():
    beta, q = 7.0, 2.5
    w, dw = family_frac_extremal(beta, q)
    bent = (lambda r: w(r) ** 1.05, lambda r: 1.05 * w(r) ** 0.05 * dw(r))
    rep = verify_frac_sobolev(bent, beta, q)
    assert rep.passed
    assert rep.margin > 10.0 * rep.tolerance


def test_frac_sobolev_window_guard():
    with pytest.raises(ValueError, match="beta > q > 1"):
        verify_frac_sobolev(family_frac_extremal(7.0, 2.5), 2.0, 2.5)


# ---------------------------------------------------------------------------
# Hardy and maximal


def test_hardy_cone_instance():
    n = 4
    idx = LorentzIndex(3.5, 3.0)
    rep = verify_hardy_1d(family_cone(n, 20.0), n, idx)
    assert rep.passed and rep.margin > 0.0
    with pytest.raises(ValueError, match="2n"):
        verify_hardy_1d(family_cone(n, 20.0), n, LorentzIndex(3.5, 2.0))


def test_maximal_bound_holds_with_room():
    idx = LorentzIndex(3.5, 3.0)
    rep = verify_maximal(family_exp(1.0), idx)
    assert rep.passed
    assert rep.lhs > rep.rhs > 0.0


# ---------------------------------------------------------------------------
# exponential-integrability side


def test_mt_functional_monotone_under_scaling():
    n, q = 4, 3.0
    u = family_mt(n, q, {"a": 1.0, "T": math.exp(8.0)})
    lo = mt_functional(u.scaled(0.9), n, q)
    hi = mt_functional(u.scaled(1.1), n, q)
    assert math.isfinite(lo) and math.isfinite(hi)
    assert hi > lo


def test_mt_functional_divergence_detected():
    # tail u ~ t^(-1/8): the truncated series term decays slower than 1/t
    u = family_frac_pullback(4, 4.0, 3.0)
    assert mt_functional(u, 4, 3.0) == math.inf


def test_verify_mt_lambda_domain():
    shape = {"a": 1.0, "T": math.exp(8.0)}
    theta = ((4 - 1.0) / 4.0) ** 3
    with pytest.raises(ValueError, match="below the threshold"):
        verify_mt(shape, 4, 3.0, theta)
    with pytest.raises(ValueError, match="nonnegative"):
        verify_mt(shape, 4, 3.0, -0.05)


def test_verify_mt_report_contents():
    shape = {"a": 1.0, "T": math.exp(8.0)}
    rep = verify_mt(shape, 4, 3.0, 0.25)
    assert rep.passed
    assert rep.rhs == rep.params["functional"]
    assert rep.params["normalization_scale"] > 0.0
    assert rep.params["threshold"] == pytest.approx((3.0 / 4.0) ** 3)


def test_mt_sweep_monotone_in_lambda():
    grid = [0.0, 0.15, 0.3]
    sweep = mt_lambda_sweep(4, 3.0, grid)
    assert sweep.abscissae == tuple(grid)
    assert sweep.target == pytest.approx((3.0 / 4.0) ** 3)
    assert all(math.isfinite(v) for v in sweep.ratios)
    assert sweep.ratios[0] < sweep.ratios[1] < sweep.ratios[2]


def test_abreu_scaling_identity():
    w = lambda r: np.exp(-np.asarray(r) ** 2)
    dw = lambda r: -2.0 * np.asarray(r) * np.exp(-np.asarray(r) ** 2)
    rep = verify_abreu_scaling((w, dw), 2.0, 4, 4.0)
    assert rep.passed
    assert rep.params["functional_ratio"] == pytest.approx(rep.params["target_ratio"], rel=1e-9)
    assert rep.params["gradient_ratio"] == pytest.approx(1.0, rel=1e-9)
    assert rep.params["mass_ratio"] == pytest.approx(4.0, rel=1e-9)
    trivial = verify_abreu_scaling((w, dw), 2.0, 4, 1.0)
    assert trivial.margin == 0.0  # tau = 1 compares an integral with itself


def test_headbound_requires_decreasing_w():
    w = lambda r: np.exp(-np.asarray(r) ** 2)
    rep = verify_pointwise_headbound(w, 2.0)
    assert rep.passed
    with pytest.raises(ValueError, match="non-increasing"):
        verify_pointwise_headbound(lambda r: np.asarray(r), 2.0)


# ---------------------------------------------------------------------------
# battery plumbing


def test_battery_rejects_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        run_battery("nope")


def test_battery_deterministic_and_thread_invariant():
    a = [r.to_dict() for r in run_battery("hardy")]
    b = [r.to_dict() for r in run_battery("hardy")]
    assert a == b
    c = [r.to_dict() for r in run_battery("hardy", threads=2)]
    assert a == c


def test_battery_reports_are_internally_consistent():
    reports = run_battery("all")
    assert len(reports) > 100
    seen = set()
    for rep in reports:
        seen.add(rep.name)
        assert isinstance(rep.params, dict)
        if math.isfinite(rep.margin):
            assert rep.passed == (rep.margin >= -rep.tolerance)
        else:
            assert not rep.passed
    assert {"poincare", "key_estimate", "mt_envelope", "hardy_1d"} <= seen


def test_battery_suite_names_exported():
    assert "all" in BATTERY_SUITES and len(BATTERY_SUITES) == 9


def test_sweep_result_shape_guard():
    with pytest.raises(ValueError, match="equal length"):
        SweepResult((1.0, 2.0), (3.0,), 0.5)
