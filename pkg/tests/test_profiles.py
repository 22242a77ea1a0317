import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hypineq.constants import LorentzIndex, unit_ball_volume
from hypineq.geometry import psi, psi_inverse, surface_factor
from hypineq.profiles import (
    MonotoneProfile,
    RadialFunction,
    SampledFunction,
    decreasing_rearrangement,
    family_cone,
    family_exp,
    family_frac_extremal,
    family_frac_pullback,
    family_mt,
    family_power_cutoff,
    family_sharp,
    gradient_lorentz_norm,
    gradient_profile,
    gradient_qnorm_error,
    lorentz_norm,
    lorentz_qnorm_error,
    maximal_function,
    piecewise_linear_profile,
    profile_from_dict,
    profile_to_dict,
    radial_gradient_lorentz_norm,
    radialize,
    rearrange_radial,
    sampled_lorentz_qpower,
    v_transform,
)


def _scipy_qnorm(u, p, q, pieces):
    total = 0.0
    for a, b in zip(pieces, pieces[1:]):
        val, _ = quad(
            lambda t: float(u(t)) ** q * t ** (q / p - 1.0), a, b, limit=300
        )
        total += val
    return total


# ---------------------------------------------------------------------------
# closed-form norms of the families


@pytest.mark.parametrize("p,q,rate", [(3.5, 3.0, 1.0), (4.0, 2.0, 0.7), (2.5, 2.5, 2.0)])
def test_exp_family_qnorm_closed_form(p, q, rate):
    u = family_exp(rate)
    val, err = lorentz_qnorm_error(u, LorentzIndex(p, q))
    exact = math.gamma(q / p) / (q * rate) ** (q / p)
    assert val == pytest.approx(exact, rel=1e-10)
    assert abs(val - exact) <= 10.0 * err + 1e-12 * exact


@pytest.mark.parametrize("a,R,p,q", [(0.5, 40.0, 4.0, 3.0), (2.0, 2.0e5, 3.5, 3.0)])
def test_sharp_family_qnorm_closed_form(a, R, p, q):
    # head p/q, body ln(R/a), cut int_1^2 (2-s)^q s^(q/p-1) ds
    u = family_sharp(a, R, p)
    val, err = lorentz_qnorm_error(u, LorentzIndex(p, q))
    cut, _ = quad(lambda s: (2.0 - s) ** q * s ** (q / p - 1.0), 1.0, 2.0)
    exact = p / q + math.log(R / a) + cut
    assert val == pytest.approx(exact, rel=1e-8)
    assert abs(val - exact) <= 10.0 * err + 1e-10 * exact


def test_mt_family_qnorm_against_quad():
    n, q, p = 4, 3.0, 3.5
    u = family_mt(n, q, {"a": 1.0, "T": math.exp(6.0)})
    val, _ = lorentz_qnorm_error(u, LorentzIndex(p, q))
    ref = _scipy_qnorm(u, p, q, [0.0, 1.0, math.exp(6.0)])
    assert val == pytest.approx(ref, rel=1e-8)


def test_cumulative_matches_quad_on_families():
    for u in (family_sharp(1.0, 30.0, 3.5), family_mt(4, 3.0, {"a": 2.0, "T": 50.0})):
        for t in (0.5, 1.7, 10.0, 29.0, 70.0):
            hi = min(t, u.support_bound)
            ref, _ = quad(
                lambda s: float(u(s)), 0.0, hi,
                points=[b for b in u.breakpoints if b < hi],
                epsabs=1e-13, epsrel=1e-12, limit=200,
            )
            assert u.cumulative(t) == pytest.approx(ref, rel=1e-10, abs=1e-14)


def test_scaled_profile_is_exact():
    u = family_power_cutoff(3, 2.0)
    c = 7.25
    v = u.scaled(c)
    t = np.linspace(1e-3, 5.0, 50)
    np.testing.assert_allclose(v(t), c * u(t), rtol=0.0, atol=0.0)
    np.testing.assert_allclose(v.deriv(t), c * u.deriv(t), rtol=0.0, atol=0.0)
    with pytest.raises(ValueError):
        u.scaled(-1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_qnorm_scaling_homogeneity(c):
    idx = LorentzIndex(3.0, 2.0)
    u = family_exp(1.3)
    base, _ = lorentz_qnorm_error(u, idx)
    scaled, _ = lorentz_qnorm_error(u.scaled(c), idx)
    assert scaled == pytest.approx(c**idx.q * base, rel=1e-11)


def test_critical_tail_reported_divergent():
    # decay exponent equal to 1/p makes u*(t) t^(1/p) level off
    n, p, q = 3, 3.0, 2.0
    beta_crit = q + n * (q - 1.0) / p
    idx = LorentzIndex(p, q)
    val, err = lorentz_qnorm_error(family_frac_pullback(n, beta_crit, q), idx)
    assert math.isinf(val) and math.isinf(err)
    assert lorentz_norm(family_frac_pullback(n, beta_crit, q), idx) == math.inf
    # a strictly faster decay is integrable again
    ok, _ = lorentz_qnorm_error(
        family_frac_pullback(n, beta_crit + 0.75 * n * (q - 1.0), q), idx
    )
    assert math.isfinite(ok)


# ---------------------------------------------------------------------------
# gradient norms


@pytest.mark.parametrize("n,S", [(3, 1.0), (4, 100.0)])
def test_cone_gradient_both_paths_match_closed_form(n, S):
    u = family_cone(n, S)
    idx = LorentzIndex(3.5, 3.0)
    exact = (idx.p / idx.q) * S ** (idx.q / idx.p)
    mono, err_m = gradient_qnorm_error(u, n, idx, method="monotone")
    srt, err_s = gradient_qnorm_error(u, n, idx, method="sorted")
    assert mono == pytest.approx(exact, rel=1e-9)
    assert abs(srt - exact) <= 10.0 * err_s + 1e-7 * exact
    assert err_m < err_s  # closed-form field: direct quadrature should win


def test_sorted_path_against_level_set_oracle():
    # u linear from 1 to 0 on (1,2): U(s) = surface_factor on (1,2), increasing,
    # so U*(s) = U(2-s) on (0,1) and the q-norm has a one-line quad oracle
    n = 4
    idx = LorentzIndex(3.5, 3.0)
    u = piecewise_linear_profile([1.0, 2.0], [1.0, 0.0])
    val, err = gradient_qnorm_error(u, n, idx, method="sorted", cells=16384)
    ref, _ = quad(
        lambda s: float(surface_factor(n, 2.0 - s)) ** idx.q * s ** (idx.q / idx.p - 1.0),
        0.0,
        1.0,
        limit=200,
    )
    assert abs(val - ref) <= 10.0 * err + 1e-5 * ref


def test_auto_method_picks_sorted_for_nonmonotone_field():
    # exp profile: U vanishes at 0 and at infinity, so it is not decreasing
    u = family_exp(1.0)
    n = 3
    idx = LorentzIndex(3.0, 2.0)
    auto_val, auto_err = gradient_qnorm_error(u, n, idx)
    srt_val, srt_err = gradient_qnorm_error(u, n, idx, method="sorted")
    assert auto_val == srt_val and auto_err == srt_err
    # rearranging can only increase the unsorted weighted integral
    mono_val, _ = gradient_qnorm_error(u, n, idx, method="monotone")
    assert srt_val >= mono_val - 10.0 * srt_err


def test_gradient_rejects_jump_at_support_edge():
    # indicator-like profile: no absolutely continuous representative
    block = MonotoneProfile(
        kind="custom",
        support_bound=1.0,
        breakpoints=(),
        fn=lambda t: np.where(t < 1.0, 1.0, 0.0),
        dfn=lambda t: np.zeros_like(t),
    )
    with pytest.raises(ValueError, match="vanish continuously"):
        gradient_profile(block, 3)


def test_gradient_unknown_method_rejected():
    with pytest.raises(ValueError, match="unknown method"):
        gradient_qnorm_error(family_exp(), 3, LorentzIndex(3.0, 2.0), method="bogus")


# ---------------------------------------------------------------------------
# maximal function


def test_maximal_constant_head_is_exact():
    u = family_sharp(2.0, 50.0, 3.5)
    uu = maximal_function(u)
    for t in (1e-6, 0.5, 1.999):
        assert uu(t) == pytest.approx(u(t), rel=1e-14)


def test_maximal_dominates_and_extends_support():
    for u in (family_power_cutoff(3, 1.0), family_mt(4, 3.0, {"a": 1.0, "T": 40.0})):
        uu = maximal_function(u)
        assert uu.support_bound == math.inf
        t = np.geomspace(1e-4, 5.0 * u.support_bound, 60)
        assert np.all(uu(t) >= u(t) - 1e-12)
        assert uu(10.0 * u.support_bound) > 0.0


def test_maximal_cached_cumulative_against_quad():
    # cone profiles carry no closed antiderivative, forcing the cached path
    n, S = 3, 50.0
    u = family_cone(n, S)
    uu = maximal_function(u)
    for t in (0.5, 5.0, 49.9, 75.0):
        ref, _ = quad(lambda s: float(u(s)), 0.0, min(t, S), limit=300)
        assert uu(t) == pytest.approx(ref / t, rel=1e-9)


# ---------------------------------------------------------------------------
# sampled functions and the rearrangement inequality


def test_decreasing_rearrangement_sorts():
    f = SampledFunction(np.array([0.3, 2.0, 1.1, 0.0, 2.0]), 0.25)
    g = decreasing_rearrangement(f)
    np.testing.assert_array_equal(g.values, np.array([2.0, 2.0, 1.1, 0.3, 0.0]))
    assert g.cell_measure == f.cell_measure


def test_sorted_cells_majorize_every_permutation():
    idx = LorentzIndex(3.5, 2.0)
    vals = np.array([0.9, 0.1, 2.3, 1.4, 0.6])
    best = sampled_lorentz_qpower(
        decreasing_rearrangement(SampledFunction(vals, 0.4)), idx
    )
    for perm in itertools.permutations(vals):
        other = sampled_lorentz_qpower(SampledFunction(np.array(perm), 0.4), idx)
        assert other <= best + 1e-12 * best


# ---------------------------------------------------------------------------
# radial rearrangement


def test_rearranged_decreasing_bump_is_its_own_pullback():
    n = 3
    fn = RadialFunction(np.array([0.0, 2.0]), np.array([1.0, 0.0]))
    star = rearrange_radial(fn, n)
    assert star.support_bound == pytest.approx(float(psi(n, 2.0)), rel=1e-13)
    t = np.geomspace(1e-6, star.support_bound * 0.999, 80)
    direct = 1.0 - np.asarray(psi_inverse(n, t)) / 2.0
    np.testing.assert_allclose(star(t), direct, atol=5e-10)


def test_rearrangement_preserves_distribution():
    n = 2
    rho = np.array([0.0, 0.4, 0.9, 1.3, 1.8, 2.4])
    val = np.array([0.2, 1.0, 0.3, 0.8, 0.25, 0.0])
    fn = RadialFunction(rho, val)
    star = rearrange_radial(fn, n)
    # mu(lam) recomputed from scratch on a dense radial grid
    r = np.linspace(0.0, 2.4, 20001)
    phi = fn(r)
    areas = np.diff(np.asarray(psi(n, r)))
    for lam in (0.1, 0.22, 0.45, 0.7, 0.95):
        mu_grid = float(np.sum(areas * (0.5 * (phi[:-1] + phi[1:]) > lam)))
        # the rearrangement crosses lam exactly where mu does
        lo, hi = 0.0, star.support_bound
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if star(mid) > lam:
                lo = mid
            else:
                hi = mid
        assert 0.5 * (lo + hi) == pytest.approx(mu_grid, rel=2e-3)


def test_radialize_rearrange_round_trip():
    n = 3
    u = family_power_cutoff(n, 1.0)
    back = rearrange_radial(radialize(u, n, m=1024), n)
    t = np.linspace(1e-4, u.support_bound * 0.995, 64)
    np.testing.assert_allclose(back(t), u(t), atol=2e-5)


def test_polya_szego_for_two_bumps():
    n = 3
    idx = LorentzIndex(3.5, 3.0)
    rho = np.array([0.0, 0.3, 0.8, 1.2, 1.7, 2.2, 3.0])
    val = np.array([0.5, 0.9, 0.35, 0.95, 0.4, 0.15, 0.0])
    fn = RadialFunction(rho, val)
    lhs = radial_gradient_lorentz_norm(fn, n, idx)
    rhs = gradient_lorentz_norm(rearrange_radial(fn, n), n, idx)
    assert lhs >= rhs - 1e-6 * max(lhs, 1.0)


def test_polya_szego_equality_for_decreasing_radial():
    n = 3
    idx = LorentzIndex(3.5, 3.0)
    fn = RadialFunction(np.array([0.0, 0.7, 1.5, 2.0]), np.array([1.0, 0.8, 0.3, 0.0]))
    lhs = radial_gradient_lorentz_norm(fn, n, idx)
    rhs = gradient_lorentz_norm(rearrange_radial(fn, n), n, idx)
    assert rhs == pytest.approx(lhs, rel=1e-5)


# ---------------------------------------------------------------------------
# half-line view


def test_v_transform_recovers_halfline_extremal():
    n, beta, q = 3, 7.0, 2.5
    u = family_frac_pullback(n, beta, q)
    w, dw = family_frac_extremal(beta, q)
    v, dv = v_transform(u, n)
    r = np.geomspace(1e-3, 30.0, 50)
    np.testing.assert_allclose(v(r), w(r), rtol=1e-12)
    np.testing.assert_allclose(dv(r), dw(r), rtol=1e-10)


# ---------------------------------------------------------------------------
# validation and serialization


def test_constructor_rejections():
    with pytest.raises(ValueError):
        family_sharp(2.0, 1.0, 3.0)  # a >= R
    with pytest.raises(ValueError):
        family_mt(4, 3.0, {"a": 5.0, "T": 2.0})
    with pytest.raises(ValueError):
        family_cone(3, -1.0)
    with pytest.raises(ValueError):
        family_frac_extremal(2.0, 3.0)  # beta <= q
    with pytest.raises(ValueError):
        piecewise_linear_profile([1.0, 2.0], [0.5, 1.0])  # increasing values
    with pytest.raises(ValueError):
        piecewise_linear_profile([0.0, 2.0], [1.0, 0.0])  # t0 must be positive
    with pytest.raises(ValueError):
        RadialFunction(np.array([0.5, 1.0]), np.array([1.0, 0.0]))  # nodes start at 0
    with pytest.raises(ValueError):
        RadialFunction(np.array([0.0, 1.0]), np.array([1.0, 0.5]))  # no zero tail
    with pytest.raises(ValueError):
        SampledFunction(np.array([1.0, -0.5]), 1.0)


_ROUND_TRIP = [
    family_sharp(0.5, 20.0, 4.0),
    family_mt(4, 3.0, {"a": 1.0, "T": 55.0}),
    family_cone(3, 10.0),
    family_exp(0.8),
    family_frac_pullback(4, 9.0, 3.0),
    family_power_cutoff(5, 2.0),
    piecewise_linear_profile([0.5, 1.0, 4.0], [2.0, 1.5, 0.0]),
]


@pytest.mark.parametrize("u", _ROUND_TRIP, ids=lambda u: u.kind)
def test_serialization_round_trip(u):
    u = u.scaled(1.75)
    d = profile_to_dict(u)
    v = profile_from_dict(d)
    assert v.kind == u.kind and v.scale == u.scale
    hi = u.support_bound if math.isfinite(u.support_bound) else 100.0
    t = np.linspace(hi * 1e-6, hi * 1.01, 37)
    np.testing.assert_allclose(v(t), u(t), rtol=1e-14, atol=0.0)
    assert profile_to_dict(v) == d


def test_serialization_rejects_derived_profiles():
    star = maximal_function(family_exp())
    with pytest.raises(ValueError, match="not serializable"):
        profile_to_dict(star)
    with pytest.raises(ValueError, match="unknown profile kind"):
        profile_from_dict({"kind": "nope", "params": {}})
