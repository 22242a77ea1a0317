"""Executable table of the sharp inequalities: one checker per inequality.

Each checker evaluates both sides numerically and returns a
VerificationReport with a signed margin; run_battery assembles deterministic
suites of them.  Margins are compared on the q-th-power scale (the scale the
inequalities are stated on), and tolerances follow the integration error
estimates so a report never fails on quadrature noise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .constants import (
    LorentzIndex,
    check_dimension,
    frac_sobolev_constant,
    mt_exponent,
    poincare_constant,
    poincare_sobolev_constant,
    sphere_area,
    truncated_exp,
    unit_ball_volume,
    weighted_mt_exponent,
)
from .geometry import psi, sinh_power_lower_gap, surface_factor
from .profiles import (
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
    gradient_qnorm_error,
    lorentz_qnorm_error,
    maximal_function,
    profile_to_dict,
    radial_gradient_lorentz_norm,
    radialize,
    rearrange_radial,
    sampled_lorentz_qpower,
    v_transform,
)
from .quadrature import QuadratureConfig, integrate, integrate_piecewise

__all__ = [
    "VerificationReport",
    "SweepResult",
    "verify_poincare",
    "sharpness_sweep_poincare",
    "verify_key_estimate",
    "verify_poincare_sobolev",
    "verify_frac_sobolev",
    "verify_convexity_ineq",
    "verify_hardy_1d",
    "verify_maximal",
    "mt_functional",
    "verify_mt",
    "mt_lambda_sweep",
    "verify_abreu_scaling",
    "verify_pointwise_headbound",
    "run_battery",
    "BATTERY_SUITES",
]

_TOL_FLOOR = 1e-8


@dataclass(frozen=True)
class VerificationReport:
    """One checked inequality: pass iff margin >= -tolerance."""

    name: str
    params: dict
    lhs: float
    rhs: float
    margin: float
    error_estimate: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "error_estimate": self.error_estimate,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class SweepResult:
    abscissae: tuple[float, ...]
    ratios: tuple[float, ...]
    target: float

    def __post_init__(self) -> None:
        if len(self.abscissae) != len(self.ratios):
            raise ValueError("abscissae and ratios must have equal length")

    def rows(self) -> list[tuple[float, float, float]]:
        return [(x, r, self.target) for x, r in zip(self.abscissae, self.ratios)]


def _report(
    name: str,
    params: dict,
    lhs: float,
    rhs: float,
    err: float,
    floor: float = _TOL_FLOOR,
) -> VerificationReport:
    lhs = float(lhs)
    rhs = float(rhs)
    err = float(err)
    if not (math.isfinite(lhs) and math.isfinite(rhs) and math.isfinite(err)):
        params = dict(params)
        params["divergent"] = True
        return VerificationReport(name, params, lhs, rhs, -math.inf, math.inf, floor, False)
    tol = max(floor, 10.0 * err)
    margin = lhs - rhs
    return VerificationReport(name, params, lhs, rhs, margin, err, tol, margin >= -tol)


def _identity_report(
    name: str, params: dict, predicted: float, measured: float, err: float,
    floor: float = _TOL_FLOOR,
) -> VerificationReport:
    """Two-sided check: margin = -|predicted - measured|, stored sides kept."""
    if not (math.isfinite(predicted) and math.isfinite(measured)):
        params = dict(params)
        params["divergent"] = True
        return VerificationReport(
            name, params, float(predicted), float(measured), -math.inf, math.inf, floor, False
        )
    tol = max(floor, 10.0 * float(err))
    margin = -abs(predicted - measured)
    return VerificationReport(
        name, dict(params), float(predicted), float(measured), margin, float(err), tol, margin >= -tol
    )


def _profile_meta(u: MonotoneProfile) -> dict:
    try:
        return profile_to_dict(u)
    except ValueError:
        return {"kind": u.kind, "scale": u.scale}


# ---------------------------------------------------------------------------
# Poincare and its refinements


def _deficit(
    u: MonotoneProfile,
    n: int,
    idx: LorentzIndex,
    cfg: QuadratureConfig | None,
    cells: int,
) -> tuple[float, float, float]:
    """(‖grad u‖^q, C_poincare * ‖u‖^q, combined error)."""
    gq, e1 = gradient_qnorm_error(u, n, idx, cells=cells, cfg=cfg)
    nq, e2 = lorentz_qnorm_error(u, idx, cfg)
    c = poincare_constant(n, idx.p, idx.q)
    return gq, c * nq, e1 + c * e2


def verify_poincare(
    u: MonotoneProfile,
    n: int,
    idx: LorentzIndex,
    cfg: QuadratureConfig | None = None,
    cells: int = 4096,
) -> VerificationReport:
    """‖grad u‖_{p,q}^q >= ((n-1)/p)^q ‖u‖_{p,q}^q; strict for nonzero u."""
    check_dimension(n)
    if not idx.poincare_window():
        raise ValueError("need 1 < q <= p")
    lhs, rhs, err = _deficit(u, n, idx, cfg, cells)
    params = {"n": n, "p": idx.p, "q": idx.q, "profile": _profile_meta(u)}
    return _report("poincare", params, lhs, rhs, err)


def sharpness_sweep_poincare(
    n: int,
    idx: LorentzIndex,
    a: float,
    lnRa_grid: Sequence[float],
    cells: int = 8192,
    cfg: QuadratureConfig | None = None,
) -> SweepResult:
    """Rayleigh ratios ‖grad u‖^q/‖u‖^q of the near-extremal family.

    The caller picks the head volume a; choosing it with
    surface_ratio_volume(n, eps) keeps the surface factor within
    (1+eps)(n-1)t on the support, which is the regime where the ratio
    descends toward the sharp constant.
    """
    check_dimension(n)
    if not idx.poincare_window():
        raise ValueError("need 1 < q <= p")
    grid = [float(x) for x in lnRa_grid]
    if len(grid) == 0 or any(y <= x for x, y in zip(grid, grid[1:])):
        raise ValueError("lnRa grid must be nonempty and strictly increasing")
    if not a > 0.0:
        raise ValueError("a must be positive")
    ratios = []
    for x in grid:
        u = family_sharp(a, a * math.exp(x), idx.p)
        gq, _ = gradient_qnorm_error(u, n, idx, cells=cells, cfg=cfg)
        nq, _ = lorentz_qnorm_error(u, idx, cfg)
        ratios.append(gq / nq)
    return SweepResult(tuple(grid), tuple(ratios), poincare_constant(n, idx.p, idx.q))


def verify_key_estimate(
    u: MonotoneProfile,
    n: int,
    idx: LorentzIndex,
    cfg: QuadratureConfig | None = None,
    cells: int = 4096,
) -> VerificationReport:
    """Poincare deficit dominates the weighted Euclidean seminorm of v(r)=u*(sigma_n r^n)."""
    check_dimension(n)
    if n < 3 or not idx.key_estimate_window(n):
        raise ValueError("need n >= 3 and 2n/(n-1) <= q <= p")
    p, q = idx.p, idx.q
    gq, cnq, err_l = _deficit(u, n, idx, cfg, cells)
    lhs = gq - cnq

    sig = unit_ball_volume(n)
    _, dv = v_transform(u, n)
    power = n * q / p - 1.0

    def fn(r):
        return np.abs(dv(r)) ** q * r**power

    r_edges = [0.0] + [float((b / sig) ** (1.0 / n)) for b in u.breakpoints]
    if math.isfinite(u.support_bound):
        r_edges.append(float((u.support_bound / sig) ** (1.0 / n)))
    else:
        r_edges.append(math.inf)
    res = integrate_piecewise(fn, r_edges, cfg)
    rhs = n * sig ** (q / p) * res.value
    err = err_l + n * sig ** (q / p) * res.error_estimate
    params = {"n": n, "p": p, "q": q, "profile": _profile_meta(u)}
    return _report("key_estimate", params, lhs, rhs, err)


def verify_poincare_sobolev(
    u: MonotoneProfile,
    n: int,
    p: float,
    q: float,
    l: float,
    cfg: QuadratureConfig | None = None,
    cells: int = 4096,
) -> VerificationReport:
    """Poincare deficit dominates the (p*, l) Lorentz norm with the sharp constant."""
    check_dimension(n)
    idx = LorentzIndex(p, q)
    if n < 4 or not idx.ps_window(n):
        raise ValueError("need n >= 4 and 2n/(n-1) <= q <= p < n")
    if not (q <= l <= n * q / (n - p) + 1e-12):
        raise ValueError("need q <= l <= nq/(n-p)")
    gq, cnq, err_l = _deficit(u, n, idx, cfg, cells)
    lhs = gq - cnq

    pstar = n * p / (n - p)
    lval, lerr = lorentz_qnorm_error(u, LorentzIndex(pstar, l), cfg)
    s = poincare_sobolev_constant(n, p, q, l)
    rhs = s**q * lval ** (q / l)
    err = err_l + s**q * (q / l) * lval ** (q / l - 1.0) * lerr if lval > 0 else err_l
    params = {"n": n, "p": p, "q": q, "l": l, "profile": _profile_meta(u)}
    return _report("poincare_sobolev", params, lhs, rhs, err)


# ---------------------------------------------------------------------------
# half-line inequalities


def verify_frac_sobolev(
    w_pair: tuple[Callable, Callable],
    beta: float,
    q: float,
    cfg: QuadratureConfig | None = None,
) -> VerificationReport:
    """Weighted half-line Sobolev quotient dominates the sharp constant.

    quotient = int |w'|^q r^(beta-1) / (int w^(beta q/(beta-q)) r^(beta-1))^((beta-q)/beta)
    """
    beta = float(beta)
    q = float(q)
    if not beta > q or not q > 1.0:
        raise ValueError("need beta > q > 1")
    w, dw = w_pair

    def num(r):
        return np.abs(dw(r)) ** q * r ** (beta - 1.0)

    exp_den = beta * q / (beta - q)

    def den(r):
        return w(r) ** exp_den * r ** (beta - 1.0)

    res_n = integrate(num, 0.0, math.inf, cfg)
    res_d = integrate(den, 0.0, math.inf, cfg)
    params = {"beta": beta, "q": q}
    if not (res_n.converged and res_d.converged) or res_d.value <= 0.0:
        params["divergent"] = True
        return VerificationReport(
            "frac_sobolev", params, math.inf, math.inf, -math.inf, math.inf, _TOL_FLOOR, False
        )
    pw = (beta - q) / beta
    quotient = res_n.value / res_d.value**pw
    rel_err = res_n.error_estimate / res_n.value + pw * res_d.error_estimate / res_d.value
    return _report("frac_sobolev", params, quotient, frac_sobolev_constant(beta, q), quotient * rel_err)


def verify_convexity_ineq(a: float, b: float, q: float) -> VerificationReport:
    """(b-a)^q >= b^q + |a|^q - q a b^(q-1) for b >= max(a, 0), q >= 2."""
    a = float(a)
    b = float(b)
    q = float(q)
    if not (b >= 0.0 and b - a >= 0.0 and q >= 2.0):
        raise ValueError("need b >= 0, b - a >= 0, q >= 2")
    lhs = (b - a) ** q
    rhs = b**q + abs(a) ** q - q * a * b ** (q - 1.0)
    scale = max(1.0, lhs, b**q, abs(a) ** q, abs(q * a * b ** (q - 1.0)))
    err = 4e-16 * scale
    return _report(
        "convexity", {"a": a, "b": b, "q": q}, lhs, rhs, err, floor=1e-12 * scale
    )


def verify_hardy_1d(
    u: MonotoneProfile,
    n: int,
    idx: LorentzIndex,
    cfg: QuadratureConfig | None = None,
) -> VerificationReport:
    """int |(u*)'|^q t^(q+q/p-1) dt >= p^(-q) ‖u‖_{p,q}^q."""
    check_dimension(n)
    if not idx.key_estimate_window(n):
        raise ValueError("need 2n/(n-1) <= q <= p")
    p, q = idx.p, idx.q
    power = q + q / p - 1.0

    def fn(t):
        return np.abs(u.deriv(t)) ** q * t**power

    edges = [0.0] + [b for b in u.breakpoints if b < u.support_bound]
    edges.append(u.support_bound if math.isfinite(u.support_bound) else math.inf)
    res = integrate_piecewise(fn, edges, cfg)
    nq, e2 = lorentz_qnorm_error(u, idx, cfg)
    rhs = p ** (-q) * nq
    params = {"n": n, "p": p, "q": q, "profile": _profile_meta(u)}
    return _report("hardy_1d", params, res.value, rhs, res.error_estimate + p ** (-q) * e2)


def verify_maximal(
    u: MonotoneProfile,
    idx: LorentzIndex,
    cfg: QuadratureConfig | None = None,
) -> VerificationReport:
    """‖u**‖_{p,q} <= p/(p-1) ‖u‖_{p,q}, on the q-th-power scale."""
    p, q = idx.p, idx.q
    if not p > 1.0:
        raise ValueError("need p > 1")
    nq, e1 = lorentz_qnorm_error(u, idx, cfg)
    mq, e2 = lorentz_qnorm_error(maximal_function(u), idx, cfg)
    bound = (p / (p - 1.0)) ** q
    params = {"p": p, "q": q, "profile": _profile_meta(u)}
    return _report("maximal_bound", params, bound * nq, mq, bound * e1 + e2)


# ---------------------------------------------------------------------------
# Moser-Trudinger side


def _mt_integrand(u: MonotoneProfile, n: int, q: float):
    alpha = mt_exponent(n, q)
    ex = q / (q - 1.0)

    def fn(t):
        return truncated_exp(alpha * u(t) ** ex, n, q)

    return fn


def _mt_functional_error(
    u: MonotoneProfile, n: int, q: float, cfg: QuadratureConfig | None
) -> tuple[float, float]:
    check_dimension(n)
    idx = LorentzIndex(float(n), q)
    if not idx.mt_window(n):
        raise ValueError("need 2n/(n-1) <= q <= n")
    fn = _mt_integrand(u, n, q)
    edges = [0.0] + [b for b in u.breakpoints if b < u.support_bound]
    if math.isfinite(u.support_bound):
        edges.append(u.support_bound)
    else:
        T0 = max(1.0, edges[-1] if len(edges) > 1 else 1.0)
        x = [float(fn(np.array([T]))[0]) * T for T in (T0, 1e4 * T0, 1e8 * T0)]
        if x[0] > 0.0 and (x[1] > 0.5 * x[0] or x[2] > 0.5 * x[1]):
            return math.inf, math.inf
        edges.append(math.inf)

    total = 0.0
    err = 0.0
    if math.isfinite(edges[1]) and abs(float(u.deriv(edges[1] * 0.5))) == 0.0:
        # constant head: closed form, no quadrature
        total += edges[1] * float(fn(np.array([edges[1] * 0.5]))[0])
        edges = edges[1:]
    if len(edges) >= 2:
        res = integrate_piecewise(fn, edges, cfg)
        total += res.value
        err += res.error_estimate
    return total, err


def mt_functional(
    u: MonotoneProfile, n: int, q: float, cfg: QuadratureConfig | None = None
) -> float:
    """int_0^inf Phi(alpha_{n,q} u*(t)^(q/(q-1))) dt; inf when divergent."""
    val, _ = _mt_functional_error(u, n, q, cfg)
    return val


# Envelope constants, one per (n, q): calibrated once from the lambda=0 run
# of the default trial shape with 4x headroom, then frozen.
_MT_SHAPE_DEFAULT = {"a": 1.0, "T": math.exp(8.0)}
_MT_ENVELOPE: dict[tuple[int, float], float] = {(4, 3.0): 56.75786465315747}
_MT_HEADROOM = 4.0


def _mt_threshold(n: int, q: float) -> float:
    return ((n - 1.0) / n) ** q


def _normalized_scale(
    u: MonotoneProfile,
    n: int,
    q: float,
    lam: float,
    cfg: QuadratureConfig | None,
    cells: int,
) -> float:
    """c with ‖grad(cu)‖^q - lam ‖cu‖^q = 1, via q-homogeneity."""
    idx = LorentzIndex(float(n), q)
    gq, _ = gradient_qnorm_error(u, n, idx, cells=cells, cfg=cfg)
    nq, _ = lorentz_qnorm_error(u, idx, cfg)
    deficit = gq - lam * nq
    if deficit > 0.0:
        return deficit ** (-1.0 / q)
    # the deficit is positive for every nonzero profile below the threshold;
    # a bisection fallback guards against a pathological numerical estimate
    lo, hi = 1e-12, 1e12
    h = lambda c: c**q * (gq - lam * nq) - 1.0
    if h(hi) < 0.0:
        raise RuntimeError("profile cannot be normalized: deficit not positive")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return hi


def _mt_envelope_constant(
    n: int, q: float, cfg: QuadratureConfig | None = None, cells: int = 2048
) -> float:
    key = (n, float(q))
    cached = _MT_ENVELOPE.get(key)
    if cached is not None:
        return cached
    u = family_mt(n, q, _MT_SHAPE_DEFAULT)
    c = _normalized_scale(u, n, q, 0.0, cfg, cells)
    base, _ = _mt_functional_error(u.scaled(c), n, q, cfg)
    value = base * _mt_threshold(n, q) ** (n / q) * _MT_HEADROOM
    _MT_ENVELOPE[key] = value
    return value


def verify_mt(
    shape: dict,
    n: int,
    q: float,
    lam: float,
    cfg: QuadratureConfig | None = None,
    cells: int = 2048,
) -> VerificationReport:
    """Normalized trial functional stays under the envelope C (theta - lam)^(-n/q).

    The trial profile is scaled so ‖grad u‖^q - lam ‖u‖^q = 1; the raw
    functional value and the normalization scale are kept in params for
    trend analysis.
    """
    check_dimension(n)
    q = float(q)
    lam = float(lam)
    theta = _mt_threshold(n, q)
    if not lam < theta:
        raise ValueError(f"lambda must be below the threshold {theta}")
    if lam < 0.0:
        raise ValueError("lambda must be nonnegative")
    u0 = family_mt(n, q, shape)
    c = _normalized_scale(u0, n, q, lam, cfg, cells)
    val, err = _mt_functional_error(u0.scaled(c), n, q, cfg)
    envelope = _mt_envelope_constant(n, q, cfg, cells) * (theta - lam) ** (-n / q)
    params = {
        "n": n,
        "q": q,
        "lambda": lam,
        "threshold": theta,
        "shape": dict(shape),
        "normalization_scale": c,
        "functional": val,
    }
    return _report("mt_envelope", params, envelope, val, err)


def mt_lambda_sweep(
    n: int,
    q: float,
    lam_grid: Sequence[float],
    shape: dict | None = None,
    cfg: QuadratureConfig | None = None,
    cells: int = 2048,
) -> SweepResult:
    """Functional values along a lambda grid; target column is the envelope."""
    shape = dict(shape or _MT_SHAPE_DEFAULT)
    vals = []
    for lam in lam_grid:
        rep = verify_mt(shape, n, q, float(lam), cfg, cells)
        vals.append(rep.params["functional"])
    theta = _mt_threshold(n, q)
    return SweepResult(tuple(float(x) for x in lam_grid), tuple(vals), theta)


def verify_abreu_scaling(
    w_pair: tuple[Callable, Callable],
    alpha: float,
    n: int,
    tau: float,
    cfg: QuadratureConfig | None = None,
) -> VerificationReport:
    """Exact dilation identity of the exponential functional.

    With u_tau(r) = u(tau^(-1/alpha) r):
    int Phi(mu |u_tau|^(alpha/(alpha-1))) dlam_n = tau^(n/alpha) * the same for u,
    while the L^alpha_alpha gradient integral is invariant and the L^alpha_alpha
    mass scales by tau; the measured ratios are stored in params.
    margin = -|predicted - measured| (a two-sided identity, not a one-sided bound).
    """
    check_dimension(n)
    alpha = float(alpha)
    tau = float(tau)
    if not (2.0 <= alpha <= n):
        raise ValueError("need 2 <= alpha <= n")
    if not tau > 0.0:
        raise ValueError("tau must be positive")
    w, dw = w_pair
    mu = weighted_mt_exponent(alpha, float(n))
    ex = alpha / (alpha - 1.0)
    nsig = sphere_area(n)
    asig = alpha * unit_ball_volume(alpha)
    shrink = tau ** (-1.0 / alpha)

    def functional(scaled: bool):
        k = shrink if scaled else 1.0

        def fn(r):
            return truncated_exp(mu * w(k * r) ** ex, n, alpha) * nsig * r ** (n - 1.0)

        return integrate(fn, 0.0, math.inf, cfg)

    def alpha_integral(g, scaled: bool):
        k = shrink if scaled else 1.0

        def fn(r):
            return np.abs(g(k * r) * (k if g is dw else 1.0)) ** alpha * asig * r ** (alpha - 1.0)

        return integrate(fn, 0.0, math.inf, cfg)

    f0 = functional(False)
    f1 = functional(True)
    predicted = tau ** (n / alpha) * f0.value
    err = f1.error_estimate + tau ** (n / alpha) * f0.error_estimate
    g0 = alpha_integral(dw, False)
    g1 = alpha_integral(dw, True)
    m0 = alpha_integral(w, False)
    m1 = alpha_integral(w, True)
    params = {
        "alpha": alpha,
        "n": n,
        "tau": tau,
        "functional_ratio": f1.value / f0.value if f0.value else math.nan,
        "target_ratio": tau ** (n / alpha),
        "gradient_ratio": g1.value / g0.value if g0.value else math.nan,
        "mass_ratio": m1.value / m0.value if m0.value else math.nan,
    }
    rel_floor = _TOL_FLOOR * max(1.0, abs(predicted))
    return _identity_report("abreu_scaling", params, predicted, f1.value, err, floor=rel_floor)


def verify_pointwise_headbound(
    w: Callable,
    alpha: float,
    r_grid: Sequence[float] | None = None,
    cfg: QuadratureConfig | None = None,
) -> VerificationReport:
    """w(r)^alpha <= (int w^alpha dlam_alpha) / (sigma_alpha r^alpha) on a radius grid."""
    alpha = float(alpha)
    if not alpha >= 1.0:
        raise ValueError("need alpha >= 1")
    grid = np.geomspace(0.05, 50.0, 24) if r_grid is None else np.asarray(r_grid, dtype=float)
    vals = np.asarray(w(grid), dtype=float)
    if np.any(np.diff(vals) > 1e-12 * max(1.0, float(np.max(np.abs(vals))))):
        raise ValueError("w must be non-increasing")
    sig = unit_ball_volume(alpha)
    asig = alpha * sig

    def fn(r):
        return np.asarray(w(r), dtype=float) ** alpha * asig * r ** (alpha - 1.0)

    res = integrate(fn, 0.0, math.inf, cfg)
    bounds = res.value / (sig * grid**alpha)
    margins = bounds - vals**alpha
    i = int(np.argmin(margins))
    err = res.error_estimate / (sig * grid[i] ** alpha)
    params = {"alpha": alpha, "r": float(grid[i]), "mass": res.value}
    return _report("pointwise_headbound", params, float(bounds[i]), float(vals[i] ** alpha), err)


# ---------------------------------------------------------------------------
# batteries

BATTERY_SUITES = (
    "poincare",
    "key_estimate",
    "ps",
    "frac_sobolev",
    "mt",
    "rearrangement",
    "hardy",
    "geometry",
    "all",
)

_BATTERY_CELLS = 2048


def _battery_profiles(n: int, p: float, q: float) -> list[tuple[str, MonotoneProfile]]:
    """Twenty deterministic profiles spanning the families; norms finite at (p,q)."""
    out: list[tuple[str, MonotoneProfile]] = []
    rhos = (2.5, 3.0, 3.5, 4.0, 4.5, 5.0)
    lnras = (3.0, 5.0, 7.0, 9.0, 11.0, 13.0)
    for rho, lnra in zip(rhos, lnras):
        a = float(psi(n, rho))
        out.append((f"sharp[rho={rho},lnRa={lnra}]", family_sharp(a, a * math.exp(lnra), p)))
    for a, span in ((1.0, 4.0), (10.0, 6.0), (100.0, 8.0), (1000.0, 10.0)):
        out.append((f"mt[a={a},span={span}]", family_mt(n, q, {"a": a, "T": a * math.exp(span)})))
    for s in (1.0, 100.0, 1e4):
        out.append((f"cone[S={s}]", family_cone(n, s)))
    for delta in (0.15, 0.3, 0.6, 1.0):
        beta = q + n * (q - 1.0) * (1.0 / p + delta)
        out.append((f"frac_pullback[beta={beta:.3g}]", family_frac_pullback(n, beta, q)))
    for k in (1.0, 2.0):
        out.append((f"power_cutoff[k={k}]", family_power_cutoff(n, k)))
    out.append(("exp[rate=1]", family_exp(1.0)))
    return out


def _random_two_bump(rng: np.random.Generator) -> RadialFunction:
    m = int(rng.integers(8, 14))
    interior = np.sort(rng.uniform(0.08, 2.9, m))
    nodes = np.concatenate([[0.0], interior, [3.0]])
    c1, c2 = rng.uniform(0.3, 1.2), rng.uniform(1.6, 2.6)
    w1, w2 = rng.uniform(0.15, 0.5, 2)
    a1, a2 = rng.uniform(0.4, 1.5, 2)
    vals = a1 * np.exp(-(((nodes - c1) / w1) ** 2)) + a2 * np.exp(-(((nodes - c2) / w2) ** 2))
    vals[-1] = 0.0
    return RadialFunction(nodes, vals)


def _suite_poincare(n, p, q, lam, l, seed, cfg):
    idx = LorentzIndex(p, q)
    thunks = [
        (lambda u=u: verify_poincare(u, n, idx, cfg, cells=_BATTERY_CELLS))
        for _, u in _battery_profiles(n, p, q)
    ]
    zero = family_sharp(1.0, 10.0, p).scaled(0.0)
    thunks.append(lambda: verify_poincare(zero, n, idx, cfg, cells=_BATTERY_CELLS))
    return thunks


def _suite_key_estimate(n, p, q, lam, l, seed, cfg):
    idx = LorentzIndex(p, q)
    return [
        (lambda u=u: verify_key_estimate(u, n, idx, cfg, cells=_BATTERY_CELLS))
        for _, u in _battery_profiles(n, p, q)
    ]


def _suite_ps(n, p, q, lam, l, seed, cfg):
    if l is None:
        l_hi = n * q / (n - p)
        l_grid = (q, 0.5 * (q + l_hi), l_hi)
    else:
        l_grid = (l,)
    thunks = []
    for lv in l_grid:
        for _, u in _battery_profiles(n, p, q):
            thunks.append(
                lambda u=u, lv=lv: verify_poincare_sobolev(
                    u, n, p, q, lv, cfg, cells=_BATTERY_CELLS
                )
            )
    return thunks


def _suite_frac_sobolev(n, p, q, lam, l, seed, cfg):
    anchors = ((4.0, 2.0), (6.0, 3.0), (10.0, 2.5))
    thunks = []
    for beta, qq in anchors:
        thunks.append(lambda b=beta, qq=qq: verify_frac_sobolev(family_frac_extremal(b, qq), b, qq, cfg))
    for beta, qq in anchors:
        w, dw = family_frac_extremal(beta, qq)
        gam = 1.05
        pert = (
            lambda r, w=w: w(r) ** gam,
            lambda r, w=w, dw=dw: gam * w(r) ** (gam - 1.0) * dw(r),
        )
        thunks.append(lambda pr=pert, b=beta, qq=qq: verify_frac_sobolev(pr, b, qq, cfg))
    return thunks


def _suite_mt(n, p, q, lam, l, seed, cfg):
    theta = _mt_threshold(n, q)
    grid = (0.0, 0.2, 0.3) if lam is None else (lam,)
    grid = tuple(g for g in grid if g < theta)
    shape = dict(_MT_SHAPE_DEFAULT)
    thunks = [lambda g=g: verify_mt(shape, n, q, g, cfg, cells=_BATTERY_CELLS) for g in grid]

    def monotone_pair(g1, g2):
        r1 = verify_mt(shape, n, q, g1, cfg, cells=_BATTERY_CELLS)
        r2 = verify_mt(shape, n, q, g2, cfg, cells=_BATTERY_CELLS)
        params = {"n": n, "q": q, "lambda_low": g1, "lambda_high": g2}
        return _report(
            "mt_monotone_in_lambda",
            params,
            r2.params["functional"],
            r1.params["functional"],
            r1.error_estimate + r2.error_estimate,
        )

    for g1, g2 in zip(grid, grid[1:]):
        thunks.append(lambda g1=g1, g2=g2: monotone_pair(g1, g2))

    def slope_reports():
        sweep = mt_lambda_sweep(n, q, grid, shape, cfg, cells=_BATTERY_CELLS)
        x = np.array([-math.log(theta - g) for g in sweep.abscissae])
        y = np.log(np.array(sweep.ratios))
        slope = float(np.polyfit(x, y, 1)[0]) if len(x) > 1 else 0.0
        cap = 1.5 * n / q
        params = {"n": n, "q": q, "grid": list(sweep.abscissae), "slope": slope}
        return [
            _report("mt_slope_lower", params, slope, 0.0, 1e-12, floor=1e-9),
            _report("mt_slope_upper", params, cap, slope, 1e-12, floor=1e-9),
        ]

    gauss = (lambda r: np.exp(-(r**2)), lambda r: -2.0 * r * np.exp(-(r**2)))
    abreu_alpha = max(2.0, min(float(q), float(n)))
    for tau in (1.0, 2.0, 10.0):
        thunks.append(lambda tau=tau: verify_abreu_scaling(gauss, 2.0, n, tau, cfg))
        if abreu_alpha != 2.0:
            thunks.append(lambda tau=tau: verify_abreu_scaling(gauss, abreu_alpha, n, tau, cfg))
    w_head = lambda r: (1.0 + r**2) ** (-3.0)
    thunks.append(lambda: verify_pointwise_headbound(w_head, 2.0, cfg=cfg))
    thunks.append(lambda: verify_pointwise_headbound(gauss[0], 2.0, cfg=cfg))

    return thunks + [slope_reports]


def _suite_rearrangement(n, p, q, lam, l, seed, cfg):
    rng = np.random.default_rng(seed)
    thunks = []

    # Hardy-Littlewood on random sampled functions, against full enumeration
    from itertools import permutations

    def hl_instance(values, cell, pp, qq):
        idx = LorentzIndex(pp, qq)
        sf = SampledFunction(values, cell)
        sorted_val = sampled_lorentz_qpower(decreasing_rearrangement(sf), idx)
        plain = sampled_lorentz_qpower(sf, idx)
        best = plain
        for perm in permutations(range(values.size)):
            cand = sampled_lorentz_qpower(SampledFunction(values[list(perm)], cell), idx)
            if cand > best:
                best = cand
        err = 1e-14 * max(1.0, sorted_val)
        params = {"p": pp, "q": qq, "size": int(values.size)}
        return _identity_report("hl_vs_enumeration", params, sorted_val, best, err)

    for _ in range(12):
        size = int(rng.integers(3, 7))
        values = rng.uniform(0.0, 3.0, size)
        cell = float(rng.uniform(0.2, 2.0))
        pp = float(rng.uniform(2.0, 6.0))
        qq = float(rng.uniform(1.1, pp - 0.5))
        thunks.append(lambda v=values, c=cell, pp=pp, qq=qq: hl_instance(v, c, pp, qq))

    # radial Polya-Szego on two-bump functions
    def ps_instance(fn, nn, pp, qq):
        idx = LorentzIndex(pp, qq)
        direct = radial_gradient_lorentz_norm(fn, nn, idx, cells=_BATTERY_CELLS)
        rearranged = rearrange_radial(fn, nn)
        after = gradient_qnorm_error(rearranged, nn, idx, cells=_BATTERY_CELLS, cfg=cfg)[0] ** (
            1.0 / qq
        )
        params = {"n": nn, "p": pp, "q": qq, "nodes": int(fn.nodes.size)}
        return _report("polya_szego_radial", params, direct, after, 1e-6 / 10.0, floor=1e-6)

    for _ in range(8):
        nn = int(rng.integers(2, 5))
        pp = float(rng.uniform(2.0, 5.0))
        qq = float(rng.uniform(1.1, pp))
        thunks.append(lambda f=_random_two_bump(rng), nn=nn, pp=pp, qq=qq: ps_instance(f, nn, pp, qq))

    # equimeasurability identity through radialize -> rearrange
    def identity_instance(u, nn, pp, qq, m):
        idx = LorentzIndex(pp, qq)
        nq1, e1 = lorentz_qnorm_error(u, idx, cfg)
        nq2, e2 = lorentz_qnorm_error(rearrange_radial(radialize(u, nn, m), nn), idx, cfg)
        params = {"n": nn, "p": pp, "q": qq, "profile": _profile_meta(u)}
        return _identity_report("rearrangement_identity", params, nq1, nq2, e1 + e2)

    thunks.append(lambda: identity_instance(family_cone(n, 50.0), n, p, q, 64))

    # maximal-function inequality over the shared battery
    idx = LorentzIndex(p, q)
    for _, u in _battery_profiles(n, p, q)[::2]:
        thunks.append(lambda u=u: verify_maximal(u, idx, cfg))
    return thunks


def _suite_hardy(n, p, q, lam, l, seed, cfg):
    idx = LorentzIndex(p, q)
    return [
        (lambda u=u: verify_hardy_1d(u, n, idx, cfg))
        for _, u in _battery_profiles(n, p, q)
    ]


def _suite_geometry(n, p, q, lam, l, seed, cfg):
    thunks = []

    def estf_report(nn):
        t = np.geomspace(1e-6, 1e8, 1000)
        rel = (surface_factor(nn, t) - (nn - 1.0) * t) / ((nn - 1.0) * t)
        i = int(np.argmin(rel))
        params = {"n": nn, "grid": "1e-6..1e8 (1000 log pts)", "argmin_t": float(t[i])}
        return _report("perimeter_dominates", params, float(rel[i]), 0.0, 1e-13, floor=1e-12)

    def ratio_monotone_report(nn):
        t = np.geomspace(1e-6, 1e8, 400)
        ratio = surface_factor(nn, t) / t
        worst = float(np.max(np.diff(ratio) / ratio[:-1]))
        params = {"n": nn}
        return _report("perimeter_ratio_decreasing", params, 0.0, worst, 1e-13, floor=1e-12)

    def limit_report(nn):
        ratio = float(surface_factor(nn, 1e8)) / 1e8
        dev = abs(ratio - (nn - 1.0)) / (nn - 1.0)
        params = {"n": nn, "t": 1e8, "ratio": ratio}
        return _report("perimeter_ratio_limit", params, 1e-3, dev, 1e-12, floor=1e-12)

    def gap_report(nn, qq):
        t = np.geomspace(1e-6, 1e10, 200)
        gap = sinh_power_lower_gap(nn, qq, t)
        scale = (t / unit_ball_volume(nn)) ** (qq * (nn - 1.0) / nn)
        rel = gap / np.maximum(scale, 1e-300)
        i = int(np.argmin(rel))
        params = {"n": nn, "q": qq, "argmin_t": float(t[i])}
        return _report("sinh_power_lower_gap", params, float(rel[i]), 0.0, 1e-13, floor=1e-12)

    for nn in range(2, 7):
        thunks.append(lambda nn=nn: estf_report(nn))
        thunks.append(lambda nn=nn: ratio_monotone_report(nn))
        thunks.append(lambda nn=nn: limit_report(nn))
    for nn, qq in ((3, 3.0), (3, 4.0), (4, 8.0 / 3.0), (4, 3.0), (5, 2.5), (6, 2.4)):
        thunks.append(lambda nn=nn, qq=qq: gap_report(nn, qq))
    return thunks


_SUITES = {
    "poincare": _suite_poincare,
    "key_estimate": _suite_key_estimate,
    "ps": _suite_ps,
    "frac_sobolev": _suite_frac_sobolev,
    "mt": _suite_mt,
    "rearrangement": _suite_rearrangement,
    "hardy": _suite_hardy,
    "geometry": _suite_geometry,
}


def run_battery(
    suite: str,
    n: int = 4,
    p: float = 3.5,
    q: float = 3.0,
    l: float | None = None,
    lam: float | None = None,
    seed: int = 20240801,
    threads: int | None = None,
    rel_tol: float | None = None,
) -> list[VerificationReport]:
    """Run one named suite (or "all"); deterministic order, fixed seeds."""
    if suite not in BATTERY_SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {BATTERY_SUITES}")
    cfg = QuadratureConfig(rel_tol=rel_tol) if rel_tol is not None else None
    names = [s for s in BATTERY_SUITES if s != "all"] if suite == "all" else [suite]
    thunks = []
    for name in names:
        thunks.extend(_SUITES[name](n, p, q, lam, l, seed, cfg))

    if threads is None or threads <= 1:
        results = [t() for t in thunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda t: t(), thunks))
    reports: list[VerificationReport] = []
    for r in results:
        if isinstance(r, VerificationReport):
            reports.append(r)
        else:
            reports.extend(r)
    return reports
