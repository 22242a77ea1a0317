"""Radial profiles on hyperbolic space and their Lorentz norms.

Everything is phrased through the non-increasing rearrangement: a profile is
a function of the volume variable t = V(B(0, rho)), a Lorentz norm is a
one-dimensional weighted integral of it, and the gradient norm of a radial
function is the weighted norm of U(s) = -(u*)'(s) * surface_factor(n, s)
after decreasing rearrangement.  Profiles are immutable; derivative and
cumulative-integral closures are attached at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .constants import LorentzIndex, check_dimension, sphere_area, unit_ball_volume
from .geometry import psi, psi_inverse, surface_factor
from .quadrature import (
    QuadratureConfig,
    integrate,
    integrate_piecewise,
    _WK,
    _XK,
)

__all__ = [
    "MonotoneProfile",
    "RadialFunction",
    "SampledFunction",
    "family_sharp",
    "family_mt",
    "family_cone",
    "family_exp",
    "family_frac_pullback",
    "family_power_cutoff",
    "family_frac_extremal",
    "piecewise_linear_profile",
    "lorentz_norm",
    "lorentz_qnorm_error",
    "gradient_profile",
    "gradient_lorentz_norm",
    "gradient_qnorm_error",
    "maximal_function",
    "decreasing_rearrangement",
    "sampled_lorentz_qpower",
    "rearrange_radial",
    "radialize",
    "radial_gradient_lorentz_norm",
    "v_transform",
    "profile_to_dict",
    "profile_from_dict",
]


def _vec(fn):
    """Wrap a vectorized closure so scalars in give floats out."""

    def call(t):
        arr = np.asarray(t, dtype=float)
        out = fn(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out

    return call


@dataclass(frozen=True)
class MonotoneProfile:
    """A non-increasing profile u*(t) on (0, inf) vanishing at infinity.

    ``breakpoints`` are the interior knots between which the profile is
    smooth; quadrature segments never straddle them.  ``support_bound`` is
    the measure of the support (may be inf).  The private closures are
    unscaled; ``scale`` multiplies evaluation, derivative and cumulative
    integral alike, so rescaling is exact.
    """

    kind: str
    support_bound: float
    breakpoints: tuple[float, ...]
    scale: float = 1.0
    params: dict | None = None
    fn: Callable[[np.ndarray], np.ndarray] | None = None
    dfn: Callable[[np.ndarray], np.ndarray] | None = None
    cum: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if not self.support_bound > 0.0:
            raise ValueError("support_bound must be positive")
        if self.scale < 0.0 or not math.isfinite(self.scale):
            raise ValueError("scale must be finite and nonnegative")
        bps = tuple(float(b) for b in self.breakpoints)
        if any(v >= w for v, w in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if bps and (bps[0] <= 0.0 or bps[-1] > self.support_bound):
            raise ValueError("breakpoints must lie in (0, support_bound]")

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = self.scale * self.fn(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out

    def deriv(self, t):
        arr = np.asarray(t, dtype=float)
        out = self.scale * self.dfn(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out

    def cumulative(self, t):
        if self.cum is None:
            raise ValueError(f"profile kind {self.kind!r} has no closed cumulative")
        arr = np.asarray(t, dtype=float)
        out = self.scale * self.cum(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out

    def scaled(self, c: float) -> "MonotoneProfile":
        c = float(c)
        if c < 0.0 or not math.isfinite(c):
            raise ValueError("scale factor must be finite and nonnegative")
        return replace(self, scale=self.scale * c)

    def head_value(self) -> float:
        t0 = self.support_bound * 1e-15 if math.isfinite(self.support_bound) else 1e-15
        return float(self(t0))


@dataclass(frozen=True)
class RadialFunction:
    """Piecewise-linear radial function rho -> phi(rho), compact support."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if nodes.ndim != 1 or nodes.shape != values.shape or nodes.size < 2:
            raise ValueError("need matching 1-d nodes/values with at least two points")
        if nodes[0] != 0.0 or np.any(np.diff(nodes) <= 0.0):
            raise ValueError("nodes must start at 0 and increase strictly")
        if np.any(values < 0.0) or values[-1] != 0.0:
            raise ValueError("values must be nonnegative with a zero tail node")

    def __call__(self, rho):
        return np.interp(rho, self.nodes, self.values, left=self.values[0], right=0.0)


@dataclass(frozen=True)
class SampledFunction:
    """Cell-sampled nonnegative function; every cell has the same measure."""

    values: np.ndarray
    cell_measure: float

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a nonempty 1-d array")
        if np.any(values < 0.0) or not np.all(np.isfinite(values)):
            raise ValueError("values must be finite and nonnegative")
        if not self.cell_measure > 0.0:
            raise ValueError("cell_measure must be positive")


# ---------------------------------------------------------------------------
# closed-form families


def family_sharp(a: float, R: float, p: float) -> MonotoneProfile:
    """Three-branch near-extremal profile: flat head, t^(-1/p) body, linear cut.

    a^(-1/p) on (0,a), t^(-1/p) on [a,R), R^(-1/p)(2-t/R) on [R,2R), 0 after.
    """
    a = float(a)
    R = float(R)
    p = float(p)
    if not (0.0 < a < R) or not math.isfinite(R) or not p > 1.0:
        raise ValueError("need 0 < a < R < inf and p > 1")
    inv = -1.0 / p
    head = a**inv
    cut = R**inv

    def fn(t):
        out = np.zeros_like(t)
        m = t < a
        out[m] = head
        m = (t >= a) & (t < R)
        out[m] = t[m] ** inv
        m = (t >= R) & (t < 2.0 * R)
        out[m] = cut * (2.0 - t[m] / R)
        return out

    def dfn(t):
        out = np.zeros_like(t)
        m = (t >= a) & (t < R)
        out[m] = inv * t[m] ** (inv - 1.0)
        m = (t >= R) & (t < 2.0 * R)
        out[m] = -cut / R
        return out

    pp = 1.0 + inv  # 1 - 1/p
    body = lambda t: (t**pp - a**pp) / pp
    cum_a = head * a
    cum_R = cum_a + body(R)
    cum_all = cum_R + cut * R / 2.0

    def cum(t):
        out = np.full_like(t, cum_all)
        m = t < a
        out[m] = head * t[m]
        m = (t >= a) & (t < R)
        out[m] = cum_a + body(t[m])
        m = (t >= R) & (t < 2.0 * R)
        x = t[m] / R
        out[m] = cum_R + cut * R * (2.0 * (x - 1.0) - 0.5 * (x * x - 1.0))
        return out

    return MonotoneProfile(
        kind="sharp",
        support_bound=2.0 * R,
        breakpoints=(a, R),
        params={"a": a, "R": R, "p": p},
        fn=fn,
        dfn=dfn,
        cum=cum,
    )


def family_mt(n: int, q: float, shape: dict) -> MonotoneProfile:
    """Trial profile for the exponential-integrability functional.

    Constant 1 on (0,a], then log decay ln(T/t)/ln(T/a) down to 0 at T.
    Normalization to a gradient constraint happens at the caller.
    """
    check_dimension(n)
    q = float(q)
    a = float(shape["a"])
    T = float(shape["T"])
    if not (0.0 < a < T):
        raise ValueError("need 0 < a < T")
    if not q > 1.0:
        raise ValueError("need q > 1")
    den = math.log(T / a)

    def fn(t):
        out = np.zeros_like(t)
        m = t <= a
        out[m] = 1.0
        m = (t > a) & (t < T)
        out[m] = np.log(T / t[m]) / den
        return out

    def dfn(t):
        out = np.zeros_like(t)
        m = (t > a) & (t < T)
        out[m] = -1.0 / (t[m] * den)
        return out

    def cum(t):
        out = np.zeros_like(t)
        m = t <= a
        out[m] = t[m]
        m = (t > a) & (t < T)
        x = t[m]
        out[m] = a + (x * (np.log(T / x) + 1.0) - a * (den + 1.0)) / den
        m = t >= T
        out[m] = a + (T - a * (den + 1.0)) / den
        return out

    return MonotoneProfile(
        kind="mt",
        support_bound=T,
        breakpoints=(a,),
        params={"n": float(n), "q": q, "a": a, "T": T},
        fn=fn,
        dfn=dfn,
        cum=cum,
    )


def family_cone(n: int, S: float) -> MonotoneProfile:
    """Profile whose gradient field is exactly 1 on (0,S): u*(t) = F(S)-F(t).

    (u*)'(t) = -1/surface_factor(n,t), so U(s) = 1 there; both gradient-norm
    code paths have the closed form ((p/q) S^(q/p))^(1/q) to compare against.
    """
    check_dimension(n)
    S = float(S)
    if not S > 0.0:
        raise ValueError("S must be positive")
    top = float(psi_inverse(n, S))

    def fn(t):
        out = np.zeros_like(t)
        m = t < S
        out[m] = top - psi_inverse(n, t[m])
        return out

    def dfn(t):
        out = np.zeros_like(t)
        m = t < S
        out[m] = -1.0 / surface_factor(n, t[m])
        return out

    return MonotoneProfile(
        kind="cone",
        support_bound=S,
        breakpoints=(),
        params={"n": float(n), "S": S},
        fn=fn,
        dfn=dfn,
    )


def family_exp(rate: float = 1.0) -> MonotoneProfile:
    """u*(t) = exp(-rate t); the (p,p) norm has a Gamma-integral closed form."""
    rate = float(rate)
    if not rate > 0.0:
        raise ValueError("rate must be positive")

    return MonotoneProfile(
        kind="exp",
        support_bound=math.inf,
        breakpoints=(),
        params={"rate": rate},
        fn=lambda t: np.exp(-rate * t),
        dfn=lambda t: -rate * np.exp(-rate * t),
        cum=lambda t: -np.expm1(-rate * t) / rate,
    )


def family_frac_pullback(n: int, beta: float, q: float) -> MonotoneProfile:
    """Half-line extremal (1+r^(q/(q-1)))^(-(beta-q)/q) read in the volume variable.

    u*(t) = w((t/sigma_n)^(1/n)); decays like t^(-(beta-q)/(n(q-1))), so the
    caller picks beta large enough for the norms it needs.
    """
    check_dimension(n)
    w, dw = family_frac_extremal(beta, q)
    sig = unit_ball_volume(n)

    def fn(t):
        return w((t / sig) ** (1.0 / n))

    def dfn(t):
        r = (t / sig) ** (1.0 / n)
        return dw(r) / (n * sig * r ** (n - 1.0))

    return MonotoneProfile(
        kind="frac_pullback",
        support_bound=math.inf,
        breakpoints=(sig,),
        params={"n": float(n), "beta": float(beta), "q": float(q)},
        fn=fn,
        dfn=dfn,
    )


def family_power_cutoff(n: int, k: float = 1.0) -> MonotoneProfile:
    """Pullback of the radial cutoff (1 - r^k)_+ ; k=1 is the linear cutoff."""
    check_dimension(n)
    k = float(k)
    if not k > 0.0:
        raise ValueError("k must be positive")
    sig = unit_ball_volume(n)
    e = k / n

    def fn(t):
        out = np.zeros_like(t)
        m = t < sig
        out[m] = 1.0 - (t[m] / sig) ** e
        return out

    def dfn(t):
        out = np.zeros_like(t)
        m = t < sig
        out[m] = -(e / sig) * (t[m] / sig) ** (e - 1.0)
        return out

    def cum(t):
        x = np.clip(t / sig, 0.0, 1.0)
        return sig * (x - x ** (e + 1.0) / (e + 1.0))

    return MonotoneProfile(
        kind="power_cutoff",
        support_bound=sig,
        breakpoints=(),
        params={"n": float(n), "k": k},
        fn=fn,
        dfn=dfn,
        cum=cum,
    )


def family_frac_extremal(beta: float, q: float):
    """Equality case of the weighted half-line Sobolev inequality: (w, w')."""
    beta = float(beta)
    q = float(q)
    if not beta > q or not q > 1.0:
        raise ValueError("need beta > q > 1")
    s = q / (q - 1.0)
    m = (beta - q) / q

    def w(r):
        r = np.asarray(r, dtype=float)
        return (1.0 + r**s) ** (-m)

    def dw(r):
        r = np.asarray(r, dtype=float)
        return -m * s * r ** (s - 1.0) * (1.0 + r**s) ** (-m - 1.0)

    return w, dw


def piecewise_linear_profile(ts: Sequence[float], us: Sequence[float]) -> MonotoneProfile:
    """Profile linear between (t_i, u_i) nodes, constant u_0 before t_0, 0 after t_last."""
    t = np.asarray(ts, dtype=float)
    u = np.asarray(us, dtype=float)
    if t.ndim != 1 or t.shape != u.shape or t.size < 2:
        raise ValueError("need matching 1-d arrays with at least two nodes")
    if t[0] <= 0.0 or np.any(np.diff(t) <= 0.0):
        raise ValueError("node abscissae must be positive and strictly increasing")
    if np.any(u < 0.0) or np.any(np.diff(u) > 0.0) or u[-1] != 0.0:
        raise ValueError("node values must be nonnegative, non-increasing, ending at 0")

    slopes = np.diff(u) / np.diff(t)
    # trapezoid antiderivative at the nodes; head contributes u_0 * t_0
    areas = np.concatenate([[u[0] * t[0]], 0.5 * (u[:-1] + u[1:]) * np.diff(t)])
    node_cum = np.cumsum(areas)

    def fn(x):
        return np.interp(x, t, u, left=u[0], right=0.0)

    def dfn(x):
        out = np.zeros_like(x)
        inside = (x > t[0]) & (x < t[-1])
        seg = np.searchsorted(t, x[inside], side="right") - 1
        out[inside] = slopes[seg]
        return out

    def cum(x):
        out = np.full_like(x, node_cum[-1])
        m = x <= t[0]
        out[m] = u[0] * x[m]
        mid = (x > t[0]) & (x < t[-1])
        xi = x[mid]
        seg = np.searchsorted(t, xi, side="right") - 1
        dt = xi - t[seg]
        out[mid] = node_cum[seg] + u[seg] * dt + 0.5 * slopes[seg] * dt * dt
        return out

    return MonotoneProfile(
        kind="piecewise_linear",
        support_bound=float(t[-1]),
        breakpoints=tuple(float(v) for v in t[:-1]),
        params={"nodes_t": [float(v) for v in t], "nodes_u": [float(v) for v in u]},
        fn=fn,
        dfn=dfn,
        cum=cum,
    )


# ---------------------------------------------------------------------------
# norms


def _tail_decays(u: MonotoneProfile, p: float) -> bool:
    """Sniff u*(t) t^(1/p) -> 0 along a geometric tail; False means divergent.

    Only the far step must halve: the first step may still sit in a
    pre-asymptotic transient for slowly decaying profiles.
    """
    T0 = max(1.0, u.breakpoints[-1] if u.breakpoints else 1.0)
    x = [float(u(T)) * T ** (1.0 / p) for T in (T0, 1e4 * T0, 1e8 * T0)]
    if x[0] == 0.0:
        return True
    return x[2] <= 0.5 * x[1] and x[1] <= 1.05 * x[0]


def _norm_edges(u: MonotoneProfile) -> tuple[list[float], bool]:
    edges = [0.0] + [b for b in u.breakpoints if b < u.support_bound]
    if math.isfinite(u.support_bound):
        edges.append(u.support_bound)
        return edges, False
    edges.append(math.inf)
    return edges, True


def lorentz_qnorm_error(
    u: MonotoneProfile, idx: LorentzIndex, cfg: QuadratureConfig | None = None
) -> tuple[float, float]:
    """(‖u‖_{p,q}^q, error estimate); (inf, inf) when the integral diverges."""
    p, q = idx.p, idx.q
    edges, infinite_tail = _norm_edges(u)
    if infinite_tail and not _tail_decays(u, p):
        return math.inf, math.inf
    qp = q / p

    def fn(t):
        return u(t) ** q * t ** (qp - 1.0)

    head = qp if qp < 1.0 else None
    res = integrate_piecewise(fn, edges, cfg, head_exponent=head)
    return res.value, res.error_estimate


def lorentz_norm(
    u: MonotoneProfile, idx: LorentzIndex, cfg: QuadratureConfig | None = None
) -> float:
    """Lorentz quasi-norm ‖u‖_{p,q}; inf when divergent."""
    val, _ = lorentz_qnorm_error(u, idx, cfg)
    if not math.isfinite(val):
        return math.inf
    return val ** (1.0 / idx.q)


# ---------------------------------------------------------------------------
# gradient


@dataclass(frozen=True)
class GradientField:
    """U(s) with U(V(B(0,rho))) = |grad u| for the radial function behind u*."""

    n: int
    support_bound: float
    breakpoints: tuple[float, ...]
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        out = self.fn(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out


def _check_abs_continuous(u: MonotoneProfile) -> None:
    S = u.support_bound
    if not math.isfinite(S):
        return
    near = float(u(S * (1.0 - 1e-9)))
    mid = float(u(S * 0.5))
    if near > 1e-4 * mid:
        raise ValueError(
            "profile does not vanish continuously at its support bound; "
            "the distributional gradient is not a function"
        )


def gradient_profile(u: MonotoneProfile, n: int) -> GradientField:
    """U(s) = -(u*)'(s) * surface_factor(n, s) on (0, support_bound)."""
    check_dimension(n)
    _check_abs_continuous(u)
    S = u.support_bound

    def fn(s):
        out = np.zeros_like(s)
        m = (s > 0.0) & (s < S)
        if np.any(m):
            out[m] = -u.deriv(s[m]) * surface_factor(n, s[m])
        return out

    return GradientField(n=n, support_bound=S, breakpoints=u.breakpoints, fn=fn)


def _probe_grid(U: GradientField, count: int = 257) -> np.ndarray:
    S = U.support_bound
    hi = S * (1.0 - 1e-9) if math.isfinite(S) else max(1.0, *(U.breakpoints or (1.0,))) * 1e6
    lo = hi * 1e-12
    ts = np.geomspace(lo, hi, count)
    extra = []
    for b in U.breakpoints:
        if lo < b < hi:
            extra.extend([b * (1.0 - 1e-9), b * (1.0 + 1e-9)])
    if extra:
        ts = np.sort(np.concatenate([ts, extra]))
    return ts

def _is_monotone(U: GradientField) -> bool:
    ts = _probe_grid(U)
    vals = U(ts)
    slack = 1e-10 * float(np.max(vals)) if np.any(vals > 0) else 0.0
    return bool(np.all(np.diff(vals) <= slack))


def _weighted_sorted_qnorm(values: np.ndarray, widths: np.ndarray, p: float, q: float) -> float:
    """Exact (p,q)-qnorm of the step function given by (values, cell widths)."""
    order = np.argsort(-values, kind="stable")
    v = values[order]
    w = widths[order]
    T = np.cumsum(w)
    qp = q / p
    steps = T**qp
    steps[1:] = steps[1:] - T[:-1] ** qp
    return float(np.sum(v**q * (p / q) * steps))


def _sorted_cells(
    U: GradientField, cells: int, p: float, q: float
) -> tuple[np.ndarray, np.ndarray, float]:
    """Cell midpoint values and widths on a log grid, plus a tail-loss bound.

    For infinite support the grid stops once x(t) = U(t) t^(1/p) has dropped
    six orders below its peak; the dropped remainder is bounded through the
    measured per-decade decay rate of x (infinite when x fails to decay, the
    caller's divergence signal).
    """
    S = U.support_bound
    bps = [b for b in U.breakpoints if 0.0 < b < S]
    t_ref = min([1.0] + bps)
    tail = 0.0
    if math.isfinite(S):
        t_hi = S
    else:
        t_hi = max(1.0, *(bps or (1.0,)))
        probe = _probe_grid(U)
        x_pk = float(np.max(U(probe) * probe ** (1.0 / p)))
        if x_pk > 0.0:
            while float(U(t_hi)) * t_hi ** (1.0 / p) > 1e-6 * x_pk and t_hi < 1e60:
                t_hi *= 10.0
            x0 = float(U(t_hi)) * t_hi ** (1.0 / p)
            x1 = float(U(10.0 * t_hi)) * (10.0 * t_hi) ** (1.0 / p)
            if x0 > 0.0:
                r = x1 / x0
                if r >= 0.95 or float(U(10.0 * t_hi)) > float(U(t_hi)):
                    tail = math.inf
                else:
                    # decade blocks T_k = t_hi 10^k with U decreasing there:
                    # sum_k (p/q) 10^(q/p) x(T_k)^q <= geometric series in r^q
                    rq = max(r, 0.5) ** q
                    tail = (p / q) * 10.0 ** (q / p) * x0**q / (1.0 - rq)
    t_lo = min(t_ref, t_hi) * 1e-12
    edges = np.geomspace(t_lo, t_hi, cells + 1)
    interior = [b for b in bps if t_lo < b < t_hi]
    if interior:
        edges = np.unique(np.concatenate([edges, interior]))
    # factored sqrt: the product overflows once edges pass ~1e154
    mids = np.sqrt(edges[:-1]) * np.sqrt(edges[1:])
    mids = np.concatenate([[0.5 * t_lo], mids])
    widths = np.concatenate([[edges[0]], np.diff(edges)])
    return U(mids), widths, tail


def gradient_qnorm_error(
    u: MonotoneProfile,
    n: int,
    idx: LorentzIndex,
    method: str = "auto",
    cells: int = 4096,
    cfg: QuadratureConfig | None = None,
) -> tuple[float, float]:
    """(‖grad u‖_{p,q}^q, error estimate).

    method "monotone" integrates U directly (valid when U is non-increasing,
    then U* = U); "sorted" rearranges measure-weighted log-grid cells;
    "auto" probes monotonicity and picks.
    """
    p, q = idx.p, idx.q
    U = gradient_profile(u, n)
    if method == "auto":
        method = "monotone" if _is_monotone(U) else "sorted"
    if method == "monotone":
        edges = [0.0] + [b for b in U.breakpoints if b < U.support_bound]
        if math.isfinite(U.support_bound):
            edges.append(U.support_bound)
        else:
            edges.append(math.inf)
        qp = q / p

        def fn(t):
            return U(t) ** q * t ** (qp - 1.0)

        res = integrate_piecewise(fn, edges, cfg, head_exponent=qp if qp < 1.0 else None)
        return res.value, res.error_estimate
    if method != "sorted":
        raise ValueError(f"unknown method {method!r}")

    vals, widths, tail = _sorted_cells(U, cells, p, q)
    if not math.isfinite(tail):
        return math.inf, math.inf
    full = _weighted_sorted_qnorm(vals, widths, p, q)
    vals2, widths2, _ = _sorted_cells(U, max(64, cells // 2), p, q)
    half = _weighted_sorted_qnorm(vals2, widths2, p, q)
    err = abs(full - half) / 3.0 + tail + 1e-14 * abs(full)
    return full, err


def gradient_lorentz_norm(
    u: MonotoneProfile,
    n: int,
    idx: LorentzIndex,
    method: str = "auto",
    cells: int = 4096,
    cfg: QuadratureConfig | None = None,
) -> float:
    """‖grad u‖_{p,q} via the decreasing rearrangement of the gradient field."""
    val, _ = gradient_qnorm_error(u, n, idx, method=method, cells=cells, cfg=cfg)
    if not math.isfinite(val):
        return math.inf
    return val ** (1.0 / idx.q)


# ---------------------------------------------------------------------------
# maximal function


class _CumulativeCache:
    """Cached antiderivative int_0^t u for profiles without a closed form.

    One Kronrod panel per cached cell, cells dense enough that a single
    panel is at machine precision for the smooth pieces in use.
    """

    def __init__(self, u: MonotoneProfile, per_piece: int = 512):
        S = u.support_bound
        if math.isfinite(S):
            hi = S
        else:
            hi = max(1.0, *(u.breakpoints or (1.0,)))
            head = u.head_value()
            while float(u(hi)) * hi > 1e-17 * max(head, 1e-300) and hi < 1e40:
                hi *= 4.0
        knots = [b for b in u.breakpoints if b < hi] + [hi]
        lo = min(knots[0], hi) * 1e-12
        pieces = [lo] + knots
        grids = [
            np.geomspace(max(a, lo), b, per_piece + 1)
            for a, b in zip(pieces, pieces[1:])
            if b > max(a, lo)
        ]
        edges = np.unique(np.concatenate(grids))
        c = 0.5 * (edges[:-1] + edges[1:])
        h = 0.5 * np.diff(edges)
        nodes = c[:, None] + h[:, None] * _XK[None, :]
        cell = h * (u(nodes.reshape(-1)).reshape(nodes.shape) @ _WK)
        self._u = u
        self._edges = edges
        # head sliver (0, edges[0]) enters as one panel too
        head_panel = 0.5 * edges[0] * float(
            u(0.5 * edges[0] * (1.0 + _XK)) @ _WK
        )
        self._cum = np.concatenate([[head_panel], head_panel + np.cumsum(cell)])
        self.total = float(self._cum[-1])

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.total)
        m = t < self._edges[-1]
        if np.any(m):
            tm = t[m]
            j = np.searchsorted(self._edges, tm, side="right")
            lo = np.where(j > 0, self._edges[np.maximum(j - 1, 0)], 0.0)
            base = np.where(j > 0, self._cum[np.maximum(j - 1, 0)], 0.0)
            c = 0.5 * (lo + tm)
            h = 0.5 * (tm - lo)
            nodes = c[:, None] + h[:, None] * _XK[None, :]
            part = h * (self._u(nodes.reshape(-1)).reshape(nodes.shape) @ _WK)
            out[m] = base + part
        return out


def maximal_function(u: MonotoneProfile) -> MonotoneProfile:
    """u**(t) = (1/t) int_0^t u*;  u** >= u* and u** has unbounded support."""
    if u.cum is not None:
        A = lambda t: u.scale * u.cum(t)
    else:
        A = _CumulativeCache(u)

    def fn(t):
        return A(t) / t

    def dfn(t):
        return (u(t) - A(t) / t) / t

    bps = u.breakpoints
    if math.isfinite(u.support_bound):
        bps = bps + (u.support_bound,)
    return MonotoneProfile(
        kind="maximal",
        support_bound=math.inf,
        breakpoints=bps,
        scale=1.0,
        params=None,
        fn=fn,
        dfn=dfn,
    )


# ---------------------------------------------------------------------------
# sampled functions


def decreasing_rearrangement(f: SampledFunction) -> SampledFunction:
    return SampledFunction(np.sort(f.values)[::-1].copy(), f.cell_measure)


def sampled_lorentz_qpower(f: SampledFunction, idx: LorentzIndex) -> float:
    """Exact int f(t)^q t^(q/p-1) dt for the step function in cell order."""
    widths = np.full(f.values.shape, f.cell_measure)
    order_free = f.values  # cells in given order: same formula, unsorted
    T = np.cumsum(widths)
    qp = idx.q / idx.p
    steps = T**qp
    steps[1:] = steps[1:] - T[:-1] ** qp
    return float(np.sum(order_free**idx.q * (idx.p / idx.q) * steps))


# ---------------------------------------------------------------------------
# rearrangement of radial functions


class _LevelSetGeometry:
    """Vectorized distribution function of a piecewise-linear radial function.

    Node volumes Psi(rho_i) are cached; a level query only evaluates Psi at
    the transversal crossing radii, of which there are O(#sign changes) per
    level, so a 48-round bisection stays cheap even on dense node grids.
    """

    def __init__(self, n: int, rho: np.ndarray, val: np.ndarray):
        self.n = n
        self.r0, self.r1 = rho[:-1], rho[1:]
        self.v0, self.v1 = val[:-1], val[1:]
        self.dv = self.v1 - self.v0
        self.slopes = self.dv / (self.r1 - self.r0)
        psis = psi(n, rho)
        self.psi0, self.psi1 = psis[:-1], psis[1:]
        self.widths = self.psi1 - self.psi0
        self.vmin = np.minimum(self.v0, self.v1)
        self.vmax_seg = np.maximum(self.v0, self.v1)
        self.nsig = sphere_area(n)

    def mu(self, lam: np.ndarray) -> np.ndarray:
        """Volume of {phi > lam}, exact per linear segment."""
        lam2 = lam[None, :]
        full = lam2 < self.vmin[:, None]
        total = np.sum(self.widths[:, None] * full, axis=0)
        part = (lam2 >= self.vmin[:, None]) & (lam2 < self.vmax_seg[:, None])
        part &= self.dv[:, None] != 0.0
        seg, col = np.nonzero(part)
        if seg.size:
            f = (lam[col] - self.v0[seg]) / self.dv[seg]
            r_star = self.r0[seg] + f * (self.r1[seg] - self.r0[seg])
            psi_star = psi(self.n, r_star)
            down = self.dv[seg] < 0.0
            # decreasing: [rho0, r*) contributes; increasing: (r*, rho1]
            contrib = np.where(down, psi_star - self.psi0[seg], self.psi1[seg] - psi_star)
            np.add.at(total, col, contrib)
        return total

    def dmu(self, lam: np.ndarray) -> np.ndarray:
        """mu'(lam) <= 0 from the coarea sum over transversal crossings."""
        lam2 = lam[None, :]
        part = (lam2 > self.vmin[:, None]) & (lam2 < self.vmax_seg[:, None])
        part &= self.dv[:, None] != 0.0
        seg, col = np.nonzero(part)
        total = np.zeros_like(lam)
        if seg.size:
            f = (lam[col] - self.v0[seg]) / self.dv[seg]
            r_star = self.r0[seg] + f * (self.r1[seg] - self.r0[seg])
            area = self.nsig * np.sinh(r_star) ** (self.n - 1)
            np.subtract.at(total, col, area / np.abs(self.slopes[seg]))
        return total


def rearrange_radial(fn: RadialFunction, n: int) -> MonotoneProfile:
    """Decreasing rearrangement u*(t) of a piecewise-linear radial function.

    The distribution function is assembled exactly from segment-level-set
    components; u*(t) = sup{lam : mu(lam) > t} is found by bisection.  Exact
    value ties between consecutive nodes are nudged by 1e-14 relative so
    every positive level is crossed transversally.
    """
    check_dimension(n)
    rho = fn.nodes.copy()
    val = fn.values.copy()
    vmax = float(val.max())
    if vmax == 0.0:
        raise ValueError("cannot rearrange the zero function")
    eps = 1e-14 * vmax
    for i in range(1, val.size):
        if val[i] > 0.0 and val[i] == val[i - 1]:
            val[i] = max(val[i] - eps * i, 0.5 * val[i])

    geo = _LevelSetGeometry(n, rho, val)
    support = float(psi(n, rho[-1]))

    def star(t):
        out = np.zeros_like(t)
        act = (t >= 0.0) & (t < support)
        if not np.any(act):
            return out
        ta = t[act]
        lo = np.zeros_like(ta)
        hi = np.full_like(ta, vmax)
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            above = geo.mu(mid) > ta
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out[act] = lo
        return out

    def dstar(t):
        lam = star(t)
        d = geo.dmu(lam)
        out = np.zeros_like(t)
        ok = (d < 0.0) & (lam > 0.0)
        out[ok] = 1.0 / d[ok]
        return out

    levels = np.unique(val[val > 0.0])
    bps = np.sort(geo.mu(levels))
    bps = bps[(bps > 0.0) & (bps < support)]
    bps = tuple(float(b) for b in np.unique(bps))

    return MonotoneProfile(
        kind="rearranged",
        support_bound=support,
        breakpoints=bps,
        params=None,
        fn=star,
        dfn=dstar,
    )


def radialize(u: MonotoneProfile, n: int, m: int = 512) -> RadialFunction:
    """Sample u* back to a piecewise-linear radial function on a uniform rho grid."""
    check_dimension(n)
    if not math.isfinite(u.support_bound):
        raise ValueError("radialize needs a compactly supported profile")
    P = float(psi_inverse(n, u.support_bound))
    rho = np.linspace(0.0, P, m)
    vals = np.asarray(u(psi(n, rho)), dtype=float)
    vals[-1] = 0.0
    return RadialFunction(rho, vals)


def radial_gradient_lorentz_norm(
    fn: RadialFunction, n: int, idx: LorentzIndex, cells: int = 4096
) -> float:
    """‖grad u‖_{p,q} of the radial function itself: |phi'| sorted by measure.

    Cells subdivide each linear segment; |phi'| is constant per segment, so
    the only discretization is in the cell measures Psi(rho_{i+1})-Psi(rho_i).
    """
    check_dimension(n)
    rho = fn.nodes
    per_seg = max(4, cells // max(1, rho.size - 1))
    grids = [np.linspace(a, b, per_seg + 1) for a, b in zip(rho[:-1], rho[1:])]
    edges = np.unique(np.concatenate(grids))
    slopes = np.abs(np.diff(fn.values) / np.diff(rho))
    seg = np.searchsorted(rho, edges[:-1], side="right") - 1
    seg = np.clip(seg, 0, slopes.size - 1)
    vals = slopes[seg]
    measures = np.diff(psi(n, edges))
    qnorm = _weighted_sorted_qnorm(vals, measures, idx.p, idx.q)
    return qnorm ** (1.0 / idx.q)


def v_transform(u: MonotoneProfile, n: int):
    """Half-line view v(r) = u*(sigma_n r^n) and its derivative."""
    check_dimension(n)
    sig = unit_ball_volume(n)

    def v(r):
        r = np.asarray(r, dtype=float)
        return u(sig * r**n)

    def dv(r):
        r = np.asarray(r, dtype=float)
        return u.deriv(sig * r**n) * n * sig * r ** (n - 1.0)

    return v, dv


# ---------------------------------------------------------------------------
# serialization

_FAMILY_BUILDERS: dict[str, Callable[[dict], MonotoneProfile]] = {
    "sharp": lambda d: family_sharp(d["a"], d["R"], d["p"]),
    "mt": lambda d: family_mt(int(d["n"]), d["q"], {"a": d["a"], "T": d["T"]}),
    "cone": lambda d: family_cone(int(d["n"]), d["S"]),
    "exp": lambda d: family_exp(d["rate"]),
    "frac_pullback": lambda d: family_frac_pullback(int(d["n"]), d["beta"], d["q"]),
    "power_cutoff": lambda d: family_power_cutoff(int(d["n"]), d["k"]),
    "piecewise_linear": lambda d: piecewise_linear_profile(d["nodes_t"], d["nodes_u"]),
}


def profile_to_dict(u: MonotoneProfile) -> dict:
    """JSON-ready {kind, params, scale}; rejects kinds without parameters."""
    if u.params is None:
        raise ValueError(f"profile kind {u.kind!r} is not serializable")
    if u.kind == "piecewise_linear":
        nodes = [
            {"t": t, "u": v}
            for t, v in zip(u.params["nodes_t"], u.params["nodes_u"])
        ]
        return {"kind": u.kind, "nodes": nodes, "scale": u.scale}
    return {"kind": u.kind, "params": dict(u.params), "scale": u.scale}


def profile_from_dict(d: dict) -> MonotoneProfile:
    kind = d["kind"]
    builder = _FAMILY_BUILDERS.get(kind)
    if builder is None:
        raise ValueError(f"unknown profile kind {kind!r}")
    if kind == "piecewise_linear":
        params = {
            "nodes_t": [pt["t"] for pt in d["nodes"]],
            "nodes_u": [pt["u"] for pt in d["nodes"]],
        }
    else:
        params = d["params"]
    return builder(params).scaled(d.get("scale", 1.0))
