"""Sharp constants and exponent windows for the inequalities under test.

Everything here is a closed-form scalar: gamma-function expressions for the
sharp constants, the admissible (p, q) windows as predicates, and the
truncated exponential that makes the Moser-Trudinger functional integrable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import truncated_exp_kernel

__all__ = [
    "LorentzIndex",
    "check_dimension",
    "gamma_fn",
    "unit_ball_volume",
    "sphere_area",
    "poincare_constant",
    "mt_exponent",
    "weighted_mt_exponent",
    "truncation_index",
    "truncated_exp",
    "frac_sobolev_constant",
    "poincare_sobolev_constant",
    "sobolev_constant_rn",
]


def check_dimension(n: int) -> int:
    """Validate an integer space dimension n >= 2."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"dimension must be an integer, got {n!r}")
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return int(n)


@dataclass(frozen=True)
class LorentzIndex:
    """Lorentz exponent pair (p, q) with the admissibility windows used here.

    The windows depend on the dimension where the borderline exponent
    2n/(n-1) enters; those predicates take n explicitly.
    """

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise ValueError("Lorentz exponents must be finite")
        if self.p < 1.0 or self.q < 1.0:
            raise ValueError(f"Lorentz exponents must satisfy p,q >= 1, got ({self.p}, {self.q})")

    def poincare_window(self) -> bool:
        return 1.0 < self.q <= self.p

    def key_estimate_window(self, n: int) -> bool:
        n = check_dimension(n)
        return 2.0 * n / (n - 1.0) <= self.q <= self.p

    def ps_window(self, n: int) -> bool:
        n = check_dimension(n)
        return 2.0 * n / (n - 1.0) <= self.q <= self.p < n

    def mt_window(self, n: int) -> bool:
        n = check_dimension(n)
        return 2.0 * n / (n - 1.0) <= self.q <= n


def gamma_fn(x: float) -> float:
    """Gamma(x) for x > 0 (double precision, relative error well below 1e-12)."""
    if not x > 0.0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def unit_ball_volume(theta: float) -> float:
    """Volume sigma_theta = pi^(theta/2)/Gamma(theta/2+1) of the unit ball, real theta > 0."""
    if not theta > 0.0:
        raise ValueError(f"unit_ball_volume requires theta > 0, got {theta}")
    return math.pi ** (theta / 2.0) / math.gamma(theta / 2.0 + 1.0)


def sphere_area(n: int) -> float:
    """Surface area omega_{n-1} = n*sigma_n of the unit sphere in dimension n."""
    n = check_dimension(n)
    return n * unit_ball_volume(n)


def poincare_constant(n: int, p: float, q: float) -> float:
    """Sharp constant ((n-1)/p)^q separating gradient and function Lorentz norms."""
    n = check_dimension(n)
    idx = LorentzIndex(p, q)
    return ((n - 1.0) / idx.p) ** idx.q


def mt_exponent(n: int, q: float) -> float:
    """Critical Moser-Trudinger exponent (n^((n-1)/n) * omega_{n-1}^(1/n))^(q/(q-1))."""
    n = check_dimension(n)
    if not q > 1.0:
        raise ValueError(f"mt_exponent requires q > 1, got {q}")
    base = n ** ((n - 1.0) / n) * sphere_area(n) ** (1.0 / n)
    return base ** (q / (q - 1.0))


def weighted_mt_exponent(alpha: float, theta: float) -> float:
    """Exponent mu = theta*(alpha*sigma_alpha)^(1/(alpha-1)) for the weighted half-line measure."""
    if not alpha > 1.0:
        raise ValueError(f"weighted_mt_exponent requires alpha > 1, got {alpha}")
    if not theta >= 1.0:
        raise ValueError(f"weighted_mt_exponent requires theta >= 1, got {theta}")
    return theta * (alpha * unit_ball_volume(alpha)) ** (1.0 / (alpha - 1.0))


def truncation_index(n: int, q: float) -> int:
    """Smallest integer j with j >= 1 + n(q-1)/q."""
    n = check_dimension(n)
    if not q > 1.0:
        raise ValueError(f"truncation_index requires q > 1, got {q}")
    x = 1.0 + n * (q - 1.0) / q
    j = math.ceil(x - 1e-12)  # snap against float fuzz when x is an integer
    return max(int(j), 1)


def truncated_exp(t, n: int, q: float):
    """exp(t) minus its Taylor terms below t^(j_q - 1); elementwise, monotone in t.

    Computed by the positive tail series for t < 1 to avoid cancellation.
    """
    j0 = truncation_index(n, q) - 1
    arr = np.asarray(t, dtype=np.float64)
    if (arr < 0).any():
        raise ValueError("truncated_exp requires t >= 0")
    return truncated_exp_kernel(t, j0)


def frac_sobolev_constant(beta: float, q: float) -> float:
    """Sharp constant of the weighted one-dimensional Sobolev inequality.

    S(beta, q) = beta*((beta-q)/(q-1))^(q-1) *
                 [ (q-1)/q * Gamma(beta/q)*Gamma(beta(q-1)/q)/Gamma(beta) ]^(q/beta)
    for beta > q > 1; attained by r -> (1+r^(q/(q-1)))^(-(beta-q)/q).
    """
    if not q > 1.0:
        raise ValueError(f"frac_sobolev_constant requires q > 1, got {q}")
    if not beta > q:
        raise ValueError(f"frac_sobolev_constant requires beta > q, got beta={beta}, q={q}")
    bracket = (
        (q - 1.0)
        / q
        * gamma_fn(beta / q)
        * gamma_fn(beta * (q - 1.0) / q)
        / gamma_fn(beta)
    )
    return beta * ((beta - q) / (q - 1.0)) ** (q - 1.0) * bracket ** (q / beta)


def poincare_sobolev_constant(n: int, p: float, q: float, l: float) -> float:
    """Constant in front of the critical Lorentz norm in the improved Poincare inequality.

    Defined for q <= l <= nq/(n-p) with p < n. The l = q endpoint has its own
    closed form; for l > q the constant comes from the weighted Sobolev
    inequality with exponent beta = lq/(l-q).
    """
    n = check_dimension(n)
    idx = LorentzIndex(p, q)
    if not idx.ps_window(n):
        raise ValueError(f"(p, q)=({p}, {q}) outside the admissible window for n={n}")
    l_max = n * q / (n - p)
    if not (q <= l <= l_max + 1e-12):
        raise ValueError(f"l={l} outside [q, nq/(n-p)] = [{q}, {l_max}]")
    sig = unit_ball_volume(n)
    if abs(l - q) < 1e-12:
        return (n - p) / p * sig ** (1.0 / n)
    beta = l * q / (l - q)
    s_q = (
        n ** (1.0 - q / l)
        * sig ** (q / n)
        * ((n - p) * (l - q) / (q * p)) ** (q + q / l - 1.0)
        * frac_sobolev_constant(beta, q)
    )
    return s_q ** (1.0 / q)


def sobolev_constant_rn(n: int, p: float) -> float:
    """Sharp Euclidean Sobolev constant: ||grad u||_p >= S ||u||_{np/(n-p)}.

    For 1 < p < n this is frac_sobolev_constant(n, p)^(1/p) * omega_{n-1}^(1/n),
    the radial reduction of the classical extremal problem.
    """
    n = check_dimension(n)
    if not 1.0 < p < n:
        raise ValueError(f"sobolev_constant_rn requires 1 < p < n, got p={p}, n={n}")
    return frac_sobolev_constant(float(n), p) ** (1.0 / p) * sphere_area(n) ** (1.0 / n)
