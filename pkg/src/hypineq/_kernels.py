"""Hot numerical kernels with a numba backend and a pure-numpy fallback.

Three per-element iterative computations live here: the hyperbolic ball-volume
integral I_m(rho) = int_0^rho sinh^m(s) ds, the safeguarded Newton inversion of
the volume function, and the truncated exponential series. Each has a scalar
numba implementation (compiled when numba is importable) and a vectorized
pure-numpy implementation. Set HYPINEQ_DISABLE_NUMBA=1 to force the numpy path;
`benchmarks/bench_kernels.py` compares the two.
"""

from __future__ import annotations

import math
import os

import numpy as np

NUMBA_DISABLED = os.environ.get("HYPINEQ_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via HYPINEQ_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag in tests
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


# Below SERIES_CUTOFF the sinh recurrence cancels catastrophically
# (both terms agree to O(rho^2)), so a power series is used instead.
SERIES_CUTOFF = 0.5
_SERIES_TERMS = 17  # coefficients 0..16; truncation error < 1e-16 rel at rho=0.5, m<=24

_coeff_cache: dict[int, np.ndarray] = {}


def sinh_ratio_power_coeffs(m: int) -> np.ndarray:
    """Taylor coefficients c_j of (sinh(s)/s)^m in powers of s^2, j=0.._SERIES_TERMS-1."""
    cached = _coeff_cache.get(m)
    if cached is not None:
        return cached
    if m < 1 or m > 24:
        raise ValueError(f"sinh power m={m} outside supported range [1, 24]")
    base = np.array(
        [1.0 / math.factorial(2 * j + 1) for j in range(_SERIES_TERMS)], dtype=np.float64
    )
    coef = np.zeros(_SERIES_TERMS)
    coef[0] = 1.0
    for _ in range(m):
        coef = np.convolve(coef, base)[:_SERIES_TERMS]
    _coeff_cache[m] = coef
    return coef


# ---------------------------------------------------------------------------
# sinh-power integral I_m(rho) = int_0^rho sinh^m(s) ds
# ---------------------------------------------------------------------------


@njit(cache=True)
def _sinh_pow_int_scalar(m, rho, coeffs):
    if rho <= 0.0:
        return 0.0
    if rho < SERIES_CUTOFF:
        r2 = rho * rho
        acc = 0.0
        for j in range(len(coeffs) - 1, -1, -1):
            acc = acc * r2 + coeffs[j] / (m + 2 * j + 1)
        return acc * rho ** (m + 1)
    sh = math.sinh(rho)
    ch = math.cosh(rho)
    if m % 2 == 0:
        val = rho
        k = 2
    else:
        half = math.sinh(0.5 * rho)
        val = 2.0 * half * half  # cosh(rho) - 1 without cancellation
        k = 3
    while k <= m:
        val = (sh ** (k - 1) * ch - (k - 1) * val) / k
        k += 2
    return val


@njit(cache=True)
def _sinh_pow_int_arr_nb(m, rho, coeffs, out):
    for i in range(rho.shape[0]):
        out[i] = _sinh_pow_int_scalar(m, rho[i], coeffs)


def _sinh_pow_int_arr_np(m: int, rho: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho)
    small = (rho > 0.0) & (rho < SERIES_CUTOFF)
    if small.any():
        r = rho[small]
        r2 = r * r
        acc = np.zeros_like(r)
        for j in range(len(coeffs) - 1, -1, -1):
            acc = acc * r2 + coeffs[j] / (m + 2 * j + 1)
        out[small] = acc * r ** (m + 1)
    big = rho >= SERIES_CUTOFF
    if big.any():
        r = rho[big]
        sh = np.sinh(r)
        ch = np.cosh(r)
        if m % 2 == 0:
            val = r.copy()
            k = 2
        else:
            half = np.sinh(0.5 * r)
            val = 2.0 * half * half
            k = 3
        while k <= m:
            val = (sh ** (k - 1) * ch - (k - 1) * val) / k
            k += 2
        out[big] = val
    return out


def sinh_power_integral(m: int, rho) -> np.ndarray | float:
    """int_0^rho sinh^m(s) ds, elementwise; relative accuracy ~1e-14."""
    coeffs = sinh_ratio_power_coeffs(m)
    arr = np.asarray(rho, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    if HAVE_NUMBA:
        out = np.empty_like(flat)
        _sinh_pow_int_arr_nb(m, flat, coeffs, out)
    else:
        out = _sinh_pow_int_arr_np(m, flat, coeffs)
    if scalar:
        return float(out[0])
    return out.reshape(np.atleast_1d(arr).shape)


# ---------------------------------------------------------------------------
# inversion of t = n*sigma_n*I_{n-1}(rho) by safeguarded Newton
# ---------------------------------------------------------------------------


@njit(cache=True)
def _volume_inverse_scalar(n, t, nsig, coeffs, tol):
    if t <= 0.0:
        return 0.0
    sig = nsig / n
    m = n - 1
    pow_guess = (t / sig) ** (1.0 / n)  # upper bound: Psi(rho) >= sigma_n rho^n
    log_guess = math.log(2.0 ** m * m * t / nsig) / m
    hi = pow_guess
    if log_guess > 1.0 and log_guess + 2.0 < hi:
        hi = log_guess + 2.0
    while nsig * _sinh_pow_int_scalar(m, hi, coeffs) < t:
        hi *= 1.5
    lo = 0.0
    x = hi
    if 0.0 < log_guess < hi:
        x = log_guess
    stall = 0
    prev_abs_f = 1e308
    for _ in range(200):
        f = nsig * _sinh_pow_int_scalar(m, x, coeffs) - t
        if abs(f) <= tol:
            return x
        if f > 0.0:
            hi = x
        else:
            lo = x
        if hi - lo <= 1e-16 * max(hi, 1.0):
            return 0.5 * (lo + hi)
        # residual not halving counts as a non-contracting step
        if abs(f) >= 0.5 * prev_abs_f:
            stall += 1
        else:
            stall = 0
        prev_abs_f = abs(f)
        dps = nsig * math.sinh(x) ** m
        xn = x - f / dps
        if xn <= lo or xn >= hi or stall >= 3:
            xn = 0.5 * (lo + hi)
            stall = 0
            prev_abs_f = 1e308
        x = xn
    return x


@njit(cache=True)
def _volume_inverse_arr_nb(n, t, nsig, coeffs, tol_scale, out):
    for i in range(t.shape[0]):
        # relative stop; the bracket-width exit still terminates if it underflows
        out[i] = _volume_inverse_scalar(n, t[i], nsig, coeffs, tol_scale * t[i])


def _volume_inverse_arr_np(
    n: int, t: np.ndarray, nsig: float, coeffs: np.ndarray, tol_scale: float
) -> np.ndarray:
    sig = nsig / n
    m = n - 1
    out = np.zeros_like(t)
    pos = t > 0.0
    if not pos.any():
        return out
    tv = t[pos]
    tol = tol_scale * tv
    pow_guess = (tv / sig) ** (1.0 / n)
    with np.errstate(divide="ignore"):
        log_guess = np.log(2.0 ** m * m * tv / nsig) / m
    hi = np.where((log_guess > 1.0) & (log_guess + 2.0 < pow_guess), log_guess + 2.0, pow_guess)
    for _ in range(60):  # expand rare under-estimates of the bracket
        short = nsig * _sinh_pow_int_arr_np(m, hi, coeffs) < tv
        if not short.any():
            break
        hi = np.where(short, hi * 1.5, hi)
    lo = np.zeros_like(tv)
    x = np.where((log_guess > 0.0) & (log_guess < hi), log_guess, hi)
    active = np.ones(tv.shape, dtype=bool)
    for it in range(200):
        f = nsig * _sinh_pow_int_arr_np(m, x, coeffs) - tv
        active &= np.abs(f) > tol
        if not active.any():
            break
        above = (f > 0.0) & active
        below = (f <= 0.0) & active
        hi = np.where(above, x, hi)
        lo = np.where(below, x, lo)
        if it >= 60:  # stragglers finish by pure bisection
            x = np.where(active, 0.5 * (lo + hi), x)
            continue
        with np.errstate(over="ignore"):
            dps = nsig * np.sinh(x) ** m
        with np.errstate(invalid="ignore", divide="ignore"):
            xn = x - f / dps
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        x = np.where(active, xn, x)
    out[pos] = x
    return out


def volume_inverse(n: int, t, sigma_n: float, tol_scale: float = 1e-12) -> np.ndarray | float:
    """Solve n*sigma_n*I_{n-1}(rho) = t for rho >= 0, elementwise.

    Residual satisfies |Psi(rho) - t| <= tol_scale*t.
    """
    coeffs = sinh_ratio_power_coeffs(n - 1)
    nsig = n * sigma_n
    arr = np.asarray(t, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    if HAVE_NUMBA:
        out = np.empty_like(flat)
        _volume_inverse_arr_nb(n, flat, nsig, coeffs, tol_scale, out)
    else:
        out = _volume_inverse_arr_np(n, flat, nsig, coeffs, tol_scale)
    if scalar:
        return float(out[0])
    return out.reshape(np.atleast_1d(arr).shape)


# ---------------------------------------------------------------------------
# truncated exponential: exp(t) minus its first (j0) Taylor terms
# ---------------------------------------------------------------------------


@njit(cache=True)
def _trunc_exp_scalar(t, j0):
    if t == 0.0:
        return 0.0
    if t < 1.0:
        # tail series sum_{j>=j0} t^j/j!; all terms positive, no cancellation
        term = t ** j0 / math.gamma(j0 + 1.0)
        total = term
        j = j0
        while True:
            j += 1
            term *= t / j
            total += term
            if term <= 1e-17 * total:
                return total
    total = math.exp(t)
    term = 1.0
    for j in range(j0):
        total -= term
        term *= t / (j + 1)
    return total


@njit(cache=True)
def _trunc_exp_arr_nb(t, j0, out):
    for i in range(t.shape[0]):
        out[i] = _trunc_exp_scalar(t[i], j0)


def _trunc_exp_arr_np(t: np.ndarray, j0: int) -> np.ndarray:
    out = np.zeros_like(t)
    small = (t > 0.0) & (t < 1.0)
    if small.any():
        x = t[small]
        acc = np.ones_like(x)
        for i in range(40, 0, -1):  # 40 terms: remainder < 1/40! of the head for t<1
            acc = 1.0 + acc * x / (j0 + i)
        out[small] = acc * x ** j0 / math.gamma(j0 + 1.0)
    big = t >= 1.0
    if big.any():
        x = t[big]
        total = np.exp(x)
        term = np.ones_like(x)
        for j in range(j0):
            total -= term
            term *= x / (j + 1)
        out[big] = total
    return out


def truncated_exp_kernel(t, j0: int) -> np.ndarray | float:
    """exp(t) - sum_{j<j0} t^j/j!, elementwise, stable for small t."""
    arr = np.asarray(t, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    if HAVE_NUMBA:
        out = np.empty_like(flat)
        _trunc_exp_arr_nb(flat, j0, out)
    else:
        out = _trunc_exp_arr_np(flat, j0)
    if scalar:
        return float(out[0])
    return out.reshape(np.atleast_1d(arr).shape)


# explicit handles for the benchmark; both paths are defined regardless of the flag
numpy_backend = {
    "sinh_power_integral": _sinh_pow_int_arr_np,
    "volume_inverse": _volume_inverse_arr_np,
    "truncated_exp": _trunc_exp_arr_np,
}
numba_backend = (
    {
        "sinh_power_integral": _sinh_pow_int_arr_nb,
        "volume_inverse": _volume_inverse_arr_nb,
        "truncated_exp": _trunc_exp_arr_nb,
    }
    if HAVE_NUMBA
    else None
)
