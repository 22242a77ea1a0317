import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import quad

from hypineq._kernels import (
    HAVE_NUMBA,
    numba_backend,
    numpy_backend,
    sinh_power_integral,
    sinh_ratio_power_coeffs,
    truncated_exp_kernel,
    volume_inverse,
)
from hypineq.constants import sphere_area

RNG = np.random.default_rng(1234)


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
def test_sinh_power_integral_against_quad(m):
    for rho in (1e-4, 0.1, 0.49, 0.51, 2.0, 10.0):
        ref, _ = quad(lambda s: math.sinh(s) ** m, 0.0, rho, epsabs=0, epsrel=1e-13)
        got = float(sinh_power_integral(m, rho))
        assert got == pytest.approx(ref, rel=1e-12)


def test_sinh_power_integral_vector_matches_scalar():
    rho = RNG.uniform(1e-3, 20.0, 200)
    vec = sinh_power_integral(3, rho)
    for i in (0, 17, 150):
        assert vec[i] == pytest.approx(float(sinh_power_integral(3, rho[i])), rel=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_volume_inverse_residual_contract(n):
    nsig = sphere_area(n)
    t = np.geomspace(1e-8, 1e10, 400)
    rho = volume_inverse(n, t, nsig / n)
    psi = n * (nsig / n) * np.asarray(sinh_power_integral(n - 1, rho))
    # small slack over tol_scale for the re-evaluation roundoff
    assert np.all(np.abs(psi - t) <= 2e-12 * t)


def test_truncated_exp_against_series():
    # independent float series from j0 upward; stable for all t here
    for j0 in (2, 3, 5):
        for t in (1e-9, 1e-4, 0.3, 2.0, 20.0, 50.0):
            terms = []
            term = t**j0 / math.factorial(j0)
            j = j0
            while term > 1e-25 * (1.0 + sum(terms)) and j < j0 + 400:
                terms.append(term)
                j += 1
                term *= t / j
            ref = math.fsum(terms)
            assert float(truncated_exp_kernel(t, j0)) == pytest.approx(ref, rel=1e-12)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend not active")
def test_backends_agree():
    rho = RNG.uniform(1e-4, 25.0, 5000)
    t = RNG.uniform(1e-6, 1e8, 5000)
    x = RNG.uniform(0.0, 40.0, 5000)
    coeffs = sinh_ratio_power_coeffs(3)
    nsig = sphere_area(4)

    ref = numpy_backend["sinh_power_integral"](3, rho, coeffs)
    out = np.empty_like(ref)
    numba_backend["sinh_power_integral"](3, rho, coeffs, out)
    np.testing.assert_allclose(out, ref, rtol=1e-13)

    ref = numpy_backend["volume_inverse"](4, t, nsig, coeffs, 1e-12)
    out = np.empty_like(ref)
    numba_backend["volume_inverse"](4, t, nsig, coeffs, 1e-12, out)
    np.testing.assert_allclose(out, ref, rtol=1e-12)

    ref = numpy_backend["truncated_exp"](x, 3)
    out = np.empty_like(ref)
    numba_backend["truncated_exp"](x, 3, out)
    np.testing.assert_allclose(out, ref, rtol=1e-13)


def test_disable_flag_selects_numpy_path():
    code = (
        "import hypineq._kernels as k\n"
        "import numpy as np\n"
        "assert k.NUMBA_DISABLED and not k.HAVE_NUMBA\n"
        "t = np.geomspace(1e-4, 1e6, 50)\n"
        "from hypineq.constants import sphere_area\n"
        "rho = k.volume_inverse(3, t, sphere_area(3) / 3)\n"
        "back = 3 * (sphere_area(3) / 3) * np.asarray(k.sinh_power_integral(2, rho))\n"
        "assert np.all(np.abs(back - t) <= 1e-11 * np.maximum(t, 1.0))\n"
        "print('ok')\n"
    )
    env = dict(os.environ, HYPINEQ_DISABLE_NUMBA="1")
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "ok"
