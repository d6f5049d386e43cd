import os
import subprocess
import sys

import numpy as np
import pytest

from impns import kernels


@pytest.fixture(scope="module")
def lam():
    rng = np.random.default_rng(0)
    # spread across the series/direct switch points of phi1 and phi2
    return np.sort(
        np.concatenate(
            [
                rng.uniform(1e-10, 1e-7, 50),
                rng.uniform(1e-7, 0.05, 50),
                rng.uniform(0.05, 50.0, 100),
            ]
        )
    )


class TestBackendAgreement:
    """The dispatched backend must match the numpy reference bit-tightly."""

    @pytest.mark.parametrize("h", [1e-9, 1e-3, 0.1, 1.0, 7.0])
    def test_decay(self, lam, h):
        np.testing.assert_allclose(
            kernels.decay_weights(lam, h), kernels.decay_weights_numpy(lam, h),
            rtol=1e-15,
        )

    @pytest.mark.parametrize("h", [1e-9, 1e-3, 0.1, 1.0, 7.0])
    def test_phi1(self, lam, h):
        np.testing.assert_allclose(
            kernels.phi1_weights(lam, h), kernels.phi1_weights_numpy(lam, h),
            rtol=1e-14,
        )

    @pytest.mark.parametrize("h", [1e-9, 1e-3, 0.1, 1.0, 7.0])
    def test_phi2(self, lam, h):
        np.testing.assert_allclose(
            kernels.phi2_weights(lam, h), kernels.phi2_weights_numpy(lam, h),
            rtol=1e-13,
        )

    def test_convolution_scan(self):
        rng = np.random.default_rng(1)
        n, d = 40, 6
        dec = rng.uniform(0.2, 1.0, (n, d))
        w1 = rng.uniform(0.0, 0.1, (n, d))
        w2 = rng.uniform(0.0, 0.05, (n, d))
        ga = rng.standard_normal((n, d))
        gb = rng.standard_normal((n, d))
        got = kernels.convolution_scan(dec, w1, w2, ga, gb)
        ref = kernels.convolution_scan_numpy(dec, w1, w2, ga, gb)
        np.testing.assert_allclose(got, ref, rtol=1e-14, atol=1e-16)
        assert got.shape == (n + 1, d)
        np.testing.assert_array_equal(got[0], np.zeros(d))


class TestSeriesBranches:
    def test_phi1_series_region_accuracy(self):
        # below the switch the series matches the expm1 form to ~1 ulp
        lam = np.array([1.0])
        for z in (1e-12, 1e-10, 5e-9):
            got = kernels.phi1_weights_numpy(lam, z)[0]
            ref = -np.expm1(-z)
            assert got == pytest.approx(ref, rel=1e-13)

    def test_phi2_branches_agree_at_switch(self):
        # series and direct formulas evaluated at the same z near the switch
        for z in (0.029, kernels.PHI2_SERIES_THRESHOLD, 0.031):
            series = z * (
                1 / 2 - z / 6 + z**2 / 24 - z**3 / 120 + z**4 / 720
                - z**5 / 5040 + z**6 / 40320
            )
            direct = (np.expm1(-z) + z) / z
            assert series == pytest.approx(direct, rel=1e-12)


class TestEnvFlag:
    def _backend_with_env(self, value):
        env = dict(os.environ)
        env["IMPNS_KERNELS"] = value
        out = subprocess.run(
            [sys.executable, "-c",
             "from impns import kernels; print(kernels.backend_name())"],
            capture_output=True, text=True, env=env,
        )
        assert out.returncode == 0, out.stderr
        return out.stdout.strip()

    def test_force_numpy(self):
        assert self._backend_with_env("numpy") == "numpy"

    def test_auto_prefers_numba_when_available(self):
        try:
            import numba  # noqa: F401
        except ImportError:
            pytest.skip("numba not installed")
        assert self._backend_with_env("auto") == "numba"

    def test_bad_value_rejected(self):
        env = dict(os.environ)
        env["IMPNS_KERNELS"] = "cuda"
        out = subprocess.run(
            [sys.executable, "-c", "import impns.kernels"],
            capture_output=True, text=True, env=env,
        )
        assert out.returncode != 0

    def test_numpy_backend_runs_solver(self):
        # the fallback path must drive an actual integration correctly
        env = dict(os.environ)
        env["IMPNS_KERNELS"] = "numpy"
        code = (
            "import numpy as np\n"
            "from impns import (DiagonalOperator, StateVector, SolverConfig,\n"
            "                   integrate, HullPoint)\n"
            "from impns.driving import BilinearForm, DrivenSystem, Forcing, "
            "ImpulseSchedule\n"
            "A = DiagonalOperator(np.array([1.0]))\n"
            "sys_ = DrivenSystem(BilinearForm.zero(1),\n"
            "                    Forcing.constant(StateVector([1.0])),\n"
            "                    ImpulseSchedule.empty())\n"
            "traj = integrate(A, sys_, StateVector([0.0]), HullPoint(0.0), 1.0,\n"
            "                 SolverConfig(dt=0.1, horizon_T=1.0))\n"
            "err = abs(traj.final_state.coeffs[0] - (1 - np.exp(-1.0)))\n"
            "assert err < 1e-13, err\n"
            "print('ok')\n"
        )
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env
        )
        assert out.returncode == 0, out.stderr
        assert out.stdout.strip() == "ok"
