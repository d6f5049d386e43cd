"""Hot numeric kernels for the exponential integrators.

Every kernel exists twice: a numba @njit version and a pure-numpy fallback.
The active backend is chosen once at import time from the IMPNS_KERNELS
environment variable:

    IMPNS_KERNELS=numba   require numba (ImportError if missing)
    IMPNS_KERNELS=numpy   force the numpy fallback
    IMPNS_KERNELS=auto    numba if importable, else numpy (default)

`benchmarks/bench_kernels.py` compares the two paths head to head.

The weight functions evaluate, per eigenvalue lam > 0 and step h > 0,

    decay:  exp(-lam*h)
    phi1:   (1 - exp(-lam*h)) / lam          with a 3-term series below z=1e-8
    phi2:   (exp(-lam*h) - 1 + lam*h) / (lam^2 h)   series below z=0.03

The series branches guard against cancellation at tiny lam*h; phi2 loses
roughly z/2 of its digits in the direct form, hence the larger threshold.
"""

from __future__ import annotations

import math
import os

import numpy as np

PHI1_SERIES_THRESHOLD = 1e-8
PHI2_SERIES_THRESHOLD = 0.03

_REQUESTED = os.environ.get("IMPNS_KERNELS", "auto").strip().lower()
if _REQUESTED not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"IMPNS_KERNELS must be one of auto|numba|numpy, got {_REQUESTED!r}"
    )


# ---------------------------------------------------------------------------
# pure-numpy fallback path
# ---------------------------------------------------------------------------

def decay_weights_numpy(lam: np.ndarray, h: float) -> np.ndarray:
    return np.exp(-lam * h)


def phi1_weights_numpy(lam: np.ndarray, h: float) -> np.ndarray:
    z = lam * h
    small = z < PHI1_SERIES_THRESHOLD
    # np.where evaluates both branches; the direct branch is safe for z>0
    # because expm1 carries full precision near zero anyway.
    direct = -np.expm1(-z) / np.where(small, 1.0, lam)
    series = h * (1.0 - z / 2.0 + z * z / 6.0)
    return np.where(small, series, direct)


def phi2_weights_numpy(lam: np.ndarray, h: float) -> np.ndarray:
    z = lam * h
    small = z < PHI2_SERIES_THRESHOLD
    lam_safe = np.where(small, 1.0, lam)
    direct = (np.expm1(-z) + z) / (lam_safe * lam_safe * h)
    series = h * (
        1.0 / 2.0
        - z / 6.0
        + z**2 / 24.0
        - z**3 / 120.0
        + z**4 / 720.0
        - z**5 / 5040.0
        + z**6 / 40320.0
    )
    return np.where(small, series, direct)


def convolution_scan_numpy(
    decay: np.ndarray, w1: np.ndarray, w2: np.ndarray,
    g_start: np.ndarray, g_end: np.ndarray,
) -> np.ndarray:
    """Scan C[j+1] = decay[j]*C[j] + w1[j]*g_start[j] + w2[j]*(g_end[j]-g_start[j]).

    Shapes: all inputs (n_intervals, dim); returns (n_intervals+1, dim) with
    C[0] = 0. This is the running variation-of-constants integral on a grid,
    with the integrand interpolated linearly on each interval.
    """
    n, d = g_start.shape
    out = np.zeros((n + 1, d))
    c = np.zeros(d)
    for j in range(n):
        c = decay[j] * c + w1[j] * g_start[j] + w2[j] * (g_end[j] - g_start[j])
        out[j + 1] = c
    return out


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

_HAVE_NUMBA = False
if _REQUESTED in ("auto", "numba"):
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _REQUESTED == "numba":
            raise

if _HAVE_NUMBA:

    @njit(cache=True)
    def decay_weights_numba(lam, h):  # pragma: no cover - exercised via dispatch
        out = np.empty_like(lam)
        for i in range(lam.shape[0]):
            out[i] = math.exp(-lam[i] * h)
        return out

    @njit(cache=True)
    def phi1_weights_numba(lam, h):  # pragma: no cover
        out = np.empty_like(lam)
        for i in range(lam.shape[0]):
            z = lam[i] * h
            if z < PHI1_SERIES_THRESHOLD:
                out[i] = h * (1.0 - z / 2.0 + z * z / 6.0)
            else:
                out[i] = -math.expm1(-z) / lam[i]
        return out

    @njit(cache=True)
    def phi2_weights_numba(lam, h):  # pragma: no cover
        out = np.empty_like(lam)
        for i in range(lam.shape[0]):
            z = lam[i] * h
            if z < PHI2_SERIES_THRESHOLD:
                out[i] = h * (
                    1.0 / 2.0
                    - z / 6.0
                    + z**2 / 24.0
                    - z**3 / 120.0
                    + z**4 / 720.0
                    - z**5 / 5040.0
                    + z**6 / 40320.0
                )
            else:
                out[i] = (math.expm1(-z) + z) / (lam[i] * lam[i] * h)
        return out

    @njit(cache=True)
    def convolution_scan_numba(decay, w1, w2, g_start, g_end):  # pragma: no cover
        n, d = g_start.shape
        out = np.zeros((n + 1, d))
        for j in range(n):
            for k in range(d):
                out[j + 1, k] = (
                    decay[j, k] * out[j, k]
                    + w1[j, k] * g_start[j, k]
                    + w2[j, k] * (g_end[j, k] - g_start[j, k])
                )
        return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:
    BACKEND = "numba"
    decay_weights = decay_weights_numba
    phi1_weights = phi1_weights_numba
    phi2_weights = phi2_weights_numba
    convolution_scan = convolution_scan_numba
else:
    BACKEND = "numpy"
    decay_weights = decay_weights_numpy
    phi1_weights = phi1_weights_numpy
    phi2_weights = phi2_weights_numpy
    convolution_scan = convolution_scan_numpy


def backend_name() -> str:
    """Active kernel backend, either 'numba' or 'numpy'."""
    return BACKEND


def warm_up() -> None:
    """Trigger JIT compilation so timed sections never pay compile cost."""
    lam = np.array([1.0, 2.0])
    decay_weights(lam, 0.1)
    phi1_weights(lam, 0.1)
    phi2_weights(lam, 0.1)
    z = np.zeros((2, 2))
    convolution_scan(z + 0.5, z + 0.1, z + 0.1, z, z)
