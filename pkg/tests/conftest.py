import numpy as np
import pytest

from impns import kernels
from impns.driving import (
    BilinearForm,
    DrivenSystem,
    Forcing,
    HullPoint,
    ImpulseOperator,
    ImpulseSchedule,
)
from impns.spectral import DiagonalOperator, StateVector


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # JIT compilation must never land inside a timed assertion.
    kernels.warm_up()


@pytest.fixture
def scalar_operator():
    return DiagonalOperator(np.array([1.0]), frac_exponent_delta=0.5)


@pytest.fixture
def scalar_impulsive_system():
    """lam=1, B=0, f=0, constant jump +0.5 at t=1 (the closed-form canary)."""
    schedule = ImpulseSchedule(
        times=np.array([1.0]),
        operators=(ImpulseOperator.constant(StateVector([0.5])),),
    )
    return DrivenSystem(
        bilinear=BilinearForm.zero(1),
        forcing=Forcing.zero(1),
        schedule=schedule,
    )


@pytest.fixture
def origin():
    return HullPoint(0.0)


def scalar_impulsive_oracle(t: float) -> float:
    """Piecewise exponential closed form for the canary system, u0 = 1."""
    if t < 1.0:
        return np.exp(-t)
    return (np.exp(-1.0) + 0.5) * np.exp(-(t - 1.0))


def rk4_reference(f, u0: np.ndarray, t0: float, t1: float, n_steps: int) -> np.ndarray:
    """Classical fixed-step RK4, the independent fine-step reference."""
    u = np.array(u0, dtype=float)
    h = (t1 - t0) / n_steps
    t = t0
    for _ in range(n_steps):
        k1 = f(t, u)
        k2 = f(t + h / 2, u + h / 2 * k1)
        k3 = f(t + h / 2, u + h / 2 * k2)
        k4 = f(t + h, u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return u
