"""Diagonal coercive operators, their semigroups, and fractional-power norms.

Everything here is exact diagonal arithmetic: the operator is stored in its
eigenbasis, states are real coefficient vectors in that basis, and the
semigroup / phi-function applications reduce to componentwise weights
computed by :mod:`impns.kernels`.

Both types are immutable after construction and all operations are pure, so
values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, DomainError


class StateVector:
    """Element of the state space H as coefficients in the operator eigenbasis.

    The coefficient array is float64 and marked read-only. |u|_H is the
    plain Euclidean norm of the coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[float] | np.ndarray):
        arr = np.array(coeffs, dtype=float, copy=True).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    @property
    def norm_h(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def dot(self, other: "StateVector") -> float:
        return float(self.coeffs @ other.coeffs)

    def __add__(self, other: "StateVector") -> "StateVector":
        return StateVector(self.coeffs + other.coeffs)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return StateVector(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "StateVector":
        return StateVector(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "StateVector":
        return StateVector(-self.coeffs)

    def __repr__(self) -> str:
        return f"StateVector({self.coeffs.tolist()!r})"

    @staticmethod
    def zeros(dim: int) -> "StateVector":
        return StateVector(np.zeros(dim))


@dataclass(frozen=True)
class DiagonalOperator:
    """Self-adjoint coercive operator A in its eigenbasis.

    eigenvalues are positive and non-decreasing (repeats allowed for
    eigenspaces of dimension > 1); the smallest one is the coercivity
    constant a. frac_exponent_delta in (0,1) fixes the auxiliary space
    F = D(A^(-delta)) used for measuring bilinear terms.

    Diagonality pins the semigroup constants sharply: |e^(-At)u| <= e^(-at)|u|
    with prefactor 1, and sup_lam lam^d e^(-lam t) <= (d/e)^d t^(-d), which is
    the smoothing prefactor paired with exponent alpha1 = delta.
    """

    eigenvalues: np.ndarray
    frac_exponent_delta: float = 0.5

    def __post_init__(self):
        arr = np.array(self.eigenvalues, dtype=float, copy=True).reshape(-1)
        if arr.size == 0:
            raise ValueError("operator needs at least one eigenvalue")
        if not np.all(arr > 0):
            raise ValueError("eigenvalues must be strictly positive")
        if np.any(np.diff(arr) < 0):
            raise ValueError("eigenvalues must be non-decreasing")
        if not (0.0 < self.frac_exponent_delta < 1.0):
            raise ValueError("frac_exponent_delta must lie in (0,1)")
        arr.setflags(write=False)
        object.__setattr__(self, "eigenvalues", arr)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def coercivity_a(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def k_semigroup(self) -> float:
        """Prefactor K of the semigroup decay bound; 1 for diagonal self-adjoint A."""
        return 1.0

    @property
    def alpha1(self) -> float:
        """Singularity exponent of the F -> H smoothing bound."""
        return self.frac_exponent_delta

    @property
    def k_smoothing(self) -> float:
        """Prefactor K1 = (delta/e)^delta of the F -> H smoothing bound."""
        d = self.frac_exponent_delta
        return float((d / np.e) ** d)

    def _check_dim(self, u: StateVector) -> None:
        if u.dim != self.dim:
            raise DimensionMismatchError(
                f"state dim {u.dim} != operator dim {self.dim}"
            )


def semigroup_apply(A: DiagonalOperator, t: float, u: StateVector) -> StateVector:
    """Apply e^(-At): componentwise exp(-lam_j t) u_j."""
    A._check_dim(u)
    if t < 0:
        raise DomainError(f"semigroup time must be >= 0, got {t}")
    if t == 0.0:
        return u
    return StateVector(kernels.decay_weights(A.eigenvalues, float(t)) * u.coeffs)


def phi1_apply(A: DiagonalOperator, h: float, w: StateVector) -> StateVector:
    """Apply A^(-1)(I - e^(-Ah)): componentwise (1 - exp(-lam h))/lam.

    Realizes the integral of the semigroup over a step, int_0^h e^(-A(h-s)) ds,
    exactly; below lam*h = 1e-8 a 3-term series h(1 - z/2 + z^2/6) avoids
    cancellation.
    """
    A._check_dim(w)
    if h <= 0:
        raise DomainError(f"step h must be > 0, got {h}")
    return StateVector(kernels.phi1_weights(A.eigenvalues, float(h)) * w.coeffs)


def phi2_apply(A: DiagonalOperator, h: float, w: StateVector) -> StateVector:
    """Apply the second phi-function weight (exp(-lam h) - 1 + lam h)/(lam^2 h).

    Together with phi1 this integrates a linear-in-time integrand through the
    semigroup exactly; it is the corrector weight of the exponential
    trapezoidal step.
    """
    A._check_dim(w)
    if h <= 0:
        raise DomainError(f"step h must be > 0, got {h}")
    return StateVector(kernels.phi2_weights(A.eigenvalues, float(h)) * w.coeffs)


def fractional_norm(A: DiagonalOperator, alpha: float, u: StateVector) -> float:
    """Norm of u in the fractional power space X^alpha: (sum lam^(2a)|u_j|^2)^(1/2).

    alpha = 0 recovers |u|_H, alpha = -delta the F-norm, alpha = 1/2 the
    V-norm of the Stokes instantiation.
    """
    A._check_dim(u)
    if alpha == 0.0:
        return u.norm_h
    weights = A.eigenvalues ** float(alpha)
    return float(np.linalg.norm(weights * u.coeffs))
