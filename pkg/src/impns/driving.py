"""Nonautonomous and impulsive data driving the evolution equation.

The hull of the time-dependent data is represented by raw shift offsets
tau >= 0: a hull point fixes which time-shifted copy of the bilinear form
and forcing drives the run. Evaluators therefore take absolute (physical)
time; composing with a hull point means evaluating at tau + t.

All types are immutable; evaluators must be pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ContractViolationError, DomainError
from .spectral import StateVector


@dataclass(frozen=True)
class HullPoint:
    """Point of the translation hull: a time-shift offset."""

    shift_tau: float = 0.0

    def __post_init__(self):
        if self.shift_tau < 0:
            raise ValueError("shift_tau must be >= 0")


def shift(omega: HullPoint, t: float) -> HullPoint:
    """Translation flow on the hull: tau -> tau + t."""
    if t < 0:
        raise DomainError(f"shift time must be >= 0, got {t}")
    return HullPoint(omega.shift_tau + t)


# ---------------------------------------------------------------------------
# impulse operators and schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImpulseOperator:
    """Jump map applied to the left limit at an impulse time.

    Three built-in kinds with analytically known bounds:

      zero                 I(u) = 0,                    sup 0,  Lipschitz 0
      constant_jump        I(u) = c,                    sup |c|, Lipschitz 0
      scaled_saturation    I(u) = a tanh(|u|) d/|d|,    sup |a|, Lipschitz |a|

    (tanh composed with the norm map is 1-Lipschitz, so the saturation kind
    has Lipschitz constant exactly |a|.)

    A custom callable is accepted as an escape hatch, but its declared
    constants are taken on faith and flagged verified=False so reports can
    mark the resulting certificates as resting on unverified constants.
    """

    kind: str
    jump: StateVector | None = None
    amplitude: float = 0.0
    direction: StateVector | None = None
    func: Callable[[StateVector], StateVector] | None = None
    sup_bound: float = 0.0
    lipschitz: float = 0.0
    verified: bool = True

    @staticmethod
    def zero() -> "ImpulseOperator":
        return ImpulseOperator(kind="zero")

    @staticmethod
    def constant(c: StateVector) -> "ImpulseOperator":
        return ImpulseOperator(kind="constant_jump", jump=c, sup_bound=c.norm_h)

    @staticmethod
    def saturation(amplitude: float, direction: StateVector) -> "ImpulseOperator":
        if direction.norm_h == 0:
            raise ValueError("saturation direction must be nonzero")
        return ImpulseOperator(
            kind="scaled_saturation",
            amplitude=float(amplitude),
            direction=direction,
            sup_bound=abs(float(amplitude)),
            lipschitz=abs(float(amplitude)),
        )

    @staticmethod
    def custom(
        func: Callable[[StateVector], StateVector], sup_bound: float, lipschitz: float
    ) -> "ImpulseOperator":
        return ImpulseOperator(
            kind="custom",
            func=func,
            sup_bound=float(sup_bound),
            lipschitz=float(lipschitz),
            verified=False,
        )

    def __call__(self, u: StateVector) -> StateVector:
        if self.kind == "zero":
            return StateVector.zeros(u.dim)
        if self.kind == "constant_jump":
            return self.jump
        if self.kind == "scaled_saturation":
            unit = self.direction * (1.0 / self.direction.norm_h)
            return unit * (self.amplitude * np.tanh(u.norm_h))
        if self.kind == "custom":
            return self.func(u)
        raise ValueError(f"unknown impulse kind {self.kind!r}")


@dataclass(frozen=True)
class ImpulseSchedule:
    """Strictly increasing impulse times with their jump operators.

    Derived constants: K2 = max_k sup_u |I_k(u)|, K3 = max_k Lip(I_k), and
    Gamma = sum_k sup_u |I_k(u)| (overridable, e.g. to +inf, to model
    non-summable tails beyond the configured horizon).
    """

    times: np.ndarray
    operators: tuple[ImpulseOperator, ...]
    gamma_override: float | None = None

    def __post_init__(self):
        arr = np.array(self.times, dtype=float, copy=True).reshape(-1)
        if arr.size != len(self.operators):
            raise ValueError("times and operators must have equal length")
        if arr.size and not np.all(arr > 0):
            raise ValueError("impulse times must be positive")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise ValueError("impulse times must be strictly increasing")
        arr.setflags(write=False)
        object.__setattr__(self, "times", arr)

    @staticmethod
    def empty() -> "ImpulseSchedule":
        return ImpulseSchedule(times=np.array([]), operators=())

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def sup_bound_K2(self) -> float:
        if not self.operators:
            return 0.0
        return max(op.sup_bound for op in self.operators)

    @property
    def lipschitz_K3(self) -> float:
        if not self.operators:
            return 0.0
        return max(op.lipschitz for op in self.operators)

    @property
    def gamma_Gamma(self) -> float:
        if self.gamma_override is not None:
            return float(self.gamma_override)
        return float(sum(op.sup_bound for op in self.operators))

    @property
    def all_verified(self) -> bool:
        return all(op.verified for op in self.operators)

    def count_up_to(self, T: float) -> int:
        """Number of impulse times t_k <= T (the n_T of the window estimates)."""
        return int(np.searchsorted(self.times, T, side="right"))


def apply_impulse(schedule: ImpulseSchedule, k: int, u_left: StateVector) -> StateVector:
    """Post-jump state u_left + I_k(u_left); pure arithmetic, bit-exact."""
    if not (0 <= k < len(schedule)):
        raise IndexError(f"impulse index {k} out of range for {len(schedule)} impulses")
    return u_left + schedule.operators[k](u_left)


# ---------------------------------------------------------------------------
# bilinear form and forcing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BilinearForm:
    """Time-dependent bilinear operator with a declared size bound.

    evaluator(t_abs, u, v) returns the H-coefficients of B(t_abs)(u, v);
    its theorem-relevant size is measured in the F-norm supplied by f_norm
    (H-norm when None). norm_bound_Binf is the declared analytic bound that
    must dominate any empirical estimate.
    """

    evaluator: Callable[[float, StateVector, StateVector], StateVector]
    norm_bound_Binf: float
    dim: int
    f_norm: Callable[[StateVector], float] | None = None
    shift_grid: tuple[float, ...] = (0.0,)

    def measure(self, w: StateVector) -> float:
        if self.f_norm is None:
            return w.norm_h
        return self.f_norm(w)

    @staticmethod
    def zero(dim: int) -> "BilinearForm":
        return BilinearForm(
            evaluator=lambda t, u, v: StateVector.zeros(dim),
            norm_bound_Binf=0.0,
            dim=dim,
        )

    @staticmethod
    def toy_skew(
        scale: float = 1.0,
        dim: int = 2,
        f_norm: Callable[[StateVector], float] | None = None,
        norm_bound: float | None = None,
    ) -> "BilinearForm":
        """B(u,v) = scale * u_1 * Jv with J the rotation [[0,-1],[1,0]] on the
        first two coordinates. Energy-orthogonal: <B(u,v), v> = 0 exactly."""
        if dim < 2:
            raise ValueError("toy skew form needs dim >= 2")
        s = float(scale)

        def ev(t_abs: float, u: StateVector, v: StateVector) -> StateVector:
            out = np.zeros(dim)
            out[0] = -v.coeffs[1]
            out[1] = v.coeffs[0]
            return StateVector(s * u.coeffs[0] * out)

        # |B(u,v)| = |s||u_1||v_(1,2)| <= |s||u||v|, attained on unit vectors.
        return BilinearForm(
            evaluator=ev,
            norm_bound_Binf=abs(s) if norm_bound is None else float(norm_bound),
            dim=dim,
            f_norm=f_norm,
        )


@dataclass(frozen=True)
class Forcing:
    """Forcing term with declared size and Lipschitz data.

    evaluator(t_abs, u) returns the H-projection of the physical forcing at
    absolute time t_abs and state u; it must be right-continuous at the
    listed discontinuity times with left limits (evaluated by stepping the
    time argument one ulp to the left).
    """

    evaluator: Callable[[float, StateVector], StateVector]
    bound_M: float
    lipschitz_L: float
    sup_norm_f1: float
    dim: int
    discontinuity_times: tuple[float, ...] = ()

    @staticmethod
    def zero(dim: int) -> "Forcing":
        return Forcing(
            evaluator=lambda t, u: StateVector.zeros(dim),
            bound_M=0.0,
            lipschitz_L=0.0,
            sup_norm_f1=0.0,
            dim=dim,
        )

    @staticmethod
    def constant(c: StateVector) -> "Forcing":
        return Forcing(
            evaluator=lambda t, u: c,
            bound_M=c.norm_h,
            lipschitz_L=0.0,
            sup_norm_f1=c.norm_h,
            dim=c.dim,
        )

    @staticmethod
    def sinusoidal(c: StateVector, freq: float = 1.0) -> "Forcing":
        """f(t) = sin(freq*t) * c."""
        return Forcing(
            evaluator=lambda t, u: c * float(np.sin(freq * t)),
            bound_M=c.norm_h,
            lipschitz_L=0.0,
            sup_norm_f1=c.norm_h,
            dim=c.dim,
        )


def eval_forcing(f: Forcing, t: float, omega: HullPoint, u: StateVector) -> StateVector:
    """Forcing seen from hull point omega at local time t: f(tau + t, u)."""
    if t < 0:
        raise DomainError(f"local time must be >= 0, got {t}")
    return f.evaluator(omega.shift_tau + t, u)


def eval_forcing_left(f: Forcing, t: float, omega: HullPoint, u: StateVector) -> StateVector:
    """Left limit of the forcing at local time t (one-ulp step back in time)."""
    t_abs = omega.shift_tau + t
    return f.evaluator(float(np.nextafter(t_abs, -np.inf)), u)


@dataclass(frozen=True)
class DrivenSystem:
    """Bundle of the nonautonomous data: bilinear form, forcing, impulses."""

    bilinear: BilinearForm
    forcing: Forcing
    schedule: ImpulseSchedule

    def __post_init__(self):
        if self.bilinear.dim != self.forcing.dim:
            raise ValueError("bilinear and forcing dimensions disagree")

    @property
    def dim(self) -> int:
        return self.forcing.dim


# ---------------------------------------------------------------------------
# constant estimation
# ---------------------------------------------------------------------------


def _unit_samples(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    w = rng.standard_normal((count, dim))
    norms = np.linalg.norm(w, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return w / norms


def estimate_B_norm(B: BilinearForm, sample_count: int, rng_seed: int) -> float:
    """Empirical sup of |B(t)(u,v)|_F over random unit pairs and the shift grid.

    The declared analytic bound must dominate the estimate; callers treat a
    violation as evidence the declared constant is wrong.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(rng_seed)
    us = _unit_samples(rng, B.dim, sample_count)
    vs = _unit_samples(rng, B.dim, sample_count)
    best = 0.0
    for tau in B.shift_grid:
        for i in range(sample_count):
            w = B.evaluator(float(tau), StateVector(us[i]), StateVector(vs[i]))
            best = max(best, B.measure(w))
    return best


def estimate_f_norm(f: Forcing, horizon: float, sample_count: int) -> float:
    """Empirical sup of |f(t, u)|_H over a time grid and random states.

    The time grid is uniform over [0, horizon] (an odd point count, so
    midpoints like horizon/2 are hit exactly) augmented with the declared
    discontinuity times and their left neighbours. States are drawn from a
    fixed internal seed; the estimate is deterministic.
    """
    if horizon <= 0:
        raise DomainError(f"horizon must be > 0, got {horizon}")
    n_t = max(3, sample_count if sample_count % 2 == 1 else sample_count + 1)
    ts = list(np.linspace(0.0, horizon, n_t))
    for d in f.discontinuity_times:
        if 0 < d <= horizon:
            ts.append(d)
            ts.append(float(np.nextafter(d, -np.inf)))
    rng = np.random.default_rng(20260808)
    states = [StateVector(w) for w in _unit_samples(rng, f.dim, 8)]
    states.append(StateVector.zeros(f.dim))
    best = 0.0
    for t in ts:
        for u in states:
            best = max(best, f.evaluator(float(t), u).norm_h)
    return best


@dataclass(frozen=True)
class SampleGrid:
    """Sampling plan for hull-distance estimation."""

    times: np.ndarray
    state_count: int = 8
    seed: int = 0

    def __post_init__(self):
        arr = np.array(self.times, dtype=float, copy=True).reshape(-1)
        if arr.size == 0:
            raise ValueError("sampling grid must be nonempty")
        arr.setflags(write=False)
        object.__setattr__(self, "times", arr)


def hull_distance(
    omega1: HullPoint,
    omega2: HullPoint,
    f: Forcing,
    B: BilinearForm,
    grid: SampleGrid,
) -> float:
    """Sampled hull metric: sup over the grid of shifted-data differences.

    Approximates the sum of the shifted bilinear-form gap (F-norm, over unit
    pairs) and the shifted forcing gap (H-norm), which is the metric making
    the translation flow continuous on the hull. Symmetric and zero for
    equal shifts by construction.
    """
    rng = np.random.default_rng(grid.seed)
    us = [StateVector(w) for w in _unit_samples(rng, B.dim, grid.state_count)]
    vs = [StateVector(w) for w in _unit_samples(rng, B.dim, grid.state_count)]
    t1 = omega1.shift_tau
    t2 = omega2.shift_tau
    gap_b = 0.0
    gap_f = 0.0
    for t in grid.times:
        for u, v in zip(us, vs):
            w1 = B.evaluator(t1 + t, u, v)
            w2 = B.evaluator(t2 + t, u, v)
            gap_b = max(gap_b, B.measure(w1 - w2))
            fv1 = f.evaluator(t1 + t, u)
            fv2 = f.evaluator(t2 + t, u)
            gap_f = max(gap_f, (fv1 - fv2).norm_h)
    return gap_b + gap_f
