"""Bound-verification harness: pass/fail certificates on computed trajectories.

Each check compares a measured quantity against the exact bound the theory
predicts and reports max_violation = max(measured - predicted); the verdict
is "pass" iff max_violation <= tolerance, "inapplicable" when the bound's
hypotheses exclude the scenario (e.g. nonpositive contraction rate), and
"fail" otherwise. Violated preconditions raise PreconditionError instead of
silently skipping.

Checks and their ids:

  energy_envelope            pointwise norm bound with impulse terms
  absorbing_set              entry into and stay inside the limit ball
  global_bound               sup-norm bound (both branches of the case split)
  two_solution_contraction   gap decay between two runs on one fiber
  picard_rate                geometric decay of fixed-point residuals
  orthogonality              energy neutrality of the advection term
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .driving import BilinearForm, ImpulseSchedule
from .errors import PreconditionError
from .solver import LocalSolveReport, Trajectory
from .spectral import StateVector

THEOREM_IDS = (
    "energy_envelope",
    "absorbing_set",
    "global_bound",
    "two_solution_contraction",
    "picard_rate",
    "orthogonality",
)


@dataclass
class TheoremReport:
    """Machine-checkable verdict for one bound."""

    theorem_id: str
    verdict: str  # pass | fail | inapplicable
    max_violation: float
    tolerance: float
    predicted: np.ndarray
    measured: np.ndarray
    t: np.ndarray | None = None
    params: dict = field(default_factory=dict)
    note: str = ""

    def to_json_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "verdict": self.verdict,
            "max_violation": float(self.max_violation),
            "tolerance": float(self.tolerance),
            "predicted": [float(x) for x in np.atleast_1d(self.predicted)],
            "measured": [float(x) for x in np.atleast_1d(self.measured)],
            "t": None if self.t is None else [float(x) for x in self.t],
            "params": _jsonable(self.params),
            "note": self.note,
        }

    @property
    def ok(self) -> bool:
        return self.verdict in ("pass", "inapplicable")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _verdict(max_violation: float, tolerance: float) -> str:
    return "pass" if max_violation <= tolerance else "fail"


def bound_tolerance(atol: float, dt: float, dt2_coeff: float = 1.0) -> float:
    """Bound-check tolerance: absolute floor plus the time-stepping budget.

    The theory's bounds are exact in continuous time; a second-order scheme
    contributes an O(dt^2) discrepancy that the harness must not count as a
    violation.
    """
    return atol + dt2_coeff * dt * dt


def recorded_impulse_magnitudes(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Impulse times and the recorded jump sizes |u(t_k) - u(t_k-)| of a run."""
    times = np.array(sorted(traj.left_limits))
    mags = np.array(
        [(traj.state_at(tk) - traj.left_limits[tk]).norm_h for tk in times]
    )
    return times, mags


def energy_bound_curve(
    u0_norm: float,
    f1_norm: float,
    alpha: float,
    impulse_times: Sequence[float],
    impulse_magnitudes: Sequence[float],
    t_grid: np.ndarray,
    strict_before: bool = False,
) -> np.ndarray:
    """Pointwise norm envelope

        (|u0| - f1/alpha) e^(-alpha t) + sum_(t_i <= t) |I_i| e^(-alpha(t-t_i))
                                       + f1/alpha,

    with the actual recorded jump sizes. strict_before=True sums over
    t_i < t instead, which is the branch in force for left limits.
    """
    if alpha <= 0:
        raise PreconditionError("alpha must be > 0")
    base = f1_norm / alpha
    t_grid = np.asarray(t_grid, dtype=float)
    out = (u0_norm - base) * np.exp(-alpha * t_grid) + base
    side = "left" if strict_before else "right"
    times = np.asarray(impulse_times, dtype=float)
    mags = np.asarray(impulse_magnitudes, dtype=float)
    for j, t in enumerate(t_grid):
        n_in = int(np.searchsorted(times, t, side=side))
        if n_in:
            out[j] += float(
                np.sum(mags[:n_in] * np.exp(-alpha * (t - times[:n_in])))
            )
    return out


def _check_points(traj: Trajectory):
    """Flatten a trajectory into (t, norm, is_left) check points."""
    pts = [(float(t), u.norm_h, False) for t, u in zip(traj.times, traj.states)]
    pts.extend((float(tk), left.norm_h, True) for tk, left in traj.left_limits.items())
    pts.sort(key=lambda p: (p[0], p[2]))
    return pts


def _require_finite_gamma(gamma: float) -> None:
    if not math.isfinite(gamma):
        raise PreconditionError("Gamma infinite: total impulse mass must be finite")


def check_energy_envelope(
    traj: Trajectory,
    u0_norm: float,
    f1_norm: float,
    alpha: float,
    gamma: float,
    tolerance: float,
) -> TheoremReport:
    """Pointwise |u(t)|_H <= envelope, evaluated at every sample and left limit."""
    _require_finite_gamma(gamma)
    imp_times, imp_mags = recorded_impulse_magnitudes(traj)
    pts = _check_points(traj)
    ts = np.array([p[0] for p in pts])
    measured = np.array([p[1] for p in pts])
    predicted = np.empty_like(measured)
    for i, (t, _, is_left) in enumerate(pts):
        predicted[i] = energy_bound_curve(
            u0_norm, f1_norm, alpha, imp_times, imp_mags, np.array([t]),
            strict_before=is_left,
        )[0]
    violation = float(np.max(measured - predicted))
    return TheoremReport(
        theorem_id="energy_envelope",
        verdict=_verdict(violation, tolerance),
        max_violation=violation,
        tolerance=tolerance,
        predicted=predicted,
        measured=measured,
        t=ts,
        params={
            "alpha": alpha,
            "f1_norm": f1_norm,
            "Gamma": gamma,
            "u0_norm": u0_norm,
            "impulse_times": imp_times,
            "impulse_magnitudes": imp_mags,
        },
    )


def absorbing_entry_time(u0_norm: float, f1_norm: float, alpha: float,
                         entry_tol: float) -> float:
    """Time by which the envelope's initial-data term has decayed below entry_tol.

    The impulse terms are individually bounded by their total mass, which the
    ball radius already carries, so no further adjustment is needed.
    """
    excess = max(u0_norm - f1_norm / alpha, 1e-30)
    return max(0.0, math.log(excess / entry_tol) / alpha)


def check_absorbing_set(
    traj: Trajectory,
    u0_norm: float,
    f1_norm: float,
    alpha: float,
    gamma: float,
    entry_tol: float = 1e-3,
) -> TheoremReport:
    """The run enters the ball of radius f1/alpha + Gamma by the bound-derived
    time and never leaves it afterwards."""
    _require_finite_gamma(gamma)
    radius = f1_norm / alpha + gamma
    t_star = absorbing_entry_time(u0_norm, f1_norm, alpha, entry_tol)
    pts = [p for p in _check_points(traj) if p[0] >= t_star]
    params = {
        "alpha": alpha,
        "f1_norm": f1_norm,
        "Gamma": gamma,
        "radius": radius,
        "entry_time": t_star,
        "entry_tol": entry_tol,
    }
    if not pts:
        return TheoremReport(
            theorem_id="absorbing_set",
            verdict="inapplicable",
            max_violation=0.0,
            tolerance=entry_tol,
            predicted=np.array([radius]),
            measured=np.array([]),
            params=params,
            note=f"horizon {traj.horizon} ends before entry time {t_star:.6g}",
        )
    ts = np.array([p[0] for p in pts])
    measured = np.array([p[1] for p in pts])
    predicted = np.full_like(measured, radius)
    violation = float(np.max(measured - predicted))
    return TheoremReport(
        theorem_id="absorbing_set",
        verdict=_verdict(violation, entry_tol),
        max_violation=violation,
        tolerance=entry_tol,
        predicted=predicted,
        measured=measured,
        t=ts,
        params=params,
    )


def check_dissipativity(
    traj: Trajectory,
    u0_norm: float,
    f1_norm: float,
    alpha: float,
    gamma: float,
    tolerance: float,
    entry_tol: float = 1e-3,
) -> tuple[TheoremReport, TheoremReport]:
    """Envelope and absorbing-set checks together (they share hypotheses)."""
    return (
        check_energy_envelope(traj, u0_norm, f1_norm, alpha, gamma, tolerance),
        check_absorbing_set(traj, u0_norm, f1_norm, alpha, gamma, entry_tol),
    )


def check_global_bound(
    traj: Trajectory,
    u0_norm: float,
    f1_norm: float,
    alpha: float,
    gamma: float,
    tolerance: float,
) -> TheoremReport:
    """sup_t |u(t)| <= 2 C(|u0|) + Gamma with C(r) = max(r, f1/alpha), and the
    sharper chain bound |u0| + f1/alpha + Gamma (which implies the first)."""
    _require_finite_gamma(gamma)
    base = f1_norm / alpha
    c_of_r = u0_norm if u0_norm >= base else base
    bound = 2.0 * c_of_r + gamma
    sharper = u0_norm + base + gamma
    sup = max(p[1] for p in _check_points(traj))
    violation = float(max(sup - bound, sup - sharper))
    return TheoremReport(
        theorem_id="global_bound",
        verdict=_verdict(violation, tolerance),
        max_violation=violation,
        tolerance=tolerance,
        predicted=np.array([bound]),
        measured=np.array([sup]),
        params={
            "alpha": alpha,
            "f1_norm": f1_norm,
            "Gamma": gamma,
            "u0_norm": u0_norm,
            "C_of_u0": c_of_r,
            "sharper_bound": sharper,
        },
    )


def _aligned_gap_points(t1: Trajectory, t2: Trajectory):
    """(t, gap, is_left) on the common sample times of two runs."""
    atol = 1e-12 * (1.0 + max(t1.horizon, t2.horizon))
    pts = []
    js = np.searchsorted(t2.times, t1.times)
    for i, t in enumerate(t1.times):
        for j in (js[i] - 1, js[i]):
            if 0 <= j < len(t2.times) and abs(t2.times[j] - t) <= atol:
                pts.append((float(t), (t1.states[i] - t2.states[j]).norm_h, False))
                break
    for tk, left1 in t1.left_limits.items():
        for sk, left2 in t2.left_limits.items():
            if abs(tk - sk) <= atol:
                pts.append((float(tk), (left1 - left2).norm_h, True))
    if not pts:
        raise ValueError("trajectories share no sample times")
    pts.sort(key=lambda p: (p[0], p[2]))
    return pts


def check_two_solution_contraction(
    traj1: Trajectory,
    traj2: Trajectory,
    alpha: float,
    binf: float,
    f1_norm: float,
    gamma: float,
    forcing_lipschitz_C: float,
    impulse_lipschitz_C2: float,
    schedule: ImpulseSchedule,
    tolerance: float,
) -> TheoremReport:
    """Gap decay |u1(t)-u2(t)| <= (1+C2)^k(t) e^(-beta t) |u1(0)-u2(0)| with
    beta = alpha - 2*Binf*r0 - C and r0 = 2*f1/alpha + Gamma.

    Requires both initial states inside the ball of radius f1/alpha
    (hypothesis of the estimate); nonpositive beta yields "inapplicable"
    since the theory claims nothing there.
    """
    _require_finite_gamma(gamma)
    r0 = 2.0 * f1_norm / alpha + gamma
    beta = alpha - 2.0 * binf * r0 - forcing_lipschitz_C
    hypothesis_radius = f1_norm / alpha
    params = {
        "alpha": alpha,
        "Binf": binf,
        "f1_norm": f1_norm,
        "Gamma": gamma,
        "C": forcing_lipschitz_C,
        "C2": impulse_lipschitz_C2,
        "beta": beta,
        "r0": r0,
    }
    for traj in (traj1, traj2):
        n0 = traj.states[0].norm_h
        if n0 > hypothesis_radius * (1.0 + 1e-12) + 1e-15:
            raise PreconditionError(
                f"initial state norm {n0:.6g} outside hypothesis ball of radius "
                f"{hypothesis_radius:.6g}"
            )
    sup_norm = max(
        max(p[1] for p in _check_points(traj1)),
        max(p[1] for p in _check_points(traj2)),
    )
    params["stayed_in_r0_ball"] = bool(sup_norm <= r0 + 1e-9)
    if beta <= 0.0:
        return TheoremReport(
            theorem_id="two_solution_contraction",
            verdict="inapplicable",
            max_violation=0.0,
            tolerance=tolerance,
            predicted=np.array([]),
            measured=np.array([]),
            params=params,
            note=f"beta = {beta:.6g} <= 0: no contraction claimed",
        )
    pts = _aligned_gap_points(traj1, traj2)
    gap0 = pts[0][1]
    ts = np.array([p[0] for p in pts])
    measured = np.array([p[1] for p in pts])
    predicted = np.empty_like(measured)
    times = schedule.times
    for i, (t, _, is_left) in enumerate(pts):
        k = int(np.searchsorted(times, t, side="left" if is_left else "right"))
        predicted[i] = (1.0 + impulse_lipschitz_C2) ** k * math.exp(-beta * t) * gap0
    violation = float(np.max(measured - predicted))
    return TheoremReport(
        theorem_id="two_solution_contraction",
        verdict=_verdict(violation, tolerance),
        max_violation=violation,
        tolerance=tolerance,
        predicted=predicted,
        measured=measured,
        t=ts,
        params=params,
    )


def check_picard_rate(
    report: LocalSolveReport, tolerance: float = 1e-3
) -> TheoremReport:
    """Successive fixed-point residuals decay at least geometrically with the
    certified contraction factor, past the first iterate."""
    q = report.contraction_q
    params = {
        "contraction_q": q,
        "T0": report.T0,
        "delta0": report.delta0,
        "d1": report.d1_value,
        "n_residuals": len(report.iter_residuals),
    }
    if q >= 1.0:
        return TheoremReport(
            theorem_id="picard_rate",
            verdict="inapplicable",
            max_violation=0.0,
            tolerance=tolerance,
            predicted=np.array([]),
            measured=np.array([]),
            params=params,
            note=f"contraction constant q = {q:.6g} >= 1",
        )
    res = report.iter_residuals
    ratios = [
        res[n + 1] / res[n] for n in range(1, len(res) - 1) if res[n] > 0
    ]
    measured = np.array(ratios)
    predicted = np.full_like(measured, q)
    violation = float(np.max(measured - predicted)) if ratios else -q
    return TheoremReport(
        theorem_id="picard_rate",
        verdict=_verdict(violation, tolerance),
        max_violation=violation,
        tolerance=tolerance,
        predicted=predicted,
        measured=measured,
        params=params,
    )


def check_orthogonality(
    bilinear: BilinearForm,
    sample_count: int = 100,
    rng_seed: int = 0,
    tolerance: float = 1e-10,
    t_abs: float = 0.0,
    state_sampler=None,
) -> TheoremReport:
    """Energy neutrality of the advection term: <B(u,v), v> = 0 up to roundoff,
    normalized by |u| |v|^2. state_sampler(rng) may supply domain-specific
    states (e.g. dealiased divergence-free fields)."""
    rng = np.random.default_rng(rng_seed)
    if state_sampler is None:
        def state_sampler(r):
            return StateVector(r.standard_normal(bilinear.dim))
    measured = np.empty(sample_count)
    for i in range(sample_count):
        u = state_sampler(rng)
        v = state_sampler(rng)
        w = bilinear.evaluator(t_abs, u, v)
        denom = u.norm_h * v.norm_h**2
        measured[i] = abs(w.dot(v)) / denom if denom > 0 else 0.0
    predicted = np.zeros_like(measured)
    violation = float(np.max(measured))
    return TheoremReport(
        theorem_id="orthogonality",
        verdict=_verdict(violation, tolerance),
        max_violation=violation,
        tolerance=tolerance,
        predicted=predicted,
        measured=measured,
        params={"sample_count": sample_count, "rng_seed": rng_seed},
    )
