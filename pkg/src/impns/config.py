"""Scenario configuration: TOML schema, validation, and system assembly.

A scenario file declares the problem (abstract toy system or torus
Navier-Stokes), its driving data (advection term, forcing, impulse
schedule), the initial state, the solver knobs, and the verification
toggles. Physical constants carry explicit keys (alpha, f1_norm, K2, K3,
Gamma, C, C2) in the emitted reports for traceability.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .driving import (
    BilinearForm,
    DrivenSystem,
    Forcing,
    HullPoint,
    ImpulseOperator,
    ImpulseSchedule,
)
from .errors import ConfigError
from .ns2d import (
    TorusGrid,
    make_ns_forcing,
    make_ns_system,
    random_divfree,
    taylor_green,
)
from .solver import SolverConfig
from .spectral import DiagonalOperator, StateVector

ALL_CHECKS = (
    "orthogonality",
    "energy_envelope",
    "absorbing_set",
    "global_bound",
    "two_solution_contraction",
    "picard_rate",
)


@dataclass
class OutputSettings:
    dump_coefficients: bool = False


@dataclass
class VerifySettings:
    checks: tuple[str, ...] = ()
    atol: float = 1e-6
    dt2_coeff: float = 1.0
    entry_tol: float = 1e-3
    contraction_pairs: int = 10
    pair_seed: int = 7
    forcing_lipschitz_C: float | None = None
    window_r: float = 1.0
    orthogonality_samples: int = 100
    orthogonality_tol: float = 1e-10


@dataclass
class BuiltScenario:
    """Everything a command needs to run one configured scenario."""

    problem: str
    A: DiagonalOperator
    system: DrivenSystem
    u0: StateVector
    omega: HullPoint
    solver: SolverConfig
    verify: VerifySettings
    output: OutputSettings
    grid: TorusGrid | None
    seed: int
    constants_echo: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _fail(path: str, msg: str):
    raise ConfigError(f"{path}: {msg}")


def _get(table: dict, path: str, key: str, kind, default=None, required=False):
    if key not in table:
        if required:
            _fail(f"{path}.{key}", "required key missing")
        return default
    val = table[key]
    if kind is float and isinstance(val, (int, float)) and not isinstance(val, bool):
        return float(val)
    if kind is int and isinstance(val, int) and not isinstance(val, bool):
        return int(val)
    if not isinstance(val, kind):
        _fail(f"{path}.{key}", f"expected {kind.__name__}, got {type(val).__name__}")
    return val


def load_config(path: str | Path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        # tomllib error messages carry line/column positions
        raise ConfigError(f"{p}: TOML parse error: {exc}") from exc


def _state_from_list(path: str, coeffs, dim: int | None = None) -> StateVector:
    if not isinstance(coeffs, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in coeffs
    ):
        _fail(path, "expected a list of numbers")
    u = StateVector([float(x) for x in coeffs])
    if dim is not None and u.dim != dim:
        _fail(path, f"expected {dim} coefficients, got {u.dim}")
    return u


def _build_impulses(raw: dict, dim: int, grid: TorusGrid | None) -> ImpulseSchedule:
    entries = raw.get("impulse", [])
    if not isinstance(entries, list):
        _fail("impulse", "expected an array of [[impulse]] tables")
    times = []
    ops = []
    for i, entry in enumerate(entries):
        path = f"impulse[{i}]"
        t = _get(entry, path, "time", float, required=True)
        if t <= 0:
            _fail(f"{path}.time", "must be > 0")
        if times and t <= times[-1]:
            _fail(f"{path}.time", "impulse times must be strictly increasing")
        kind = _get(entry, path, "kind", str, required=True)
        if kind == "zero":
            op = ImpulseOperator.zero()
        elif kind == "constant_jump":
            if grid is not None:
                mag = _get(entry, path, "magnitude", float, required=True)
                seed = _get(entry, path, "direction_seed", int, default=0)
                op = ImpulseOperator.constant(
                    random_divfree(grid, seed, energy=mag * mag)
                )
            else:
                op = ImpulseOperator.constant(
                    _state_from_list(f"{path}.coeffs", entry.get("coeffs"), dim)
                )
        elif kind == "scaled_saturation":
            amp = _get(entry, path, "amplitude", float, required=True)
            if grid is not None:
                seed = _get(entry, path, "direction_seed", int, default=0)
                direction = random_divfree(grid, seed, energy=1.0)
            else:
                direction = _state_from_list(
                    f"{path}.direction", entry.get("direction"), dim
                )
            op = ImpulseOperator.saturation(amp, direction)
        else:
            _fail(f"{path}.kind", f"unknown impulse kind {kind!r}")
        times.append(t)
        ops.append(op)
    gamma_override = None
    if "impulses" in raw:
        gamma_override = _get(raw["impulses"], "impulses", "gamma_override", float)
    return ImpulseSchedule(np.array(times), tuple(ops), gamma_override=gamma_override)


def _build_toy_forcing(raw: dict, dim: int) -> Forcing:
    sec = raw.get("forcing", {"kind": "zero"})
    kind = _get(sec, "forcing", "kind", str, default="zero")
    if kind == "zero":
        f = Forcing.zero(dim)
    elif kind == "constant":
        c = _state_from_list("forcing.coeffs", sec.get("coeffs"), dim)
        f = Forcing.constant(c)
    elif kind == "sinusoidal":
        c = _state_from_list("forcing.coeffs", sec.get("coeffs"), dim)
        freq = _get(sec, "forcing", "freq", float, default=1.0)
        f = Forcing.sinusoidal(c, freq=freq)
    else:
        _fail("forcing.kind", f"unknown toy forcing kind {kind!r}")
    return _apply_forcing_overrides(sec, f)


def _apply_forcing_overrides(sec: dict, f: Forcing) -> Forcing:
    f1 = _get(sec, "forcing", "f1_norm", float, default=f.sup_norm_f1)
    m = _get(sec, "forcing", "bound_M", float, default=f.bound_M)
    lip = _get(sec, "forcing", "lipschitz_L", float, default=f.lipschitz_L)
    if (f1, m, lip) == (f.sup_norm_f1, f.bound_M, f.lipschitz_L):
        return f
    return Forcing(
        evaluator=f.evaluator,
        bound_M=m,
        lipschitz_L=lip,
        sup_norm_f1=f1,
        dim=f.dim,
        discontinuity_times=f.discontinuity_times,
    )


def _build_ns_forcing(raw: dict, grid: TorusGrid) -> Forcing | None:
    sec = raw.get("forcing", {"kind": "zero"})
    kind = _get(sec, "forcing", "kind", str, default="zero")
    if kind == "zero":
        return None
    if kind == "shear_y":
        amp = _get(sec, "forcing", "amplitude", float, default=1.0)

        def phi(t, xx, yy, u_vals):
            return np.stack([amp * np.sin(yy), np.zeros_like(yy)])

        f = make_ns_forcing(grid, phi, pointwise_bound=abs(amp), lipschitz_C=0.0)
        # (amp sin y, 0) is mean-free and divergence-free: its H norm is
        # exactly amp * sqrt(2) * pi, sharper than the generic 2 pi bound
        sharp = abs(amp) * np.sqrt(2.0) * np.pi
        f = Forcing(f.evaluator, bound_M=sharp, lipschitz_L=0.0, sup_norm_f1=sharp,
                    dim=f.dim)
        return _apply_forcing_overrides(sec, f)
    _fail("forcing.kind", f"unknown ns2d forcing kind {kind!r}")


def build_scenario(raw: dict, seed_override: int | None = None) -> BuiltScenario:
    problem = _get(
        raw.get("problem", {}), "problem", "kind", str, required=True
    )
    solver_sec = raw.get("solver", {})
    try:
        solver = SolverConfig(
            dt=_get(solver_sec, "solver", "dt", float, required=True),
            quad_substeps=_get(solver_sec, "solver", "quad_substeps", int, default=1),
            picard_tol=_get(solver_sec, "solver", "picard_tol", float, default=1e-11),
            picard_max_iter=_get(
                solver_sec, "solver", "picard_max_iter", int, default=80
            ),
            horizon_T=_get(solver_sec, "solver", "horizon_T", float, required=True),
            blowup_factor=_get(
                solver_sec, "solver", "blowup_factor", float, default=1e6
            ),
        )
    except ConfigError:
        raise
    hull_tau = _get(raw.get("hull", {}), "hull", "shift_tau", float, default=0.0)
    if hull_tau < 0:
        _fail("hull.shift_tau", "must be >= 0")
    omega = HullPoint(hull_tau)

    u0_sec = raw.get("u0", {})
    seed = seed_override if seed_override is not None else _get(
        u0_sec, "u0", "seed", int, default=0
    )

    if problem == "abstract_toy":
        op_sec = raw.get("operator", {})
        eigs = op_sec.get("eigenvalues")
        if not isinstance(eigs, list) or not eigs:
            _fail("operator.eigenvalues", "required nonempty list of numbers")
        delta = _get(op_sec, "operator", "frac_exponent_delta", float, default=0.5)
        try:
            A = DiagonalOperator(np.array([float(x) for x in eigs]), delta)
        except ValueError as exc:
            _fail("operator.eigenvalues", str(exc))
        dim = A.dim
        grid = None

        b_sec = raw.get("bilinear", {"kind": "zero"})
        b_kind = _get(b_sec, "bilinear", "kind", str, default="zero")
        if b_kind == "zero":
            bilinear = BilinearForm.zero(dim)
        elif b_kind == "skew":
            scale = _get(b_sec, "bilinear", "scale", float, default=1.0)
            norm_bound = _get(b_sec, "bilinear", "norm_bound", float, default=None)
            bilinear = BilinearForm.toy_skew(
                scale=scale, dim=dim, norm_bound=norm_bound
            )
        else:
            _fail("bilinear.kind", f"unknown bilinear kind {b_kind!r}")

        forcing = _build_toy_forcing(raw, dim)
        schedule = _build_impulses(raw, dim, None)
        system = DrivenSystem(bilinear=bilinear, forcing=forcing, schedule=schedule)

        u0_kind = _get(u0_sec, "u0", "kind", str, default="explicit")
        if u0_kind == "explicit":
            u0 = _state_from_list("u0.coeffs", u0_sec.get("coeffs"), dim)
        elif u0_kind == "random":
            energy = _get(u0_sec, "u0", "energy", float, default=1.0)
            rng = np.random.default_rng(seed)
            vec = rng.standard_normal(dim)
            u0 = StateVector(vec * np.sqrt(energy) / np.linalg.norm(vec))
        else:
            _fail("u0.kind", f"unknown toy u0 kind {u0_kind!r}")

    elif problem == "ns2d":
        ns_sec = raw.get("ns2d", {})
        n_modes = _get(ns_sec, "ns2d", "n_modes", int, required=True)
        nu = _get(ns_sec, "ns2d", "nu", float, required=True)
        delta = _get(ns_sec, "ns2d", "delta", float, default=0.5)
        if nu <= 0:
            _fail("ns2d.nu", "must be > 0")
        try:
            grid = TorusGrid(n_modes)
        except ValueError as exc:
            _fail("ns2d.n_modes", str(exc))
        q_kind = _get(ns_sec, "ns2d", "q_kind", str, default="constant")
        q_value = _get(ns_sec, "ns2d", "q_value", float, default=1.0)
        if q_kind == "constant":
            q_func = lambda t: q_value  # noqa: E731
            q_bound_default = abs(q_value)
        elif q_kind == "cosine":
            q_freq = _get(ns_sec, "ns2d", "q_freq", float, default=1.0)
            q_func = lambda t: q_value * np.cos(q_freq * t)  # noqa: E731
            q_bound_default = abs(q_value)
        else:
            _fail("ns2d.q_kind", f"unknown q kind {q_kind!r}")
        q_bound = _get(ns_sec, "ns2d", "q_bound", float, default=q_bound_default)

        forcing = _build_ns_forcing(raw, grid)
        schedule = _build_impulses(raw, grid.state_dim, grid)
        A, system = make_ns_system(
            grid, nu, q_func, q_bound, forcing=forcing, schedule=schedule, delta=delta
        )

        u0_kind = _get(u0_sec, "u0", "kind", str, default="taylor_green")
        if u0_kind == "taylor_green":
            u0 = taylor_green(0.0, nu, grid).to_state()
        elif u0_kind == "random_divfree":
            energy = _get(u0_sec, "u0", "energy", float, default=1.0)
            u0 = random_divfree(grid, seed, energy=energy)
        elif u0_kind == "explicit":
            u0 = _state_from_list("u0.coeffs", u0_sec.get("coeffs"), grid.state_dim)
        else:
            _fail("u0.kind", f"unknown ns2d u0 kind {u0_kind!r}")
    else:
        _fail("problem.kind", f"unknown problem kind {problem!r}")

    v_sec = raw.get("verify", {})
    checks = v_sec.get("checks", [])
    if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
        _fail("verify.checks", "expected a list of check names")
    unknown = [c for c in checks if c not in ALL_CHECKS]
    if unknown:
        _fail("verify.checks", f"unknown checks {unknown!r}; valid: {ALL_CHECKS}")
    verify = VerifySettings(
        checks=tuple(checks),
        atol=_get(v_sec, "verify", "atol", float, default=1e-6),
        dt2_coeff=_get(v_sec, "verify", "dt2_coeff", float, default=1.0),
        entry_tol=_get(v_sec, "verify", "entry_tol", float, default=1e-3),
        contraction_pairs=_get(v_sec, "verify", "contraction_pairs", int, default=10),
        pair_seed=_get(v_sec, "verify", "pair_seed", int, default=7),
        forcing_lipschitz_C=_get(v_sec, "verify", "forcing_lipschitz_C", float,
                                 default=None),
        window_r=_get(v_sec, "verify", "window_r", float, default=1.0),
        orthogonality_samples=_get(
            v_sec, "verify", "orthogonality_samples", int, default=100
        ),
        orthogonality_tol=_get(
            v_sec, "verify", "orthogonality_tol", float, default=1e-10
        ),
    )

    out_sec = raw.get("output", {})
    output = OutputSettings(
        dump_coefficients=bool(
            _get(out_sec, "output", "dump_coefficients", bool, default=False)
        )
    )

    try:
        solver.validate_against(system.schedule)
    except ConfigError as exc:
        _fail("solver.dt", str(exc))

    constants_echo = {
        "problem": problem,
        "alpha": A.coercivity_a,
        "delta": A.frac_exponent_delta,
        "K": A.k_semigroup,
        "K1": A.k_smoothing,
        "alpha1": A.alpha1,
        "Binf": system.bilinear.norm_bound_Binf,
        "f1_norm": system.forcing.sup_norm_f1,
        "M": system.forcing.bound_M,
        "N": system.forcing.lipschitz_L,
        "K2": system.schedule.sup_bound_K2,
        "K3": system.schedule.lipschitz_K3,
        "Gamma": system.schedule.gamma_Gamma,
        "C2": system.schedule.lipschitz_K3,
        "impulse_constants_verified": system.schedule.all_verified,
        "dim": system.dim,
    }
    return BuiltScenario(
        problem=problem,
        A=A,
        system=system,
        u0=u0,
        omega=omega,
        solver=solver,
        verify=verify,
        output=output,
        grid=grid,
        seed=seed,
        constants_echo=constants_echo,
        raw=raw,
    )


def load_scenario(path: str | Path, seed_override: int | None = None) -> BuiltScenario:
    return build_scenario(load_config(path), seed_override=seed_override)
