"""Command-line surface: simulate / verify / constants.

Exit codes: 0 all checks pass or are inapplicable, 1 check failure,
2 configuration error, 3 numerical abort (blow-up guard).

Output files (under --out-dir, default $IMPNS_OUT_DIR or the cwd):

  simulate   trajectory.csv, run.json
  verify     reports.json, bounds.csv (plus the simulate outputs)
  constants  constants.json

CSV numbers use the shortest round-trip decimal representation; repeated
runs with the same config and seed are byte-identical below the versioned
header line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import BuiltScenario, load_scenario
from .driving import ImpulseSchedule
from .errors import (
    BlowUpError,
    ConfigError,
    ImpnsError,
    NoAdmissibleWindowError,
    PicardDivergedError,
    PicardMaxIterError,
    PreconditionError,
)
from .ns2d import random_divfree
from .solver import (
    SolverConfig,
    Trajectory,
    constants_for,
    find_local_window,
    integrate,
    picard_iterate,
    window_table,
)
from .spectral import StateVector, fractional_norm
from .verify import (
    TheoremReport,
    bound_tolerance,
    check_absorbing_set,
    check_energy_envelope,
    check_global_bound,
    check_orthogonality,
    check_picard_rate,
    check_two_solution_contraction,
)

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _num(x: float) -> str:
    return repr(float(x))


def write_trajectory_csv(path: Path, traj: Trajectory, scen: BuiltScenario) -> None:
    dump = scen.output.dump_coefficients
    header = "t,norm_H,norm_V,is_impulse"
    if dump:
        header += "," + ",".join(f"c{i}" for i in range(scen.system.dim))
    lines = [f"# impns {__version__} trajectory", header]

    def row(t: float, u, flag: int) -> str:
        cells = [
            _num(t), _num(u.norm_h), _num(fractional_norm(scen.A, 0.5, u)), str(flag)
        ]
        if dump:
            cells.extend(_num(c) for c in u.coeffs)
        return ",".join(cells)

    for t, u in zip(traj.times, traj.states):
        t = float(t)
        if t in traj.left_limits:
            lines.append(row(t, traj.left_limits[t], 1))
            lines.append(row(t, u, 1))
        else:
            lines.append(row(t, u, 0))
    path.write_text("\n".join(lines) + "\n")


def write_bounds_csv(path: Path, rows: list[tuple[str, int, float, float, float]]) -> None:
    lines = [f"# impns {__version__} bounds", "theorem_id,series,t,measured,predicted"]
    for theorem_id, series, t, measured, predicted in rows:
        lines.append(
            f"{theorem_id},{series},{_num(t)},{_num(measured)},{_num(predicted)}"
        )
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _run_json_payload(scen: BuiltScenario, seed, timings: dict, status: str,
                      diagnostic: str = "") -> dict:
    return {
        "version": __version__,
        "status": status,
        "diagnostic": diagnostic,
        "seed": seed,
        "constants": scen.constants_echo,
        "solver": {
            "dt": scen.solver.dt,
            "quad_substeps": scen.solver.quad_substeps,
            "picard_tol": scen.solver.picard_tol,
            "picard_max_iter": scen.solver.picard_max_iter,
            "horizon_T": scen.solver.horizon_T,
            "blowup_factor": scen.solver.blowup_factor,
        },
        "hull_shift": scen.omega.shift_tau,
        "timings": timings,
    }


def _sample_in_ball(scen: BuiltScenario, radius: float, seed: int) -> StateVector:
    rng = np.random.default_rng(seed)
    frac = rng.uniform(0.3, 1.0)
    if scen.grid is not None:
        return random_divfree(scen.grid, seed, energy=(radius * frac) ** 2)
    vec = rng.standard_normal(scen.system.dim)
    return StateVector(vec * (radius * frac / np.linalg.norm(vec)))


def _orthogonality_sampler(scen: BuiltScenario):
    if scen.grid is not None:
        grid = scen.grid

        def sampler(rng):
            return random_divfree(
                grid, int(rng.integers(2**31)), energy=float(rng.uniform(0.5, 2.0))
            )

        return sampler

    def sampler(rng):
        return StateVector(rng.standard_normal(scen.system.dim))

    return sampler


def _curve_rows(report: TheoremReport, series: int = 0):
    if report.t is None:
        return []
    return [
        (report.theorem_id, series, float(t), float(m), float(p))
        for t, m, p in zip(report.t, report.measured, report.predicted)
    ]


def cmd_simulate(args) -> int:
    out_dir = _resolve_out_dir(args)
    scen = load_scenario(args.config, seed_override=args.seed)
    t_start = time.perf_counter()
    try:
        traj = integrate(
            scen.A, scen.system, scen.u0, scen.omega, scen.solver.horizon_T,
            scen.solver,
        )
    except BlowUpError as exc:
        timings = {"total_s": time.perf_counter() - t_start}
        _write_json(
            out_dir / "run.json",
            _run_json_payload(scen, scen.seed, timings, "blow-up", str(exc)),
        )
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERICAL
    timings = {
        "total_s": time.perf_counter() - t_start,
        "samples": len(traj),
    }
    write_trajectory_csv(out_dir / "trajectory.csv", traj, scen)
    _write_json(
        out_dir / "run.json", _run_json_payload(scen, scen.seed, timings, "ok")
    )
    print(f"simulate: {len(traj)} samples -> {out_dir / 'trajectory.csv'}")
    return EXIT_OK


def _contraction_reports(scen: BuiltScenario, threads: int):
    v = scen.verify
    f1 = scen.system.forcing.sup_norm_f1
    alpha = scen.A.coercivity_a
    gamma = scen.system.schedule.gamma_Gamma
    radius = f1 / alpha
    C = (
        v.forcing_lipschitz_C
        if v.forcing_lipschitz_C is not None
        else scen.system.forcing.lipschitz_L
    )
    C2 = scen.system.schedule.lipschitz_K3

    def run_one(u0: StateVector) -> Trajectory:
        return integrate(
            scen.A, scen.system, u0, scen.omega, scen.solver.horizon_T, scen.solver
        )

    pairs = []
    for i in range(v.contraction_pairs):
        u1 = _sample_in_ball(scen, radius, v.pair_seed + 2 * i)
        u2 = _sample_in_ball(scen, radius, v.pair_seed + 2 * i + 1)
        pairs.append((u1, u2))
    states = [u for pair in pairs for u in pair]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trajs = list(pool.map(run_one, states))
    else:
        trajs = [run_one(u) for u in states]
    tol = bound_tolerance(v.atol, scen.solver.dt, v.dt2_coeff)
    reports = []
    for i in range(v.contraction_pairs):
        rep = check_two_solution_contraction(
            trajs[2 * i],
            trajs[2 * i + 1],
            alpha,
            scen.system.bilinear.norm_bound_Binf,
            f1,
            gamma,
            C,
            C2,
            scen.system.schedule,
            tol,
        )
        rep.params["pair"] = i
        reports.append(rep)
    return reports


def _picard_rate_report(scen: BuiltScenario) -> TheoremReport:
    c = constants_for(scen.A, scen.system)
    try:
        win = find_local_window(
            c, scen.A, scen.u0, scen.verify.window_r, scen.system.schedule
        )
    except NoAdmissibleWindowError as exc:
        return TheoremReport(
            theorem_id="picard_rate",
            verdict="inapplicable",
            max_violation=0.0,
            tolerance=1e-3,
            predicted=np.array([]),
            measured=np.array([]),
            note=str(exc),
        )
    dt = win.T0 / 256.0
    if len(scen.system.schedule) > 1:
        dt = min(dt, 0.5 * float(np.min(np.diff(scen.system.schedule.times))))
    cfg = SolverConfig(
        dt=dt,
        quad_substeps=1,
        picard_tol=max(1e-12, scen.solver.picard_tol),
        picard_max_iter=scen.solver.picard_max_iter,
        horizon_T=win.T0,
        blowup_factor=scen.solver.blowup_factor,
    )
    try:
        _, rep = picard_iterate(
            scen.A, scen.system, scen.u0, scen.omega, win.T0, cfg,
            r=scen.verify.window_r,
        )
    except (PicardDivergedError, PicardMaxIterError) as exc:
        return TheoremReport(
            theorem_id="picard_rate",
            verdict="fail",
            max_violation=float("inf"),
            tolerance=1e-3,
            predicted=np.array([]),
            measured=np.array([]),
            note=str(exc),
        )
    rep.delta0 = win.delta0
    rep.contraction_q = win.contraction_q
    out = check_picard_rate(rep)
    out.params["T0"] = win.T0
    out.params["delta0"] = win.delta0
    return out


def cmd_verify(args) -> int:
    out_dir = _resolve_out_dir(args)
    scen = load_scenario(args.config, seed_override=args.seed)
    v = scen.verify
    t_start = time.perf_counter()
    try:
        traj = integrate(
            scen.A, scen.system, scen.u0, scen.omega, scen.solver.horizon_T,
            scen.solver,
        )
    except BlowUpError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERICAL

    alpha = scen.A.coercivity_a
    f1 = scen.system.forcing.sup_norm_f1
    gamma = scen.system.schedule.gamma_Gamma
    tol = bound_tolerance(v.atol, scen.solver.dt, v.dt2_coeff)
    reports: list[TheoremReport] = []
    bound_rows: list[tuple[str, int, float, float, float]] = []

    try:
        for check in v.checks:
            if check == "orthogonality":
                rep = check_orthogonality(
                    scen.system.bilinear,
                    sample_count=v.orthogonality_samples,
                    rng_seed=scen.seed,
                    tolerance=v.orthogonality_tol,
                    state_sampler=_orthogonality_sampler(scen),
                )
                reports.append(rep)
            elif check == "energy_envelope":
                rep = check_energy_envelope(
                    traj, scen.u0.norm_h, f1, alpha, gamma, tol
                )
                reports.append(rep)
                bound_rows.extend(_curve_rows(rep))
            elif check == "absorbing_set":
                rep = check_absorbing_set(
                    traj, scen.u0.norm_h, f1, alpha, gamma, v.entry_tol
                )
                reports.append(rep)
                bound_rows.extend(_curve_rows(rep))
            elif check == "global_bound":
                reports.append(
                    check_global_bound(traj, scen.u0.norm_h, f1, alpha, gamma, tol)
                )
            elif check == "two_solution_contraction":
                try:
                    pair_reports = _contraction_reports(scen, args.threads)
                except BlowUpError as exc:
                    print(str(exc), file=sys.stderr)
                    return EXIT_NUMERICAL
                for i, rep in enumerate(pair_reports):
                    reports.append(rep)
                    bound_rows.extend(_curve_rows(rep, series=i))
            elif check == "picard_rate":
                reports.append(_picard_rate_report(scen))
    except PreconditionError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    payload = [rep.to_json_dict() for rep in reports]
    _write_json(out_dir / "reports.json", payload)
    write_bounds_csv(out_dir / "bounds.csv", bound_rows)
    write_trajectory_csv(out_dir / "trajectory.csv", traj, scen)
    timings = {"total_s": time.perf_counter() - t_start, "samples": len(traj)}
    _write_json(
        out_dir / "run.json", _run_json_payload(scen, scen.seed, timings, "ok")
    )

    all_ok = all(rep.ok for rep in reports)
    for rep in reports:
        tag = rep.params.get("pair")
        name = rep.theorem_id if tag is None else f"{rep.theorem_id}[pair={tag}]"
        print(f"{name}: {rep.verdict} (max_violation={rep.max_violation:.3e})")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILURE


def cmd_constants(args) -> int:
    from .driving import estimate_B_norm, estimate_f_norm

    out_dir = _resolve_out_dir(args)
    scen = load_scenario(args.config, seed_override=args.seed)
    c = constants_for(scen.A, scen.system)
    b_measured = estimate_B_norm(scen.system.bilinear, 200, rng_seed=scen.seed)
    f_measured = estimate_f_norm(
        scen.system.forcing, scen.solver.horizon_T, 201
    )
    payload = {
        "version": __version__,
        "constants": scen.constants_echo,
        "measured": {
            "B_norm": b_measured,
            "B_norm_declared": scen.system.bilinear.norm_bound_Binf,
            "f1_norm": f_measured,
            "f1_norm_declared": scen.system.forcing.sup_norm_f1,
        },
        "grid": None,
        "window": None,
        "window_without_impulses": None,
        "window_error": None,
    }
    if scen.grid is not None:
        payload["grid"] = {
            "n_modes": scen.grid.n,
            "dealias_cutoff": scen.grid.cutoff,
            "state_dim": scen.grid.state_dim,
            "retained_modes": scen.grid.retained_mode_count,
            "k_max": scen.grid.k_max,
        }

    exit_code = EXIT_OK
    r = scen.verify.window_r
    try:
        win = find_local_window(c, scen.A, scen.u0, r, scen.system.schedule)
        payload["window"] = {
            "r": r,
            "delta0": win.delta0,
            "T0": win.T0,
            "q": win.contraction_q,
            "d1": win.d1_value,
            "table": window_table(c, scen.A, scen.u0, r, scen.system.schedule),
        }
    except NoAdmissibleWindowError as exc:
        payload["window_error"] = str(exc)
        print(str(exc), file=sys.stderr)
        exit_code = EXIT_CHECK_FAILURE
    try:
        win_free = find_local_window(
            c, scen.A, scen.u0, r, ImpulseSchedule.empty()
        )
        payload["window_without_impulses"] = {
            "r": r,
            "delta0": win_free.delta0,
            "T0": win_free.T0,
            "q": win_free.contraction_q,
            "d1": win_free.d1_value,
            "table": window_table(c, scen.A, scen.u0, r, ImpulseSchedule.empty()),
        }
    except NoAdmissibleWindowError as exc:
        if payload["window_error"] is None:
            payload["window_error"] = str(exc)
        print(str(exc), file=sys.stderr)
        exit_code = EXIT_CHECK_FAILURE

    _write_json(out_dir / "constants.json", payload)
    print(f"constants -> {out_dir / 'constants.json'}")
    return exit_code


def _resolve_out_dir(args) -> Path:
    out = args.out_dir or os.environ.get("IMPNS_OUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impns",
        description="Impulsive semilinear evolution simulator and bound checker",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, doc in (
        ("simulate", cmd_simulate, "integrate one scenario, emit trajectory.csv"),
        ("verify", cmd_verify, "run enabled bound checks, emit reports.json"),
        ("constants", cmd_constants, "estimate constants and window tables"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("config", help="scenario TOML file")
        p.add_argument("--out-dir", default=None, help="output directory "
                       "(default $IMPNS_OUT_DIR or cwd)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the scenario RNG seed")
        p.add_argument("--threads", type=int, default=1,
                       help="thread cap for ensemble runs")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ImpnsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE


if __name__ == "__main__":
    sys.exit(main())
