"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the criterion lines.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from conftest import scalar_impulsive_oracle

from impns.cli import main as cli_main
from impns.driving import (
    BilinearForm,
    DrivenSystem,
    Forcing,
    HullPoint,
    ImpulseOperator,
    ImpulseSchedule,
    apply_impulse,
)
from impns.ns2d import TorusGrid, make_ns_system, random_divfree, taylor_green
from impns.solver import (
    SolverConfig,
    constants_for,
    contraction_constant,
    find_local_window,
    integrate,
    picard_iterate,
)
from impns.spectral import DiagonalOperator, StateVector, fractional_norm, phi1_apply, semigroup_apply
from impns.verify import (
    absorbing_entry_time,
    bound_tolerance,
    check_absorbing_set,
    check_energy_envelope,
    check_global_bound,
    check_orthogonality,
    check_picard_rate,
    check_two_solution_contraction,
)

ORIGIN = HullPoint(0.0)
FIXTURES = Path(__file__).parent / "fixtures"


def record(name: str, ok: bool, detail: str):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def make_toy_instance(seed: int):
    """Random 2D skew-advection system with analytically certified constants."""
    rng = np.random.default_rng(1000 + seed)
    lam1 = rng.uniform(0.5, 1.5)
    lam2 = lam1 + rng.uniform(0.5, 1.5)
    A = DiagonalOperator(np.array([lam1, lam2]), 0.5)
    scale = rng.uniform(0.8, 1.4)
    binf = scale * lam1**-0.5  # F-norm bound of the skew form for this operator
    bilinear = BilinearForm.toy_skew(
        scale=scale,
        f_norm=lambda w, A=A: fractional_norm(A, -0.5, w),
        norm_bound=binf,
    )
    fmag = rng.uniform(0.0, 0.3)
    fdir = rng.standard_normal(2)
    fdir /= np.linalg.norm(fdir)
    forcing = Forcing.constant(StateVector(fdir * fmag))
    if seed % 2 == 0:
        schedule = ImpulseSchedule.empty()
    else:
        schedule = ImpulseSchedule(
            np.array([0.02]),
            (ImpulseOperator.saturation(0.15, StateVector([0.0, 1.0])),),
        )
    system = DrivenSystem(bilinear, forcing, schedule)
    udir = rng.standard_normal(2)
    udir /= np.linalg.norm(udir)
    u0 = StateVector(udir * rng.uniform(0.2, 0.6))
    r = rng.uniform(0.8, 1.2)
    return A, system, u0, r


@pytest.fixture(scope="module")
def toy_windows():
    """Window search + both solvers on the 20 random instances (shared)."""
    out = []
    for seed in range(20):
        A, system, u0, r = make_toy_instance(seed)
        c = constants_for(A, system)
        win = find_local_window(c, A, u0, r, system.schedule)
        cfg = SolverConfig(
            dt=win.T0 / 2048.0,
            quad_substeps=1,
            picard_tol=1e-12,
            picard_max_iter=200,
            horizon_T=win.T0,
        )
        traj_p, rep = picard_iterate(A, system, u0, ORIGIN, win.T0, cfg, r=r)
        traj_i = integrate(A, system, u0, ORIGIN, win.T0, cfg)
        out.append((A, system, u0, r, win, cfg, traj_p, traj_i, rep))
    return out


class TestLinearImpulsiveClosedForm:
    def test_criterion(self, scalar_impulsive_system):
        A = DiagonalOperator(np.array([1.0]))
        cfg = SolverConfig(dt=1e-3, horizon_T=2.0)
        t0 = time.perf_counter()
        traj = integrate(A, scalar_impulsive_system, StateVector([1.0]), ORIGIN,
                         2.0, cfg)
        elapsed = time.perf_counter() - t0
        err = max(
            abs(u.coeffs[0] - scalar_impulsive_oracle(t))
            for t, u in zip(traj.times, traj.states)
        )
        err = max(err, abs(traj.left_limits[1.0].coeffs[0] - np.exp(-1.0)))
        final_err = abs(traj.final_state.coeffs[0] - 0.31927500382233387)
        record(
            "linear-impulsive-closed-form",
            err <= 1e-10 and final_err <= 1e-10 and elapsed < 1.0,
            f"max_err={err:.2e} (tol 1e-10), u(2) err={final_err:.2e}, "
            f"runtime={elapsed:.3f}s (cap 1s)",
        )


class TestEtdExactness:
    def test_criterion(self):
        t0 = time.perf_counter()
        worst = 0.0
        cases = [
            (np.array([1.0]), np.array([1.0]), np.array([0.7])),
            (np.array([1.0, 3.0]), np.array([1.0, -0.5]), np.array([0.4, 0.2])),
            (np.array([0.5, 2.0, 7.0]), np.array([1.0, 0.3, -2.0]),
             np.array([0.1, -0.6, 1.5])),
        ]
        for eigs, u0_c, c_c in cases:
            A = DiagonalOperator(eigs)
            sys = DrivenSystem(
                BilinearForm.zero(len(eigs)),
                Forcing.constant(StateVector(c_c)),
                ImpulseSchedule.empty(),
            )
            u0 = StateVector(u0_c)
            for dt in (0.5, 1.0 / 3.0, 0.1, 1e-3):
                cfg = SolverConfig(dt=dt, horizon_T=2.0)
                traj = integrate(A, sys, u0, ORIGIN, 2.0, cfg)
                for t, u in zip(traj.times, traj.states):
                    exact = (
                        semigroup_apply(A, t, u0).coeffs
                        + (1.0 - np.exp(-eigs * t)) / eigs * c_c
                    )
                    worst = max(worst, float(np.max(np.abs(u.coeffs - exact))))
        elapsed = time.perf_counter() - t0
        record(
            "etd-exactness-constant-forcing",
            worst <= 1e-12 and elapsed < 1.0,
            f"max_err={worst:.2e} (tol 1e-12), runtime={elapsed:.3f}s (cap 1s)",
        )


class TestTaylorGreenRegression:
    def test_criterion(self):
        grid = TorusGrid(32)
        nu = 0.1
        A, system = make_ns_system(grid, nu=nu, q_func=lambda t: 1.0, q_bound=1.0)
        u0 = taylor_green(0.0, nu, grid).to_state()
        cfg = SolverConfig(dt=1e-3, horizon_T=1.0)
        t0 = time.perf_counter()
        traj = integrate(A, system, u0, ORIGIN, 1.0, cfg)
        elapsed = time.perf_counter() - t0
        worst = 0.0
        for t, u in zip(traj.times, traj.states):
            exact = taylor_green(float(t), nu, grid).to_state()
            worst = max(worst, (u - exact).norm_h / exact.norm_h)
        record(
            "taylor-green-regression",
            worst <= 1e-6 and elapsed < 30.0,
            f"max_rel_err={worst:.2e} (tol 1e-6), runtime={elapsed:.2f}s (cap 30s), "
            f"n_modes=32 nu=0.1 dt=1e-3",
        )


class TestEnergyOrthogonality:
    def test_criterion(self):
        grid = TorusGrid(32)
        _, system = make_ns_system(grid, nu=0.1, q_func=lambda t: 1.0, q_bound=1.0)

        def sampler(rng):
            return random_divfree(
                grid, int(rng.integers(2**31)), energy=float(rng.uniform(0.5, 2.0))
            )

        rep = check_orthogonality(
            system.bilinear, sample_count=100, rng_seed=42, tolerance=1e-10,
            state_sampler=sampler,
        )
        record(
            "energy-orthogonality",
            rep.verdict == "pass",
            f"max |<B(u,v),v>| / (|u||v|^2) = {rep.max_violation:.2e} (tol 1e-10), "
            f"100 random dealiased divergence-free pairs at n_modes=32",
        )


class TestPicardRate:
    def test_criterion(self, toy_windows):
        worst_excess = -np.inf
        n_ratios = 0
        for A, system, u0, r, win, cfg, traj_p, traj_i, rep in toy_windows:
            assert win.contraction_q < 1.0
            res = rep.iter_residuals
            for n in range(1, len(res) - 1):
                n_ratios += 1
                worst_excess = max(
                    worst_excess, res[n + 1] / res[n] - win.contraction_q
                )
            # sub-maximal window: the same system at T0/3 has a genuinely
            # small q; the geometric envelope must hold there too
            c = constants_for(A, system)
            t_sub = win.T0 / 3.0
            q_sub = contraction_constant(
                c, r, u0.norm_h, t_sub, system.schedule.count_up_to(t_sub)
            )
            cfg_sub = SolverConfig(dt=t_sub / 512.0, picard_tol=1e-12,
                                   picard_max_iter=200, horizon_T=t_sub)
            _, rep_sub = picard_iterate(A, system, u0, ORIGIN, t_sub, cfg_sub, r=r)
            rep_sub.contraction_q = q_sub
            out = check_picard_rate(rep_sub, tolerance=1e-3)
            assert out.verdict == "pass", f"sub-window rate violated: {out.max_violation}"
            res = rep_sub.iter_residuals
            for n in range(1, len(res) - 1):
                n_ratios += 1
                worst_excess = max(worst_excess, res[n + 1] / res[n] - q_sub)
        record(
            "picard-rate",
            worst_excess <= 1e-3,
            f"worst ratio excess over q = {worst_excess:.2e} (tol 1e-3) across "
            f"{n_ratios} ratios, 20 instances (full and 1/3 windows)",
        )


class TestOracleEquivalence:
    def test_criterion(self, toy_windows):
        worst = 0.0
        for A, system, u0, r, win, cfg, traj_p, traj_i, rep in toy_windows:
            worst = max(worst, traj_p.d_inf(traj_i))
        record(
            "oracle-equivalence",
            worst <= 1e-8,
            f"max d_inf(picard, integrate) = {worst:.2e} (tol 1e-8) on the 20 "
            f"reported windows",
        )


def toy_dissipative_scenario():
    A = DiagonalOperator(np.array([2.0, 3.0]))
    schedule = ImpulseSchedule(
        np.array([1.0, 2.0]),
        (
            ImpulseOperator.constant(StateVector([0.15, 0.0])),
            ImpulseOperator.constant(StateVector([0.0, 0.15])),
        ),
    )
    system = DrivenSystem(
        BilinearForm.toy_skew(scale=0.7),
        Forcing.constant(StateVector([0.0, 0.8])),
        schedule,
    )
    u0 = StateVector([0.8, 0.4])
    return A, system, u0


class TestDissipativity:
    def test_criterion(self, scalar_impulsive_system):
        dt = 1e-3
        tol = bound_tolerance(1e-6, dt)

        # toy skew system with finite Gamma
        A, system, u0 = toy_dissipative_scenario()
        cfg = SolverConfig(dt=dt, horizon_T=5.0)
        traj = integrate(A, system, u0, ORIGIN, 5.0, cfg)
        rep_env = check_energy_envelope(
            traj, u0.norm_h, 0.8, 2.0, system.schedule.gamma_Gamma, tol
        )
        rep_abs = check_absorbing_set(
            traj, u0.norm_h, 0.8, 2.0, system.schedule.gamma_Gamma, entry_tol=1e-3
        )

        # unforced torus flow with one jump, nu = alpha = 1
        grid = TorusGrid(16)
        jump = random_divfree(grid, seed=77, energy=0.2**2)
        schedule_ns = ImpulseSchedule(
            np.array([0.5]), (ImpulseOperator.constant(jump),)
        )
        A_ns, system_ns = make_ns_system(
            grid, nu=1.0, q_func=lambda t: 1.0, q_bound=1.0, schedule=schedule_ns
        )
        u0_ns = random_divfree(grid, seed=4, energy=1.0)
        dt_ns = 2e-3
        cfg_ns = SolverConfig(dt=dt_ns, horizon_T=8.0)
        traj_ns = integrate(A_ns, system_ns, u0_ns, ORIGIN, 8.0, cfg_ns)
        tol_ns = bound_tolerance(1e-6, dt_ns)
        rep_env_ns = check_energy_envelope(
            traj_ns, u0_ns.norm_h, 0.0, 1.0, schedule_ns.gamma_Gamma, tol_ns
        )
        rep_abs_ns = check_absorbing_set(
            traj_ns, u0_ns.norm_h, 0.0, 1.0, schedule_ns.gamma_Gamma, entry_tol=1e-3
        )

        # linear scalar canary saturates the envelope
        A_c = DiagonalOperator(np.array([1.0]))
        cfg_c = SolverConfig(dt=dt, horizon_T=2.0)
        traj_c = integrate(A_c, scalar_impulsive_system, StateVector([1.0]), ORIGIN,
                           2.0, cfg_c)
        rep_c = check_energy_envelope(traj_c, 1.0, 0.0, 1.0, 0.5, tolerance=1e-10)
        canary_slack = float(np.max(rep_c.predicted - rep_c.measured))

        ok = (
            rep_env.verdict == "pass"
            and rep_abs.verdict == "pass"
            and rep_env_ns.verdict == "pass"
            and rep_abs_ns.verdict == "pass"
            and rep_c.verdict == "pass"
            and canary_slack <= 1e-10
        )
        record(
            "dissipativity",
            ok,
            f"toy violation={rep_env.max_violation:.2e}, "
            f"ns violation={rep_env_ns.max_violation:.2e} (tol {tol:.1e}); "
            f"absorbing entries at t*={rep_abs.params['entry_time']:.2f}/"
            f"{rep_abs_ns.params['entry_time']:.2f} radius+1e-3 held; "
            f"canary |violation|={max(abs(rep_c.max_violation), canary_slack):.2e} "
            f"(tol 1e-10)",
        )


class TestGlobalBound:
    def test_criterion(self):
        dt = 1e-3
        results = []
        # branch |u0| >= f1/alpha and branch |u0| < f1/alpha
        for u0_coeffs in ([3.0, 0.0], [0.2, 0.1]):
            A, system, _ = toy_dissipative_scenario()
            u0 = StateVector(u0_coeffs)
            cfg = SolverConfig(dt=dt, horizon_T=4.0)
            traj = integrate(A, system, u0, ORIGIN, 4.0, cfg)
            rep = check_global_bound(
                traj, u0.norm_h, 0.8, 2.0, system.schedule.gamma_Gamma,
                tolerance=1e-6,
            )
            results.append(rep)
        branch_a, branch_b = results
        ok = (
            branch_a.verdict == "pass"
            and branch_b.verdict == "pass"
            and branch_a.params["C_of_u0"] == 3.0  # r branch
            and branch_b.params["C_of_u0"] == pytest.approx(0.4)  # f1/alpha branch
        )
        record(
            "global-bound",
            ok,
            f"violations: large-u0 {branch_a.max_violation:.2e}, small-u0 "
            f"{branch_b.max_violation:.2e} (tol 1e-6), both C(r) branches",
        )


class TestTwoSolutionContraction:
    def test_criterion(self):
        A = DiagonalOperator(np.array([1.0, 2.0]))
        schedule = ImpulseSchedule(
            np.array([1.0]),
            (ImpulseOperator.saturation(0.1, StateVector([1.0, 0.0])),),
        )
        system = DrivenSystem(
            BilinearForm.toy_skew(scale=0.2),
            Forcing.constant(StateVector([0.0, 0.4])),
            schedule,
        )
        f1, alpha, gamma = 0.4, 1.0, schedule.gamma_Gamma
        radius = f1 / alpha
        cfg = SolverConfig(dt=1e-3, horizon_T=3.0)
        rng = np.random.default_rng(7)
        worst = -np.inf
        betas = set()
        for _ in range(10):
            pair = []
            for _ in range(2):
                d = rng.standard_normal(2)
                d /= np.linalg.norm(d)
                pair.append(StateVector(d * radius * rng.uniform(0.3, 1.0)))
            t1 = integrate(A, system, pair[0], ORIGIN, 3.0, cfg)
            t2 = integrate(A, system, pair[1], ORIGIN, 3.0, cfg)
            rep = check_two_solution_contraction(
                t1, t2, alpha, 0.2, f1, gamma, 0.0, schedule.lipschitz_K3,
                schedule, tolerance=1e-6,
            )
            assert rep.verdict == "pass", f"violation {rep.max_violation:.2e}"
            worst = max(worst, rep.max_violation)
            betas.add(round(rep.params["beta"], 12))

        # nonpositive-beta configuration: inapplicable with exit code 0
        code = cli_main(["verify", str(FIXTURES / "beta_neg.toml"), "--out-dir",
                         str(Path("/tmp") / "impns_beta_neg")])
        ok = worst <= 1e-6 and code == 0
        record(
            "two-solution-contraction",
            ok,
            f"10 pairs in the f1/alpha-ball, beta={betas.pop():.3f} > 0, worst "
            f"violation {worst:.2e} (tol 1e-6); beta<=0 config exits 0 as "
            f"inapplicable",
        )


class TestJumpExactness:
    def test_criterion(self, scalar_impulsive_system, toy_windows):
        checked = 0

        def assert_jumps(traj, schedule):
            nonlocal checked
            for tk, k in zip(sorted(traj.left_limits), traj.impulse_indices):
                left = traj.left_limits[tk]
                expected = apply_impulse(schedule, k, left)
                np.testing.assert_array_equal(
                    traj.state_at(tk).coeffs, expected.coeffs
                )
                checked += 1
            in_horizon = [
                tk for tk in schedule.times if tk <= traj.horizon
            ]
            assert len(traj.left_limits) == len(in_horizon)

        # scalar canary
        A = DiagonalOperator(np.array([1.0]))
        traj = integrate(A, scalar_impulsive_system, StateVector([1.0]), ORIGIN,
                         2.0, SolverConfig(dt=1e-3, horizon_T=2.0))
        assert_jumps(traj, scalar_impulsive_system.schedule)

        # toy dissipative run (two constant jumps)
        A2, system2, u02 = toy_dissipative_scenario()
        traj2 = integrate(A2, system2, u02, ORIGIN, 5.0,
                          SolverConfig(dt=1e-3, horizon_T=5.0))
        assert_jumps(traj2, system2.schedule)

        # saturation jumps in the random toy instances, both solvers
        for A3, system3, u03, r, win, cfg, traj_p, traj_i, rep in toy_windows:
            if len(system3.schedule) and system3.schedule.times[0] <= win.T0:
                assert_jumps(traj_p, system3.schedule)
                assert_jumps(traj_i, system3.schedule)

        # torus flow with a divergence-free constant jump
        grid = TorusGrid(16)
        jump = random_divfree(grid, seed=77, energy=0.04)
        sched = ImpulseSchedule(np.array([0.5]), (ImpulseOperator.constant(jump),))
        A4, system4 = make_ns_system(grid, nu=1.0, q_func=lambda t: 1.0,
                                     q_bound=1.0, schedule=sched)
        traj4 = integrate(A4, system4, random_divfree(grid, 4, 1.0), ORIGIN, 1.0,
                          SolverConfig(dt=2e-3, horizon_T=1.0))
        assert_jumps(traj4, sched)

        record(
            "jump-exactness",
            checked > 0,
            f"{checked} jumps bit-exact (u(t_k) - u(t_k-) == I_k(u(t_k-))), left "
            f"limits recorded for every in-horizon impulse, both solvers",
        )


class TestDeterminism:
    def test_criterion(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        for d in (d1, d2):
            code = cli_main(["simulate", str(FIXTURES / "toy_diss.toml"),
                             "--out-dir", str(d), "--seed", "11"])
            assert code == 0
        b1 = (d1 / "trajectory.csv").read_bytes()
        b2 = (d2 / "trajectory.csv").read_bytes()
        record(
            "determinism",
            b1 == b2,
            f"repeated simulate with fixed seed: byte-identical CSV "
            f"({len(b1)} bytes)",
        )
