"""Impulsive semilinear evolution simulator and bound-verification harness.

The package computes mild solutions of semilinear evolution equations with
prescribed jump times (exponential integrators between jumps, Picard fixed
points on certified local windows) and checks quantitative energy bounds on
the computed trajectories: pointwise decay envelopes, absorbing sets, global
norm bounds, and two-solution contraction rates. The flagship instantiation
is the 2D incompressible Navier-Stokes system on the periodic torus via a
dealiased Fourier-Galerkin discretization.
"""

__version__ = "0.1.0"

from .driving import (
    BilinearForm,
    DrivenSystem,
    Forcing,
    HullPoint,
    ImpulseOperator,
    ImpulseSchedule,
    SampleGrid,
    apply_impulse,
    estimate_B_norm,
    estimate_f_norm,
    eval_forcing,
    hull_distance,
    shift,
)
from .solver import (
    Constants,
    LocalSolveReport,
    SolverConfig,
    Trajectory,
    constants_for,
    contraction_constant,
    estimate_m,
    find_local_window,
    integrate,
    invariance_radius_d1,
    picard_iterate,
    step_etd,
)
from .spectral import (
    DiagonalOperator,
    StateVector,
    fractional_norm,
    phi1_apply,
    phi2_apply,
    semigroup_apply,
)
