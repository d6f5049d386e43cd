"""2D incompressible Navier-Stokes on the periodic torus, Fourier-Galerkin.

The state space is the span of dealiased, mean-free, divergence-free Fourier
modes on [0, 2pi)^2. Every retained wavevector k != 0 carries a single
complex divergence-free direction e(k) = k_perp/|k|; conjugate symmetry
pairs k with -k, so the packed real state holds two coefficients (real and
imaginary part) per half-plane representative, scaled so that the plain
Euclidean norm of the packed vector equals the L^2 norm of the field.

The 2/3-rule truncation keeps |k_i| <= n_modes//3, which makes the
pseudospectral product alias-free on retained modes and the discrete
advection trilinear form exactly energy-orthogonal (up to roundoff).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .driving import BilinearForm, DrivenSystem, Forcing, ImpulseSchedule
from .errors import ContractViolationError
from .spectral import DiagonalOperator, StateVector, fractional_norm

_PACK_SCALE = 2.0 * np.pi * np.sqrt(2.0)


class TorusGrid:
    """Fourier grid on [0, 2pi)^2 with 2/3 dealiasing and mode bookkeeping."""

    def __init__(self, n_modes: int):
        if n_modes < 8 or n_modes % 2 != 0:
            raise ValueError("n_modes must be an even integer >= 8")
        self.n = int(n_modes)
        n = self.n
        k1d = np.fft.fftfreq(n, d=1.0 / n).astype(int)  # 0..n/2-1, -n/2..-1
        self.kx = np.tile(k1d, (n, 1))          # [jy, jx] -> kx
        self.ky = np.tile(k1d[:, None], (1, n))  # [jy, jx] -> ky
        self.cutoff = n // 3
        self.dealias_mask = (np.abs(self.kx) <= self.cutoff) & (
            np.abs(self.ky) <= self.cutoff
        )
        self.k_sq = (self.kx**2 + self.ky**2).astype(float)

        # half-plane representatives of retained nonzero modes, sorted so the
        # induced Stokes eigenvalues come out non-decreasing
        half = self.dealias_mask & (
            (self.ky > 0) | ((self.ky == 0) & (self.kx > 0))
        )
        jy, jx = np.nonzero(half)
        order = np.lexsort((self.kx[jy, jx], self.ky[jy, jx], self.k_sq[jy, jx]))
        self.rep_jy = jy[order]
        self.rep_jx = jx[order]
        self.rep_kx = self.kx[self.rep_jy, self.rep_jx]
        self.rep_ky = self.ky[self.rep_jy, self.rep_jx]
        self.rep_ksq = self.k_sq[self.rep_jy, self.rep_jx]
        self.conj_jy = (-self.rep_ky) % n
        self.conj_jx = (-self.rep_kx) % n
        knorm = np.sqrt(self.rep_ksq)
        self.tangent = np.stack([-self.rep_ky / knorm, self.rep_kx / knorm])  # (2, m)
        self.n_reps = self.rep_jx.shape[0]
        self.state_dim = 2 * self.n_reps

        x = 2.0 * np.pi * np.arange(n) / n
        self.xx, self.yy = np.meshgrid(x, x)  # [jy, jx]

    @cached_property
    def retained_mode_count(self) -> int:
        """Retained nonzero modes on both half planes."""
        return int(self.dealias_mask.sum()) - 1

    @cached_property
    def k_max(self) -> float:
        return float(np.sqrt(self.rep_ksq.max()))

    def pack(self, spec: np.ndarray) -> StateVector:
        """Project onto the divergence-free retained modes and pack to reals."""
        amps = (
            spec[0, self.rep_jy, self.rep_jx] * self.tangent[0]
            + spec[1, self.rep_jy, self.rep_jx] * self.tangent[1]
        )
        out = np.empty(self.state_dim)
        out[0::2] = _PACK_SCALE * amps.real
        out[1::2] = _PACK_SCALE * amps.imag
        return StateVector(out)

    def unpack(self, state: StateVector) -> np.ndarray:
        if state.dim != self.state_dim:
            raise ContractViolationError(
                f"state dim {state.dim} != grid state dim {self.state_dim}"
            )
        amps = (state.coeffs[0::2] + 1j * state.coeffs[1::2]) / _PACK_SCALE
        spec = np.zeros((2, self.n, self.n), dtype=complex)
        for c in range(2):
            vals = amps * self.tangent[c]
            spec[c, self.rep_jy, self.rep_jx] = vals
            spec[c, self.conj_jy, self.conj_jx] = np.conj(vals)
        return spec


@dataclass(frozen=True)
class VelocityField:
    """Velocity field as full spectral coefficients (2, n, n), u(x) = sum u^(k) e^(ikx)."""

    grid: TorusGrid
    spec: np.ndarray

    def __post_init__(self):
        if self.spec.shape != (2, self.grid.n, self.grid.n):
            raise ValueError("spec must have shape (2, n, n)")
        self.spec.setflags(write=False)

    @property
    def norm_h(self) -> float:
        return float(2.0 * np.pi * np.sqrt(np.sum(np.abs(self.spec) ** 2)))

    def physical(self) -> np.ndarray:
        n2 = self.grid.n**2
        return np.real(np.fft.ifft2(self.spec, axes=(1, 2))) * n2

    def divergence_max(self) -> float:
        g = self.grid
        div = g.kx * self.spec[0] + g.ky * self.spec[1]
        return float(np.max(np.abs(div)))

    def is_dealiased(self) -> bool:
        return not np.any(self.spec[:, ~self.grid.dealias_mask])

    def to_state(self) -> StateVector:
        return self.grid.pack(self.spec)

    @staticmethod
    def from_state(grid: TorusGrid, state: StateVector) -> "VelocityField":
        return VelocityField(grid, grid.unpack(state))

    @staticmethod
    def from_physical(grid: TorusGrid, values: np.ndarray) -> "VelocityField":
        spec = np.fft.fft2(values, axes=(1, 2)) / grid.n**2
        spec[:, ~grid.dealias_mask] = 0.0
        spec[:, 0, 0] = 0.0
        return VelocityField(grid, spec)


def _check_conjugate_symmetry(spec: np.ndarray, grid: TorusGrid) -> None:
    flipped = np.conj(spec[:, (-np.arange(grid.n)) % grid.n][:, :, (-np.arange(grid.n)) % grid.n])
    scale = np.max(np.abs(spec)) or 1.0
    if np.max(np.abs(spec - flipped)) > 1e-10 * scale:
        raise ContractViolationError("input spectrum is not conjugate-symmetric")


def leray_project(field: VelocityField | np.ndarray, grid: TorusGrid | None = None) -> VelocityField:
    """Orthogonal projection onto divergence-free fields: u^ -> (I - kk^T/|k|^2) u^.

    Nyquist rows/columns are zeroed first: the +-n/2 wavenumber has no
    consistent sign, which would break conjugate symmetry through the
    k_x*k_y off-diagonal of the projector. The retained (dealiased) modes
    sit far below Nyquist, so state-space fields are unaffected.
    """
    if isinstance(field, VelocityField):
        grid = field.grid
        spec = field.spec
    else:
        if grid is None:
            raise ValueError("grid required for raw spectral input")
        spec = np.asarray(field, dtype=complex)
    nyq = grid.n // 2
    if np.any(spec[:, nyq, :]) or np.any(spec[:, :, nyq]):
        spec = spec.copy()
        spec.setflags(write=True)
        spec[:, nyq, :] = 0.0
        spec[:, :, nyq] = 0.0
    _check_conjugate_symmetry(spec, grid)
    ksq = grid.k_sq.copy()
    ksq[0, 0] = 1.0  # mean mode untouched, avoids 0/0
    kdotu = (grid.kx * spec[0] + grid.ky * spec[1]) / ksq
    out = np.stack([spec[0] - grid.kx * kdotu, spec[1] - grid.ky * kdotu])
    return VelocityField(grid, out)


def stokes_operator(nu: float, grid: TorusGrid, delta: float = 0.5) -> DiagonalOperator:
    """A = -nu P Laplace on the packed state: eigenvalues nu|k|^2, each twice
    (real and imaginary coefficient of the divergence-free direction).

    The smallest retained |k|^2 on the unit-period torus is 1, so the
    coercivity constant is exactly nu.
    """
    if nu <= 0:
        raise ValueError("nu must be > 0")
    eigs = np.repeat(nu * grid.rep_ksq, 2)
    return DiagonalOperator(eigs, frac_exponent_delta=delta)


def nonlinear_term(
    q_val: float, u: VelocityField, v: VelocityField, grid: TorusGrid
) -> StateVector:
    """q * P((u.grad)v) computed pseudospectrally with 2/3 dealiasing.

    Alias-free on the retained modes, hence energy-orthogonal:
    <B(u,v), v> = 0 up to roundoff.
    """
    if not (u.is_dealiased() and v.is_dealiased()):
        raise ContractViolationError("nonlinear term requires dealiased inputs")
    n2 = grid.n**2
    u_phys = np.real(np.fft.ifft2(u.spec, axes=(1, 2))) * n2
    dvdx = np.real(np.fft.ifft2(1j * grid.kx * v.spec, axes=(1, 2))) * n2
    dvdy = np.real(np.fft.ifft2(1j * grid.ky * v.spec, axes=(1, 2))) * n2
    adv = u_phys[0] * dvdx + u_phys[1] * dvdy  # (2, n, n)
    spec = np.fft.fft2(adv, axes=(1, 2)) / n2
    spec[:, ~grid.dealias_mask] = 0.0
    spec[:, 0, 0] = 0.0
    projected = leray_project(spec, grid)
    return projected.to_state() * q_val


def project_forcing(phi_values: np.ndarray, grid: TorusGrid) -> StateVector:
    """Physical-space force field -> H coefficients (mean removed, Leray applied)."""
    spec = np.fft.fft2(np.asarray(phi_values, dtype=float), axes=(1, 2)) / grid.n**2
    spec[:, 0, 0] = 0.0
    projected = leray_project(spec, grid)
    return projected.to_state()


def taylor_green(t: float, nu: float, grid: TorusGrid) -> VelocityField:
    """Decaying vortex lattice e^(-2 nu t)(cos x sin y, -sin x cos y).

    Exact solution of the unforced system with unit advection coefficient:
    its self-advection is a pure gradient (killed by the projection) and the
    viscous decay acts mode by mode.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    amp = float(np.exp(-2.0 * nu * t))
    vals = np.stack(
        [
            np.cos(grid.xx) * np.sin(grid.yy),
            -np.sin(grid.xx) * np.cos(grid.yy),
        ]
    )
    return VelocityField.from_physical(grid, vals * amp)


def random_divfree(grid: TorusGrid, seed: int, energy: float = 1.0) -> StateVector:
    """Random dealiased divergence-free state with |u|_H^2 = energy.

    Mode amplitudes fall off like 1/(1+|k|^2) before normalization, giving
    smooth fields; divergence-freeness is automatic in the packed basis.
    """
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(grid.state_dim)
    weights = 1.0 / (1.0 + np.repeat(grid.rep_ksq, 2))
    raw = raw * weights
    norm = np.linalg.norm(raw)
    if norm == 0:
        raise ValueError("degenerate random draw")
    return StateVector(raw * (np.sqrt(energy) / norm))


def grad_norm_l2(field: VelocityField) -> float:
    """L^2 norm of the velocity gradient, via Parseval."""
    g = field.grid
    total = np.sum(g.k_sq * (np.abs(field.spec[0]) ** 2 + np.abs(field.spec[1]) ** 2))
    return float(2.0 * np.pi * np.sqrt(total))


# ---------------------------------------------------------------------------
# wiring into the abstract driven system
# ---------------------------------------------------------------------------


def ns_bilinear_bound(grid: TorusGrid, q_bound: float, nu: float, delta: float) -> float:
    """Rigorous per-grid bound on sup |q P((u.grad)v)|_F over unit H-balls:

        |q| * nu^(-delta) * sqrt(M) * k_max / (2 pi),

    from ||u||_inf <= sqrt(M) |u|_H / (2 pi) (M retained modes), the gradient
    bound ||grad v|| <= k_max |v|_H, and |w|_F <= lambda_min^(-delta) |w|_H
    with lambda_min = nu.
    """
    return float(q_bound * nu**-delta * np.sqrt(grid.retained_mode_count) * grid.k_max / (2 * np.pi))


def make_ns_bilinear(
    grid: TorusGrid,
    A: DiagonalOperator,
    nu: float,
    q_func: Callable[[float], float],
    q_bound: float,
    delta: float = 0.5,
) -> BilinearForm:
    """Advection bilinear form q(t) P((u.grad)v) on the packed state."""

    def ev(t_abs: float, u: StateVector, v: StateVector) -> StateVector:
        uf = VelocityField.from_state(grid, u)
        vf = VelocityField.from_state(grid, v)
        return nonlinear_term(q_func(t_abs), uf, vf, grid)

    return BilinearForm(
        evaluator=ev,
        norm_bound_Binf=ns_bilinear_bound(grid, q_bound, nu, delta),
        dim=grid.state_dim,
        f_norm=lambda w: fractional_norm(A, -delta, w),
    )


def make_ns_forcing(
    grid: TorusGrid,
    phi: Callable[[float, np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    pointwise_bound: float,
    lipschitz_C: float,
    discontinuity_times: tuple[float, ...] = (),
) -> Forcing:
    """Body force phi(t, x, y, u_values) -> (2, n, n), projected into H.

    phi is evaluated pointwise in physical space on the solution's point
    values (shape (2, n, n)). The H-bound follows from the pointwise bound:
    |P phi|_H <= |phi|_(L2) <= 2 pi * sup|phi|. The state-Lipschitz constant
    transfers the same way: pointwise constant C gives |F(u)-F(v)|_H <=
    C |u - v|_H.
    """

    def ev(t_abs: float, u: StateVector) -> StateVector:
        u_phys = VelocityField.from_state(grid, u).physical()
        vals = np.asarray(phi(t_abs, grid.xx, grid.yy, u_phys), dtype=float)
        return project_forcing(vals, grid)

    bound = 2.0 * np.pi * pointwise_bound
    return Forcing(
        evaluator=ev,
        bound_M=bound,
        lipschitz_L=lipschitz_C,
        sup_norm_f1=bound,
        dim=grid.state_dim,
        discontinuity_times=discontinuity_times,
    )


def make_ns_system(
    grid: TorusGrid,
    nu: float,
    q_func: Callable[[float], float],
    q_bound: float,
    forcing: Forcing | None = None,
    schedule: ImpulseSchedule | None = None,
    delta: float = 0.5,
) -> tuple[DiagonalOperator, DrivenSystem]:
    """Assemble the Stokes operator and driven system for a torus scenario."""
    A = stokes_operator(nu, grid, delta=delta)
    bilinear = make_ns_bilinear(grid, A, nu, q_func, q_bound, delta)
    if forcing is None:
        forcing = Forcing.zero(grid.state_dim)
    if schedule is None:
        schedule = ImpulseSchedule.empty()
    return A, DrivenSystem(bilinear=bilinear, forcing=forcing, schedule=schedule)
