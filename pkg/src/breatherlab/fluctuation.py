"""Background/fluctuation analysis about classical solutions.

For a classical background v(x, t) with semiclassical scale g, the field
splits as phi = g v + u.  The Hamiltonian then orders in powers of g,

    H = g^2 H_-2 + g H_-1 + H_0 + ...,

under the bookkeeping eps g^2 = 1 (so the cubic term of the background
equation sits at order g).  H_-2 is the classical energy of the
background; the order-g linear form vanishes exactly when v satisfies the
nonlinear field equation, so its obstruction is measured by the residual

    v_tt - v_xx + m^2 v + eps v^3            (point-dimer limit)

evaluated analytically from the background representation.  H_0 is the
quadratic form whose force operator is the second variation

    L u = -u_xx + m^2 u + 3 eps v(x,t)^2 u.

Floquet analysis integrates the linearized system u_tt = -L u over one
background period for a basis of modes in position and velocity and
reports the monodromy eigenvalues, which come in reciprocal pairs for a
symplectic evolution.  Translation symmetry makes d_x v and d_t v exact
zero modes (Floquet multiplier 1) of the continuum linearization; their
discrete residuals measure integrator/grid quality.  Because d_x v of a
vanishing-endpoint background is cosine-like, zero-mode propagation always
uses the periodic basis (every background here is a trigonometric
polynomial, hence periodic); the monodromy basis itself follows the
background's own boundary condition.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels, dynamics
from .dynamics import DIRICHLET, PERIODIC, FieldState, grid_points
from .elliptic import (
    TravelingWaveProfile,
    profile_eval,
    profile_first_derivative,
    profile_second_derivative,
    profile_time_derivative,
)
from .errors import ValidationError
from .lindstedt import LindstedtSolution, residual_grid


@dataclass(frozen=True)
class Background:
    """Classical background from a standing-wave solution or traveling wave.

    `coupling` is the semiclassical scale g; the default 1/sqrt(eps)
    realizes the eps*g^2 = 1 bookkeeping (1.0 when eps = 0).  `period`
    defaults to 2*pi/omega for standing waves and 2*pi/(n*v) for traveling
    ones; a constant background needs it given explicitly.
    """

    source: object
    coupling: float | None = None
    period: float | None = None

    def __post_init__(self):
        if not isinstance(self.source, (LindstedtSolution, TravelingWaveProfile)):
            raise ValidationError("source must be a LindstedtSolution or TravelingWaveProfile")
        if self.coupling is None:
            eps = self.epsilon
            object.__setattr__(self, "coupling", 1.0 / np.sqrt(eps) if eps > 0 else 1.0)
        if self.period is None:
            if self.is_wave:
                object.__setattr__(self, "period", self.source.temporal_period)
            else:
                object.__setattr__(self, "period", 2.0 * np.pi / self.source.omega())
        if self.period <= 0:
            raise ValidationError("background period must be positive")

    @property
    def is_wave(self) -> bool:
        return isinstance(self.source, TravelingWaveProfile)

    @property
    def epsilon(self) -> float:
        return self.source.epsilon

    @property
    def mass(self) -> float:
        return self.source.mass

    @property
    def boundary(self) -> str:
        return PERIODIC if self.is_wave else DIRICHLET

    def value(self, x, t: float):
        if self.is_wave:
            return profile_eval(self.source, x, t)
        return np.ravel(self.source.field(x, t))

    def d_x(self, x, t: float):
        if self.is_wave:
            return profile_first_derivative(self.source, np.asarray(x) - self.source.velocity * t)
        return np.ravel(self.source.field(x, t, dx=1))

    def d_t(self, x, t: float):
        if self.is_wave:
            return profile_time_derivative(self.source, x, t)
        return np.ravel(self.source.field(x, t, dt=1))

    def d_xt(self, x, t: float):
        if self.is_wave:
            v = self.source.velocity
            return -v * profile_second_derivative(self.source, np.asarray(x) - v * t)
        return np.ravel(self.source.field(x, t, dx=1, dt=1))

    def d_tt(self, x, t: float):
        if self.is_wave:
            v = self.source.velocity
            return v * v * profile_second_derivative(self.source, np.asarray(x) - v * t)
        return np.ravel(self.source.field(x, t, dt=2))


@dataclass(frozen=True)
class HamiltonianExpansion:
    h_minus2: float
    h_minus1_norm: float
    linearized_mass_term: np.ndarray


@dataclass(frozen=True)
class FloquetReport:
    multipliers: np.ndarray
    zero_mode_residuals: tuple
    truncation: int


def background_state(bg: Background, grid_n: int, t: float = 0.0) -> FieldState:
    """Sample (v, v_t) as a FieldState carrying the background's eps and m."""
    x = grid_points(grid_n, bg.boundary)
    phi = bg.value(x, t)
    pi = bg.d_t(x, t)
    if bg.boundary == DIRICHLET:
        phi = phi.copy()
        pi = pi.copy()
        phi[[0, -1]] = 0.0
        pi[[0, -1]] = 0.0
    return FieldState(
        grid_n=grid_n, boundary=bg.boundary, phi=phi, pi=pi,
        time=t, mass=bg.mass, epsilon=bg.epsilon,
    )


def _residual_field(bg: Background, x: np.ndarray, t: float) -> np.ndarray:
    if bg.is_wave:
        p = bg.source
        xi = x - p.velocity * t
        f = profile_eval(p, x, t)
        fpp = profile_second_derivative(p, xi)
        return (p.velocity**2 - 1.0) * fpp + p.mass**2 * f + p.epsilon * f**3
    return np.ravel(residual_grid(bg.source, x, t))


def h_minus1_residual(bg: Background, grid_n: int, t: float) -> float:
    """Max-norm of the order-g obstruction v_tt - v_xx + m^2 v + eps v^3 at time t.

    For a Lindstedt background this is, by construction, the same quantity
    as the solution's pde residual restricted to that time slice.
    """
    x = np.linspace(0.0, 2.0 * np.pi, grid_n)
    return float(np.max(np.abs(_residual_field(bg, x, t))))


def hamiltonian_expansion(bg: Background, grid_n: int, t: float = 0.0) -> HamiltonianExpansion:
    """Classical energy, the H_-1 obstruction norm, and the H_0 potential.

    Evaluated at time `t`.  Note a standing-wave background vanishes
    identically at t = 0, making the obstruction norm trivially zero there;
    sample at a quarter period for a representative value.
    """
    state = background_state(bg, grid_n, t)
    x = state.x
    r = _residual_field(bg, x, t)
    w = dynamics._quad_weights(grid_n, bg.boundary)
    v0 = bg.value(x, t)
    return HamiltonianExpansion(
        h_minus2=dynamics.energy(state),
        h_minus1_norm=float(np.sqrt(w @ (r * r))),
        linearized_mass_term=3.0 * bg.epsilon * v0 * v0,
    )


def linearized_apply(bg: Background, u: np.ndarray, t: float) -> np.ndarray:
    """Second-variation force term L u = -u_xx + m^2 u + 3 eps v^2 u at time t."""
    u = np.asarray(u, dtype=float)
    grid_n = u.size
    synth, ana, wn, _ = dynamics._transforms(grid_n, bg.boundary)
    u_xx = synth @ (-(wn * wn) * (ana @ u[: ana.shape[1]]))
    x = grid_points(grid_n, bg.boundary)
    v = bg.value(x, t)
    return -u_xx + bg.mass**2 * u + 3.0 * bg.epsilon * v * v * u


def _potential_series(bg: Background, x: np.ndarray, times: np.ndarray) -> np.ndarray:
    """3 eps v(x, t)^2 for all step times; shape (len(times), len(x))."""
    if bg.is_wave:
        xi = x[None, :] - bg.source.velocity * times[:, None]
        cn, sn, _ = _kernels.jacobi_cn_sn_dn(xi * bg.source.scale, bg.source.modulus)
        f = bg.source.amplitude * (sn if bg.source.form == "sn" else cn)
    else:
        f = np.asarray(bg.source.field(x, times)).T
    return 3.0 * bg.epsilon * f * f


def _mode_functions(bg: Background, grid_n: int, n_modes: int):
    """Analysis/synthesis pair restricted to the retained spatial modes."""
    synth, ana, _, _ = dynamics._transforms(grid_n, bg.boundary)
    if bg.boundary == DIRICHLET:
        if n_modes > synth.shape[1]:
            raise ValidationError("n_modes exceeds the grid's mode capacity")
        cols = np.arange(n_modes)
    else:
        kp = (grid_n - 1) // 2
        if n_modes > kp:
            raise ValidationError("n_modes exceeds the grid's mode capacity")
        cols = np.concatenate([[0], np.arange(1, n_modes + 1), kp + np.arange(1, n_modes + 1)])
    return synth[:, cols], ana[cols, :]


def _integrate_columns(bg, u, w, n_steps, dt, pot, grid_n):
    synth, ana, wn, _ = dynamics._transforms(grid_n, bg.boundary)
    omega = np.sqrt(wn * wn + bg.mass**2)
    try:
        threads = int(os.environ.get("BREATHERLAB_THREADS", "1"))
    except ValueError:
        threads = 1
    n_cols = u.shape[1]
    if threads <= 1 or n_cols < 2 * threads:
        return _kernels.linear_evolve(u, w, n_steps, dt, pot, synth, ana, omega)
    chunks = np.array_split(np.arange(n_cols), threads)
    out_u = np.empty_like(u)
    out_w = np.empty_like(w)

    def run(idx):
        cu, cw = _kernels.linear_evolve(u[:, idx], w[:, idx], n_steps, dt, pot, synth, ana, omega)
        out_u[:, idx] = cu
        out_w[:, idx] = cw

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(run, chunks))
    return out_u, out_w


def monodromy(
    bg: Background,
    n_modes: int,
    dt: float,
    grid_n: int | None = None,
    pad_modes: int = 24,
) -> FloquetReport:
    """Floquet multipliers of the linearized flow over one background period.

    Basis columns are spatial modes placed in position and in velocity; dt
    is adjusted so the steps tile the period exactly.  The monodromy is
    assembled on a mode space padded by `pad_modes` beyond the requested
    truncation (where the discrete flow is symplectic to round-off, so the
    multipliers pair reciprocally), and the 2*n_modes eigenvalues whose
    eigenvectors weigh most heavily on the retained modes are reported.
    The report also carries the zero-mode residuals at the same resolution.
    """
    if n_modes < 1:
        raise ValidationError("n_modes must be >= 1")
    T = bg.period
    n_steps = max(1, round(T / dt))
    dt = T / n_steps
    wide = n_modes + max(0, pad_modes)
    if grid_n is None:
        grid_n = max(2 * wide + 35, 129 if bg.boundary == DIRICHLET else 128)
    basis_synth, basis_ana = _mode_functions(bg, grid_n, wide)
    n_wide = basis_synth.shape[1]
    x = grid_points(grid_n, bg.boundary)
    times = dt * np.arange(n_steps + 1)
    pot = _potential_series(bg, x, times)

    n_used = basis_ana.shape[1]
    u0 = np.hstack([basis_synth, np.zeros_like(basis_synth)])
    w0 = np.hstack([np.zeros_like(basis_synth), basis_synth])
    u1, w1 = _integrate_columns(bg, u0, w0, n_steps, dt, pot, grid_n)
    mono = np.vstack([basis_ana @ u1[:n_used], basis_ana @ w1[:n_used]])
    eigvals, eigvecs = np.linalg.eig(mono)
    if bg.boundary == DIRICHLET:
        keep_idx = np.arange(n_modes)
    else:
        keep_idx = np.concatenate(
            [[0], np.arange(1, n_modes + 1), wide + np.arange(1, n_modes + 1)]
        )
    rows = np.concatenate([keep_idx, n_wide + keep_idx])
    weights = np.sum(np.abs(eigvecs[rows, :]) ** 2, axis=0)
    # Report in reciprocal pairs so the Hamiltonian pairing survives the
    # restriction: greedily take the heaviest remaining eigenvalue together
    # with its reciprocal partner (a hyperbolic pair may split its weight
    # unevenly between growing and decaying directions).
    target = 2 * len(keep_idx)
    remaining = list(np.argsort(-weights, kind="stable"))
    picked = []
    while remaining and len(picked) < target:
        i = remaining.pop(0)
        picked.append(i)
        if len(picked) >= target or not remaining:
            break
        partner = min(remaining, key=lambda j: abs(eigvals[i] * eigvals[j] - 1.0))
        remaining.remove(partner)
        picked.append(partner)
    mults = eigvals[np.sort(np.asarray(picked))]
    zm = zero_mode_residual(bg, grid_n, dt=dt)
    return FloquetReport(
        multipliers=mults, zero_mode_residuals=zm, truncation=len(keep_idx)
    )


def zero_mode_residual(bg: Background, grid_n: int, dt: float | None = None):
    """(r_x, r_t): relative defect of the translation zero modes over one period.

    d_x v and d_t v are exact period-1 Floquet vectors of the continuum
    linearization; each is propagated discretely over one period on the
    periodic grid and compared with itself.  Degenerate (zero) modes return
    0 by convention.
    """
    T = bg.period
    if dt is None:
        dt = T / (32 * grid_n)
    n_steps = max(1, round(T / dt))
    dt = T / n_steps
    x = grid_points(grid_n, PERIODIC)
    times = dt * np.arange(n_steps + 1)
    pot = _potential_series(bg, x, times)
    synth, ana, wn, _ = dynamics._transforms(grid_n, PERIODIC)
    omega = np.sqrt(wn * wn + bg.mass**2)

    u0 = np.column_stack([bg.d_x(x, 0.0), bg.d_t(x, 0.0)])
    w0 = np.column_stack([bg.d_xt(x, 0.0), bg.d_tt(x, 0.0)])
    norms = np.sqrt(np.sum(u0 * u0, axis=0) + np.sum(w0 * w0, axis=0))
    if np.all(norms < 1e-14):
        return (0.0, 0.0)
    u1, w1 = _kernels.linear_evolve(u0, w0, n_steps, dt, pot, synth, ana, omega)
    defect = np.sqrt(np.sum((u1 - u0) ** 2, axis=0) + np.sum((w1 - w0) ** 2, axis=0))
    out = [0.0 if n < 1e-14 else float(d / n) for d, n in zip(defect, norms)]
    return (out[0], out[1])


def report_to_dict(report: FloquetReport) -> dict:
    return {
        "multipliers": [[float(z.real), float(z.imag)] for z in report.multipliers],
        "zero_mode": [float(r) for r in report.zero_mode_residuals],
        "n_modes": report.truncation,
    }


def report_from_dict(obj: dict) -> FloquetReport:
    mults = np.array([complex(re, im) for re, im in obj["multipliers"]])
    return FloquetReport(
        multipliers=mults,
        zero_mode_residuals=tuple(float(r) for r in obj["zero_mode"]),
        truncation=int(obj["n_modes"]),
    )
