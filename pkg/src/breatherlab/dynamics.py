"""Conservative evolution of the scalar field and the coupled polaron system.

Equations of motion
-------------------
The scalar field obeys  phi_tt - phi_xx + m^2 phi + eps phi^3 = 0.

The polaron action (spacetime integral, dimer field psi, coupling g > 0,
dimer mass M) is

    S = 1/2 int (phi_t^2 - phi_x^2 - m^2 phi^2 - eps phi^4 / 2)
      + g^2 int (|psi_t|^2 - |psi_x|^2 - M^2 |psi|^2)
      - g   int |psi|^2 phi^2.

Stationarity under independent variations of phi and psi* gives

    delta phi :  phi_tt - phi_xx + m^2 phi + eps phi^3 + 2 g |psi|^2 phi = 0
    delta psi*:  g^2 (psi_tt - psi_xx + M^2 psi) + g phi^2 psi = 0,

i.e.  psi_tt = psi_xx - M^2 psi - phi^2 psi / g.  (The quartic
self-interaction is retained so that a polaron state with eps = 0
reproduces the pure field-dimer system; with psi = 0 the field equation
reduces to the scalar case.)

The conserved energy and momentum, in the sign convention under which
dH/dt = 0 holds for these equations of motion, are

    H = 1/2 int (pi^2 + phi_x^2 + m^2 phi^2 + eps phi^4 / 2)
      + g^2 int (|psi_t|^2 + |psi_x|^2 + M^2 |psi|^2)
      + g   int |psi|^2 phi^2
    P = int pi phi_x  +  g^2 int (psi_t* psi_x + psi_x* psi_t)

with pi = phi_t.  All integrals are spatial, by trapezoid quadrature
(exact for trigonometric polynomials on the period).

Discretization
--------------
Second-order Strang splitting: the quadratic part is advanced exactly as a
rotation of each spectral mode with frequency sqrt(k^2 + mass^2), and the
anharmonic part (eps phi^4/4 + g |psi|^2 phi^2) is an exact pointwise kick.
Both substeps are exact Hamiltonian flows, so the composition is
symplectic and time-reversible, with bounded energy oscillation O(dt^2).
Stability bound: |dt| <= 0.5 * dx (StabilityError beyond it); negative dt
is accepted so that reversibility can be exercised directly.

Boundaries: ``dirichlet_sine`` works in the integer-sine span (samples on
x_j = 2 pi j / (grid_n - 1), endpoints pinned to zero), ``periodic`` in the
full real Fourier basis on x_j = 2 pi j / grid_n.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .elliptic import TravelingWaveProfile, profile_eval, profile_time_derivative
from .errors import StabilityError, ValidationError
from .lindstedt import LindstedtSolution

DIRICHLET = "dirichlet_sine"
PERIODIC = "periodic"
_ENDPOINT_TOL = 1e-9


@lru_cache(maxsize=32)
def _transforms(grid_n: int, boundary: str):
    """(synth, ana, wavenumbers) for the grid; cached per (grid_n, boundary)."""
    if grid_n < 8:
        raise ValidationError("grid_n must be >= 8")
    if boundary == DIRICHLET:
        m = grid_n - 1
        kmax = (m - 1) // 2
        x = 2.0 * np.pi * np.arange(grid_n) / m
        k = np.arange(1, kmax + 1, dtype=float)
        synth = np.sin(np.outer(x, k))
        ana = (2.0 / m) * np.sin(np.outer(k, x[:m]))
        dsynth = k * np.cos(np.outer(x, k))
        return synth, ana, k, dsynth
    if boundary == PERIODIC:
        n = grid_n
        kmax = (n - 1) // 2
        x = 2.0 * np.pi * np.arange(n) / n
        k = np.arange(1, kmax + 1, dtype=float)
        cos = np.cos(np.outer(x, k))
        sin = np.sin(np.outer(x, k))
        synth = np.hstack([np.ones((n, 1)), cos, sin])
        ana = np.vstack([np.full((1, n), 1.0 / n), (2.0 / n) * cos.T, (2.0 / n) * sin.T])
        dsynth = np.hstack([np.zeros((n, 1)), -k * sin, k * cos])
        wn = np.concatenate([[0.0], k, k])
        return synth, ana, wn, dsynth
    raise ValidationError(f"unknown boundary {boundary!r}")


def grid_points(grid_n: int, boundary: str) -> np.ndarray:
    if boundary == DIRICHLET:
        return 2.0 * np.pi * np.arange(grid_n) / (grid_n - 1)
    if boundary == PERIODIC:
        return 2.0 * np.pi * np.arange(grid_n) / grid_n
    raise ValidationError(f"unknown boundary {boundary!r}")


def _quad_weights(grid_n: int, boundary: str) -> np.ndarray:
    if boundary == DIRICHLET:
        dx = 2.0 * np.pi / (grid_n - 1)
        w = np.full(grid_n, dx)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w
    return np.full(grid_n, 2.0 * np.pi / grid_n)


def _prep_array(arr, grid_n, boundary, name, complex_ok=False):
    dtype = complex if complex_ok else float
    a = np.asarray(arr, dtype=dtype).copy()
    if a.shape != (grid_n,):
        raise ValidationError(f"{name} must have shape ({grid_n},)")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} must be finite")
    if boundary == DIRICHLET:
        if max(abs(a[0]), abs(a[-1])) > _ENDPOINT_TOL:
            raise ValidationError(f"{name} endpoints must vanish under {DIRICHLET}")
        a[0] = 0.0
        a[-1] = 0.0
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FieldState:
    """Scalar field samples (phi, pi = phi_t) on the chosen grid."""

    grid_n: int
    boundary: str
    phi: np.ndarray
    pi: np.ndarray
    time: float = 0.0
    mass: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.boundary not in (DIRICHLET, PERIODIC):
            raise ValidationError(f"unknown boundary {self.boundary!r}")
        object.__setattr__(self, "phi", _prep_array(self.phi, self.grid_n, self.boundary, "phi"))
        object.__setattr__(self, "pi", _prep_array(self.pi, self.grid_n, self.boundary, "pi"))

    @property
    def x(self) -> np.ndarray:
        return grid_points(self.grid_n, self.boundary)


@dataclass(frozen=True)
class PolaronState(FieldState):
    """Field state plus the complex dimer field (psi, psi_t)."""

    psi: np.ndarray = None
    psi_t: np.ndarray = None
    coupling: float = 1.0
    dimer_mass: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.psi is None or self.psi_t is None:
            raise ValidationError("psi and psi_t are required")
        if self.coupling <= 0.0:
            raise ValidationError("coupling g must be positive")
        object.__setattr__(
            self, "psi", _prep_array(self.psi, self.grid_n, self.boundary, "psi", complex_ok=True)
        )
        object.__setattr__(
            self, "psi_t", _prep_array(self.psi_t, self.grid_n, self.boundary, "psi_t", complex_ok=True)
        )


@dataclass(frozen=True)
class ConservedQuantities:
    energy: float
    momentum: float


def _check_dt(state: FieldState, dt: float):
    dx = 2.0 * np.pi / (state.grid_n - (1 if state.boundary == DIRICHLET else 0))
    if dt == 0.0 or not np.isfinite(dt):
        raise ValidationError("dt must be a nonzero finite number")
    if abs(dt) > 0.5 * dx:
        raise StabilityError(f"|dt|={abs(dt):.3e} exceeds the bound 0.5*dx={0.5*dx:.3e}")


def evolve(state: FieldState, dt: float, n_steps: int):
    """Advance `n_steps` Strang steps; returns a new state of the same type."""
    if n_steps < 0:
        raise ValidationError("n_steps must be >= 0")
    if n_steps == 0:
        return state
    _check_dt(state, dt)
    synth, ana, wn, _ = _transforms(state.grid_n, state.boundary)
    om = np.sqrt(wn * wn + state.mass**2)
    if isinstance(state, PolaronState):
        om_d = np.sqrt(wn * wn + state.dimer_mass**2)
        phi, pi, psi, psi_t = _kernels.polaron_evolve(
            state.phi, state.pi, state.psi, state.psi_t,
            n_steps, dt, state.epsilon, state.coupling, synth, ana, om, om_d,
        )
        return PolaronState(
            grid_n=state.grid_n, boundary=state.boundary, phi=phi, pi=pi,
            time=state.time + n_steps * dt, mass=state.mass, epsilon=state.epsilon,
            psi=psi, psi_t=psi_t, coupling=state.coupling, dimer_mass=state.dimer_mass,
        )
    phi, pi = _kernels.field_evolve(
        state.phi, state.pi, n_steps, dt, state.epsilon, synth, ana, om
    )
    return FieldState(
        grid_n=state.grid_n, boundary=state.boundary, phi=phi, pi=pi,
        time=state.time + n_steps * dt, mass=state.mass, epsilon=state.epsilon,
    )


def step_kg(state: FieldState, dt: float) -> FieldState:
    """One Strang step of the scalar nonlinear Klein-Gordon field."""
    if isinstance(state, PolaronState):
        raise ValidationError("use step_polaron for polaron states")
    return evolve(state, dt, 1)


def step_polaron(state: PolaronState, dt: float) -> PolaronState:
    """One Strang step of the coupled field-dimer system."""
    if not isinstance(state, PolaronState):
        raise ValidationError("step_polaron requires a PolaronState")
    return evolve(state, dt, 1)


def _gradient(state: FieldState, values: np.ndarray) -> np.ndarray:
    synth, ana, _, dsynth = _transforms(state.grid_n, state.boundary)
    return dsynth @ (ana @ values[: ana.shape[1]])


def energy(state: FieldState) -> float:
    """Conserved H (see module docstring); trapezoid quadrature."""
    w = _quad_weights(state.grid_n, state.boundary)
    phi_x = _gradient(state, state.phi)
    h = 0.5 * float(
        w @ (state.pi**2 + phi_x**2 + state.mass**2 * state.phi**2
             + 0.5 * state.epsilon * state.phi**4)
    )
    if isinstance(state, PolaronState):
        g = state.coupling
        psi_x = _gradient(state, state.psi)
        h += g * g * float(
            w @ (np.abs(state.psi_t) ** 2 + np.abs(psi_x) ** 2
                 + state.dimer_mass**2 * np.abs(state.psi) ** 2)
        )
        h += g * float(w @ (np.abs(state.psi) ** 2 * state.phi**2))
    return h


def momentum(state: FieldState) -> float:
    """Conserved P = int pi phi_x (+ dimer part); trapezoid quadrature."""
    w = _quad_weights(state.grid_n, state.boundary)
    phi_x = _gradient(state, state.phi)
    p = float(w @ (state.pi * phi_x))
    if isinstance(state, PolaronState):
        psi_x = _gradient(state, state.psi)
        p += 2.0 * state.coupling**2 * float(w @ np.real(np.conj(state.psi_t) * psi_x))
    return p


def conserved(state: FieldState) -> ConservedQuantities:
    return ConservedQuantities(energy=energy(state), momentum=momentum(state))


def evolve_with_diagnostics(state: FieldState, dt: float, n_steps: int, record_every: int = 1):
    """Run the stepper recording (step, time, H, P) every `record_every` steps.

    Returns (records, final_state); records is a list of
    (step, time, ConservedQuantities) and is empty when n_steps == 0.
    """
    if record_every < 1:
        raise ValidationError("record_every must be >= 1")
    if n_steps == 0:
        return [], state
    marks = list(range(0, n_steps + 1, record_every))
    if marks[-1] != n_steps:
        marks.append(n_steps)
    records = []
    current = state
    t0 = state.time
    for prev, nxt in zip(marks, marks[1:]):
        if prev == 0:
            records.append((0, t0, conserved(current)))
        current = evolve(current, dt, nxt - prev)
        records.append((nxt, t0 + nxt * dt, conserved(current)))
    return records, current


def diagnostics_to_csv(records, stream):
    """Write `step,time,energy,momentum` rows; floats in repr precision."""
    stream.write("step,time,energy,momentum\n")
    for step, t, q in records:
        stream.write(f"{step},{t!r},{q.energy!r},{q.momentum!r}\n")


def state_from_solution(
    sol: LindstedtSolution, grid_n: int, t: float = 0.0, boundary: str = DIRICHLET
) -> FieldState:
    """Sample a Lindstedt solution (phi, phi_t) onto a grid at time t."""
    x = grid_points(grid_n, boundary)
    phi = np.ravel(sol.field(x, t))
    pi = np.ravel(sol.field(x, t, dt=1))
    if boundary == DIRICHLET:
        phi[[0, -1]] = 0.0
        pi[[0, -1]] = 0.0
    return FieldState(
        grid_n=grid_n, boundary=boundary, phi=phi, pi=pi,
        time=t, mass=sol.mass, epsilon=sol.epsilon,
    )


def state_from_profile(
    profile: TravelingWaveProfile, grid_n: int, t: float = 0.0
) -> FieldState:
    """Sample a traveling-wave profile onto the periodic grid at time t."""
    x = grid_points(grid_n, PERIODIC)
    return FieldState(
        grid_n=grid_n, boundary=PERIODIC,
        phi=profile_eval(profile, x, t),
        pi=profile_time_derivative(profile, x, t),
        time=t, mass=profile.mass, epsilon=profile.epsilon,
    )


def state_to_dict(state: FieldState) -> dict:
    out = {
        "grid_n": state.grid_n,
        "boundary": state.boundary,
        "time": state.time,
        "mass": state.mass,
        "epsilon": state.epsilon,
        "phi": [float(v) for v in state.phi],
        "pi": [float(v) for v in state.pi],
    }
    if isinstance(state, PolaronState):
        out.update(
            {
                "psi_re": [float(v) for v in state.psi.real],
                "psi_im": [float(v) for v in state.psi.imag],
                "psi_t_re": [float(v) for v in state.psi_t.real],
                "psi_t_im": [float(v) for v in state.psi_t.imag],
                "coupling": state.coupling,
                "dimer_mass": state.dimer_mass,
            }
        )
    return out


def state_from_dict(obj: dict) -> FieldState:
    base = dict(
        grid_n=int(obj["grid_n"]),
        boundary=str(obj["boundary"]),
        phi=np.asarray(obj["phi"], dtype=float),
        pi=np.asarray(obj["pi"], dtype=float),
        time=float(obj["time"]),
        mass=float(obj["mass"]),
        epsilon=float(obj["epsilon"]),
    )
    if "psi_re" in obj:
        return PolaronState(
            **base,
            psi=np.asarray(obj["psi_re"], dtype=float) + 1j * np.asarray(obj["psi_im"], dtype=float),
            psi_t=np.asarray(obj["psi_t_re"], dtype=float) + 1j * np.asarray(obj["psi_t_im"], dtype=float),
            coupling=float(obj["coupling"]),
            dimer_mass=float(obj["dimer_mass"]),
        )
    return FieldState(**base)
