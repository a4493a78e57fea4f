"""Doubly-periodic standing waves by the Poincare-Lindstedt expansion.

With rescaled time tau = omega*t and omega(eps) = 1 + eps*w1 + ..., the
massless resonant expansion phi = phi0 + eps*phi1 + ... produces

    order 0:   D phi0 = 0          =>  phi0 = sum_n a_n sin(nx) sin(n tau)
    order 1:   D phi1 = rhs,       rhs = 2 w1 d^2phi0/dtau^2 + phi0^3

with D = d^2/dx^2 - d^2/dtau^2 in the sign convention of
`breatherlab.series`.  phi1 is doubly periodic only if the diagonal
(resonant) components of rhs vanish; those components as a function of
(a, w1) form the resonance system.

Banded closure on odd harmonics
-------------------------------
The cubic interaction of odd-harmonic diagonal modes never forces even
harmonics, so the even amplitudes solve the system trivially as zeros and
the odd sector closes on itself.  A `ResonanceProblem` with ``n_modes = N``
therefore retains the first N odd harmonics 1, 3, ..., 2N-1 as unknown
amplitudes and enforces the resonance equations at exactly those
harmonics.  Diagonal rhs components above the retained band cannot be
cancelled by any retained amplitude; they are truncation diagnostics of
the banded closure (use `truncation_residual`), decay rapidly with N, and
are dropped when the first-order field is assembled.

The amplitude scale is a gauge freedom (a -> s*a, w1 -> s^2*w1), fixed by
pinning a_1 (default) or the Euclidean norm of a.

Mass m > 0 is non-resonant at first order: no secular system arises, and
the first-order field follows directly from generalized mode divisions
(`build_nonresonant_solution`) about the fundamental sin(x) sin(tau) with
base frequency sqrt(1 + m^2).  Denominators below 1e-8 raise
SmallDivisorError.  Only orders 0 and 1 are constructed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NonConvergenceError,
    SingularJacobianError,
    SmallDivisorError,
    ValidationError,
)
from .series import (
    SineSeries2D,
    cube_project,
    eval_series,
    invert_dalembert,
    series_from_dict,
    series_to_dict,
)

DIVISOR_FLOOR = 1e-8


@dataclass(frozen=True)
class LindstedtSolution:
    """Orders (phi0, phi1, ...), frequency corrections, and bookkeeping.

    omega = base_frequency * (1 + sum_n eps^n w_n), with base_frequency 1 in
    the resonant massless case and sqrt(1 + mass^2) for the non-resonant
    fundamental.
    """

    orders: tuple
    omega_corrections: tuple
    epsilon: float
    mass: float = 0.0

    def __post_init__(self):
        if not self.orders:
            raise ValidationError("at least the zero-order field is required")
        if self.omega() <= 0.0:
            raise ValidationError("omega(epsilon) must be positive")

    @property
    def base_frequency(self) -> float:
        return float(np.sqrt(1.0 + self.mass**2))

    def omega(self, epsilon: float | None = None) -> float:
        eps = self.epsilon if epsilon is None else epsilon
        corr = sum(w * eps ** (n + 1) for n, w in enumerate(self.omega_corrections))
        return self.base_frequency * (1.0 + corr)

    def field(self, x, t, dx: int = 0, dt: int = 0):
        """Evaluate phi (or an analytic derivative) at x, t; arrays give grids."""
        om = self.omega()
        tau = om * t if np.isscalar(t) else om * np.asarray(t, dtype=float)
        total = 0.0
        for n, order in enumerate(self.orders):
            total = total + self.epsilon**n * eval_series(order, x, tau, dx=dx, dtau=dt)
        if dt:
            total = total * om**dt
        return total


@dataclass(frozen=True)
class ResonanceProblem:
    """Banded resonance system over the first `n_modes` odd harmonics."""

    n_modes: int
    normalization: str = "fix_a1"
    norm_value: float = 1.0
    tol: float = 1e-12

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValidationError("n_modes must be >= 1")
        if self.tol <= 0.0:
            raise ValidationError("tol must be positive")
        if self.normalization not in ("fix_a1", "fix_norm"):
            raise ValidationError("normalization must be 'fix_a1' or 'fix_norm'")

    @property
    def harmonics(self) -> np.ndarray:
        return 2 * np.arange(1, self.n_modes + 1) - 1


def diagonal_series(amplitudes, harmonics=None) -> SineSeries2D:
    """phi0 = sum_i a_i sin(h_i x) sin(h_i tau); default harmonics 1,3,5,..."""
    a = np.asarray(amplitudes, dtype=float)
    if harmonics is None:
        harmonics = 2 * np.arange(1, a.size + 1) - 1
    h = np.asarray(harmonics, dtype=int)
    hmax = int(h.max())
    c = np.zeros((hmax, hmax))
    c[h - 1, h - 1] = a
    return SineSeries2D(c)


def first_order_rhs(phi0: SineSeries2D, omega1: float) -> SineSeries2D:
    """rhs of the order-1 equation: 2*omega1*d^2phi0/dtau^2 + phi0^3."""
    if phi0.kmax != phi0.lmax or np.any(phi0.coeffs - np.diag(np.diagonal(phi0.coeffs))):
        raise ValidationError("phi0 must be diagonal-only")
    cube = cube_project(phi0)
    out = cube.coeffs.copy()
    n = phi0.kmax
    l2 = np.arange(1, n + 1, dtype=float) ** 2
    out[np.arange(n), np.arange(n)] += -2.0 * omega1 * l2 * np.diagonal(phi0.coeffs)
    return SineSeries2D(out)


def resonance_residual(a, omega1: float) -> np.ndarray:
    """Diagonal rhs components for n = 1 .. 3*h_max.

    `a` holds the odd-harmonic amplitudes (a_1, a_3, ...).  A zero of the
    retained components is exactly the double-periodicity condition for
    phi1; entries at even harmonics vanish identically by parity.
    """
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        raise ValidationError("at least one amplitude is required")
    rhs = first_order_rhs(diagonal_series(a), omega1)
    return np.diagonal(rhs.coeffs).copy()


def truncation_residual(a, omega1: float, n_modes: int | None = None) -> float:
    """Largest dropped diagonal component above the retained band."""
    a = np.asarray(a, dtype=float)
    n = a.size if n_modes is None else n_modes
    diag = resonance_residual(a, omega1)
    hmax = 2 * n - 1
    return float(np.max(np.abs(diag[hmax:]))) if diag.size > hmax else 0.0


def solve_resonance_system(problem: ResonanceProblem, initial=None, max_iter: int = 100):
    """Solve the banded resonance system by damped Newton iteration.

    Returns (a, omega1) with the residual at the retained odd harmonics
    below problem.tol in max norm.  `initial` is an optional
    (a_guess, omega1_guess) pair.  Deterministic: fixed finite-difference
    Jacobian step, halving line search (30 halvings max), `max_iter`
    iterations before NonConvergenceError.
    """
    n = problem.n_modes
    h = problem.harmonics
    if initial is None:
        a0 = np.zeros(n)
        a0[0] = problem.norm_value if problem.normalization == "fix_a1" else max(problem.norm_value, 1e-3)
        w0 = 9.0 * a0[0] ** 2 / 32.0
    else:
        a0 = np.asarray(initial[0], dtype=float).copy()
        if a0.size != n:
            raise ValidationError(f"initial amplitude vector must have length {n}")
        w0 = float(initial[1])
    if not (np.all(np.isfinite(a0)) and np.isfinite(w0)):
        raise ValidationError("initial guess must be finite")

    if problem.normalization == "fix_norm" and problem.norm_value == 0.0:
        return np.zeros(n), w0

    fix_a1 = problem.normalization == "fix_a1"
    if fix_a1:
        a1 = problem.norm_value

        def unpack(x):
            return np.concatenate(([a1], x[:-1])), x[-1]

        x = np.concatenate([a0[1:], [w0]])
    else:

        def unpack(x):
            return x[:-1], x[-1]

        x = np.concatenate([a0, [w0]])

    def fun(x):
        a, w1 = unpack(x)
        res = resonance_residual(a, w1)[h - 1]
        if fix_a1:
            return res
        return np.concatenate([res, [np.linalg.norm(a) - problem.norm_value]])

    f = fun(x)
    fnorm = np.max(np.abs(f))
    fd = 1e-7
    for _ in range(max_iter):
        if fnorm < problem.tol:
            a, w1 = unpack(x)
            return a, float(w1)
        jac = np.empty((f.size, x.size))
        for j in range(x.size):
            xp = x.copy()
            xp[j] += fd
            jac[:, j] = (fun(xp) - f) / fd
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(f"Newton Jacobian is singular: {exc}") from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobianError("Newton step is not finite")
        lam = 1.0
        for _ in range(30):
            xt = x - lam * step
            ft = fun(xt)
            if np.max(np.abs(ft)) < fnorm:
                break
            lam *= 0.5
        else:
            raise NonConvergenceError(
                f"line search stalled at residual {fnorm:.3e} (tol {problem.tol:.1e})"
            )
        x, f = xt, ft
        fnorm = np.max(np.abs(f))
    raise NonConvergenceError(
        f"Newton did not reach tol {problem.tol:.1e} in {max_iter} iterations "
        f"(residual {fnorm:.3e})"
    )


def build_solution(
    a,
    omega1: float,
    epsilon: float,
    tol: float,
    drop_truncation: bool = True,
) -> LindstedtSolution:
    """Assemble the first-order solution from a resonance root.

    phi0 comes from the odd-harmonic amplitudes, phi1 from inverting the
    wave operator on the first-order rhs.  In-band diagonal entries must be
    below `tol` (the root condition); above-band diagonal entries are the
    banded-closure truncation and are dropped when `drop_truncation` is
    true, otherwise they raise ResonantSourceError via the inversion.
    """
    a = np.asarray(a, dtype=float)
    phi0 = diagonal_series(a)
    res = resonance_residual(a, omega1)
    hmax = 2 * a.size - 1
    retained = res[:hmax]
    if np.max(np.abs(retained[::2])) > tol:
        raise ValidationError(
            f"retained resonance residual {np.max(np.abs(retained[::2])):.3e} exceeds tol"
        )
    rhs = first_order_rhs(phi0, omega1)
    coeffs = rhs.coeffs.copy()
    if drop_truncation:
        np.fill_diagonal(coeffs, 0.0)
        rhs = SineSeries2D(coeffs)
    phi1 = invert_dalembert(rhs, tol)
    return LindstedtSolution(
        orders=(phi0, phi1),
        omega_corrections=(float(omega1),),
        epsilon=float(epsilon),
        mass=0.0,
    )


def build_nonresonant_solution(
    amplitude: float,
    mass: float,
    epsilon: float,
    tol: float = 1e-12,
) -> LindstedtSolution:
    """First-order solution about the fundamental for m > 0 (non-resonant).

    phi0 = amplitude * sin(x) sin(tau) with base frequency w0 = sqrt(1+m^2);
    the single secular condition fixes omega1 = 9 a^2 / (32 w0^2) and phi1
    follows from mode divisions by (l^2 w0^2 - k^2 - m^2).
    """
    if mass <= 0.0:
        raise ValidationError("use the resonance solver for the massless case")
    a = float(amplitude)
    w0sq = 1.0 + mass * mass
    omega1 = 9.0 * a * a / (32.0 * w0sq)
    phi0 = diagonal_series([a], harmonics=[1])
    cube = cube_project(phi0)
    rhs = cube.coeffs.copy()
    l2 = np.arange(1, rhs.shape[1] + 1, dtype=float) ** 2
    rhs[0, 0] += -2.0 * omega1 * w0sq * a
    if abs(rhs[0, 0]) > tol:
        raise ValidationError("secular component not cancelled; tol too tight?")
    k2 = np.arange(1, rhs.shape[0] + 1, dtype=float) ** 2
    den = w0sq * l2[None, :] - k2[:, None] - mass * mass
    den[0, 0] = 1.0
    small = np.abs(den) < DIVISOR_FLOOR
    if np.any(small & (np.abs(rhs) > 0.0)):
        kk, ll = np.argwhere(small & (np.abs(rhs) > 0.0))[0] + 1
        raise SmallDivisorError(
            f"near-resonant denominator at mode ({kk},{ll}) below {DIVISOR_FLOOR}"
        )
    phi1 = rhs / den
    phi1[0, 0] = 0.0
    return LindstedtSolution(
        orders=(phi0, SineSeries2D(phi1)),
        omega_corrections=(omega1,),
        epsilon=float(epsilon),
        mass=float(mass),
    )


def residual_grid(sol: LindstedtSolution, x, t) -> np.ndarray:
    """phi_tt - phi_xx + m^2 phi + eps phi^3 on the (x, t) product grid.

    Derivatives are computed analytically mode-wise; this same routine
    backs both `pde_residual` and the fluctuation-module background check.
    """
    phi = sol.field(x, t)
    phi_tt = sol.field(x, t, dt=2)
    phi_xx = sol.field(x, t, dx=2)
    return phi_tt - phi_xx + sol.mass**2 * phi + sol.epsilon * phi**3


def pde_residual(sol: LindstedtSolution, grid_n: int) -> float:
    """Max-norm residual of the original wave equation on a grid_n^2 grid.

    The time grid spans one full period 2*pi/omega.  A correct first-order
    solution has residual O(eps^2); this is the defining quality measure.
    """
    if grid_n < 16:
        raise ValidationError("grid_n must be >= 16")
    x = np.linspace(0.0, 2.0 * np.pi, grid_n)
    t = np.linspace(0.0, 2.0 * np.pi / sol.omega(), grid_n)
    return float(np.max(np.abs(residual_grid(sol, x, t))))


def solution_to_dict(sol: LindstedtSolution) -> dict:
    return {
        "epsilon": sol.epsilon,
        "mass": sol.mass,
        "omega": [float(w) for w in sol.omega_corrections],
        "orders": [series_to_dict(s) for s in sol.orders],
    }


def solution_from_dict(obj: dict) -> LindstedtSolution:
    return LindstedtSolution(
        orders=tuple(series_from_dict(s) for s in obj["orders"]),
        omega_corrections=tuple(float(w) for w in obj["omega"]),
        epsilon=float(obj["epsilon"]),
        mass=float(obj["mass"]),
    )
