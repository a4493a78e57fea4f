"""Traveling-wave solutions: Duffing reduction and Jacobi elliptic profiles.

Substituting phi(x, t) = f(xi), xi = x - v t into

    phi_tt - phi_xx + m^2 phi + eps phi^3 = 0

gives the Duffing equation  (v^2 - 1) f'' + m^2 f + eps f^3 = 0, i.e.

    f'' + alpha f + beta f^3 = 0,   alpha = m^2 / c,  beta = eps / c,
    c = v^2 - 1.

Ansatz substitution fixes the amplitude/modulus relations (k is the
elliptic modulus, p the argument scale):

    f = A cn(p xi, k):  cn'' = (2k^2 - 1) cn - 2 k^2 cn^3
        =>  alpha = p^2 (1 - 2 k^2),   beta A^2 = 2 k^2 p^2   (beta > 0)

    f = A sn(p xi, k):  sn'' = -(1 + k^2) sn + 2 k^2 sn^3
        =>  alpha = p^2 (1 + k^2),     beta A^2 = -2 k^2 p^2  (beta < 0)

Both have period 4 K(k) in the argument, so commensurability with the
domain (spatial period 2*pi/n) imposes  p = 2 n K(k) / pi.  Eliminating p
leaves one scalar equation in k, solved by bisection:

    cn, alpha >= 0:  (2nK/pi)^2 (1 - 2k^2) = alpha  on  k in [0, 1/sqrt2]
    cn, alpha <  0:  same equation           on  k in [1/sqrt2, 1)
    sn:              (2nK/pi)^2 (1 + k^2)   = alpha  on  k in [0, 1)
                     (root exists only for alpha > n^2)

Regimes: super-luminal (c > 0) with eps > 0 -> cn, k^2 < 1/2; sub-luminal
with eps < 0 -> cn, k^2 > 1/2; super-luminal with eps < 0 -> sn; sub-luminal
with eps > 0 admits no periodic orbit (the reduced flow is a repeller).
In the eps -> 0 limit the cn root collapses to k = 0 and existence pins the
velocity to the linear dispersion value v = sqrt(n^2 + m^2)/n.

Fitted profiles are certified: the collocation residual must be below
1e-9 and the amplitude below `amplitude_max` (default 100, the desk-scale
envelope inside which that certification is meaningful in double
precision).  Boundary condition here is periodic on [0, 2*pi]; the
standing-wave modules use the vanishing-endpoint sine basis instead — a
deliberate dual-boundary-condition design.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DomainError,
    LightConeError,
    NoPeriodicOrbitError,
    ValidationError,
)

RESIDUAL_CERTIFICATION = 1e-9
_LIGHT_CONE_TOL = 1e-12


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, by AGM iteration.

    Relative accuracy ~1e-14 on k in [0, 1).  k is the modulus, not the
    parameter m = k^2.
    """
    if not (0.0 <= k < 1.0):
        raise DomainError(f"modulus k={k!r} outside [0, 1)")
    a, b = 1.0, math.sqrt((1.0 - k) * (1.0 + k))
    for _ in range(40):
        if abs(a - b) <= 2e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def jacobi_cn_sn_dn(u, k: float):
    """Jacobi elliptic (cn, sn, dn) at argument u, modulus k in [0, 1)."""
    if not (0.0 <= k < 1.0):
        raise DomainError(f"modulus k={k!r} outside [0, 1)")
    cn, sn, dn = _kernels.jacobi_cn_sn_dn(u, k)
    if np.isscalar(u):
        return float(cn), float(sn), float(dn)
    return cn, sn, dn


@dataclass(frozen=True)
class TravelingWaveProfile:
    """phi(x, t) = amplitude * {cn|sn}(scale * (x - velocity*t), modulus).

    The profile form is determined by the parameter regime: sn when
    epsilon/(velocity^2 - 1) < 0, cn otherwise.
    """

    velocity: float
    mass: float
    epsilon: float
    harmonic: int
    amplitude: float
    modulus: float
    scale: float

    @property
    def form(self) -> str:
        c = self.velocity**2 - 1.0
        return "sn" if self.epsilon / c < 0.0 else "cn"

    @property
    def spatial_period(self) -> float:
        return 2.0 * math.pi / self.harmonic

    @property
    def temporal_period(self) -> float:
        if self.velocity == 0.0:
            raise ValidationError("static profile has no finite temporal period")
        return 2.0 * math.pi / (self.harmonic * abs(self.velocity))


def profile_eval(profile: TravelingWaveProfile, x, t):
    """Evaluate phi(x, t) = f(x - v t)."""
    xi = np.asarray(x, dtype=float) - profile.velocity * np.asarray(t, dtype=float)
    cn, sn, _ = jacobi_cn_sn_dn(xi * profile.scale, profile.modulus)
    val = profile.amplitude * (sn if profile.form == "sn" else cn)
    return float(val) if np.isscalar(x) and np.isscalar(t) else val


def profile_first_derivative(profile: TravelingWaveProfile, xi):
    """f'(xi): cn' = -sn dn, sn' = cn dn (argument scaled by p)."""
    p, k, amp = profile.scale, profile.modulus, profile.amplitude
    cn, sn, dn = jacobi_cn_sn_dn(np.asarray(xi, dtype=float) * p, k)
    return amp * p * (cn * dn if profile.form == "sn" else -sn * dn)


def profile_time_derivative(profile: TravelingWaveProfile, x, t):
    """phi_t(x, t) = -v f'(x - v t)."""
    xi = np.asarray(x, dtype=float) - profile.velocity * np.asarray(t, dtype=float)
    return -profile.velocity * profile_first_derivative(profile, xi)


def profile_second_derivative(profile: TravelingWaveProfile, xi):
    """f''(xi), from the closed-form Jacobi derivative identities."""
    p, k, amp = profile.scale, profile.modulus, profile.amplitude
    cn, sn, dn = jacobi_cn_sn_dn(np.asarray(xi, dtype=float) * p, k)
    if profile.form == "sn":
        return -amp * p * p * sn * (dn * dn + k * k * cn * cn)
    return amp * p * p * cn * (k * k * sn * sn - dn * dn)


def ode_residual(profile: TravelingWaveProfile, n_points: int = 1024) -> float:
    """Max |(v^2-1) f'' + m^2 f + eps f^3| over a uniform collocation grid."""
    xi = np.linspace(0.0, 2.0 * math.pi, n_points, endpoint=False)
    f = profile_eval(profile, xi, 0.0)
    fpp = profile_second_derivative(profile, xi)
    c = profile.velocity**2 - 1.0
    return float(np.max(np.abs(c * fpp + profile.mass**2 * f + profile.epsilon * f**3)))


def first_integral_variation(profile: TravelingWaveProfile, n_points: int = 1024) -> float:
    """Spread of E = c/2 f'^2 + m^2/2 f^2 + eps/4 f^4 along the orbit.

    E is an exact first integral of the Duffing reduction; its variation is
    an oracle for the fitted profile that uses only first derivatives.
    """
    p, k, amp = profile.scale, profile.modulus, profile.amplitude
    xi = np.linspace(0.0, 2.0 * math.pi, n_points, endpoint=False)
    cn, sn, dn = jacobi_cn_sn_dn(xi * p, k)
    fp = amp * p * (cn * dn if profile.form == "sn" else -sn * dn)
    f = amp * (sn if profile.form == "sn" else cn)
    c = profile.velocity**2 - 1.0
    e = 0.5 * c * fp**2 + 0.5 * profile.mass**2 * f**2 + 0.25 * profile.epsilon * f**4
    return float(np.max(e) - np.min(e))


def _bisect(fun, lo: float, hi: float) -> float:
    flo = fun(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def fit_periodic_wave(
    mass: float,
    epsilon: float,
    velocity: float,
    harmonic: int,
    amplitude_max: float = 100.0,
) -> TravelingWaveProfile:
    """Fit a Jacobi profile with spatial period 2*pi/harmonic at the given velocity.

    Raises LightConeError at velocity^2 = 1 and NoPeriodicOrbitError when the
    (mass, epsilon, velocity) regime admits no real certified orbit.
    """
    if harmonic < 1 or harmonic != int(harmonic):
        raise ValidationError("harmonic must be a positive integer")
    n = int(harmonic)
    c = velocity * velocity - 1.0
    if abs(c) < _LIGHT_CONE_TOL:
        raise LightConeError("light-cone degenerate velocity")
    alpha = mass * mass / c
    beta = epsilon / c

    if beta == 0.0:
        # Linear limit: a periodic wave exists only on the dispersion curve,
        # with free amplitude; return its zero-amplitude representative.
        if abs(alpha - n * n) <= 1e-10 * n * n:
            return TravelingWaveProfile(velocity, mass, epsilon, n, 0.0, 0.0, float(n))
        raise NoPeriodicOrbitError(
            "epsilon = 0 admits a periodic wave only at v = sqrt(n^2+m^2)/n"
        )

    half = 1.0 / math.sqrt(2.0)

    def pn(k: float) -> float:
        return 2.0 * n * elliptic_K(k) / math.pi

    if beta > 0.0:
        # cn branch
        def g(k):
            return pn(k) ** 2 * (1.0 - 2.0 * k * k) - alpha

        if alpha > n * n:
            raise NoPeriodicOrbitError(
                f"no cn orbit: alpha={alpha:.6g} exceeds n^2={n*n} "
                "(velocity below the linear dispersion speed)"
            )
        k = _bisect(g, 0.0, half) if alpha >= 0.0 else _bisect(g, half, 1.0 - 1e-13)
        p = pn(k)
        amp = math.sqrt(2.0 * k * k * p * p / beta)
    else:
        # sn branch
        if alpha <= n * n:
            raise NoPeriodicOrbitError(
                f"no sn orbit: alpha={alpha:.6g} <= n^2={n*n} in the beta < 0 regime"
            )

        def g(k):
            return pn(k) ** 2 * (1.0 + k * k) - alpha

        k = _bisect(g, 0.0, 1.0 - 1e-13)
        p = pn(k)
        amp = math.sqrt(-2.0 * k * k * p * p / beta)

    if amp > amplitude_max:
        raise NoPeriodicOrbitError(
            f"fitted amplitude {amp:.4g} exceeds the certifiable envelope "
            f"{amplitude_max:.4g}"
        )
    profile = TravelingWaveProfile(
        velocity=float(velocity),
        mass=float(mass),
        epsilon=float(epsilon),
        harmonic=n,
        amplitude=amp,
        modulus=float(k),
        scale=float(p),
    )
    res = ode_residual(profile)
    if res > RESIDUAL_CERTIFICATION:
        raise NoPeriodicOrbitError(
            f"fitted orbit failed residual certification: {res:.3e} > 1e-9"
        )
    return profile


def profile_to_dict(profile: TravelingWaveProfile) -> dict:
    return {
        "v": profile.velocity,
        "m": profile.mass,
        "epsilon": profile.epsilon,
        "n": profile.harmonic,
        "A": profile.amplitude,
        "k": profile.modulus,
        "beta": profile.scale,
    }


def profile_from_dict(obj: dict) -> TravelingWaveProfile:
    return TravelingWaveProfile(
        velocity=float(obj["v"]),
        mass=float(obj["m"]),
        epsilon=float(obj["epsilon"]),
        harmonic=int(obj["n"]),
        amplitude=float(obj["A"]),
        modulus=float(obj["k"]),
        scale=float(obj["beta"]),
    )
