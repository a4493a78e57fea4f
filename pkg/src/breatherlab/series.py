"""Exact algebra on truncated double sine series.

A field is represented as

    f(x, tau) = sum_{k=1}^{Kmax} sum_{l=1}^{Lmax} C_kl sin(k x) sin(l tau)

on x in [0, 2*pi], tau in R.  Every such field vanishes at x in {0, 2*pi}
and at integer multiples of 2*pi in tau, and is antisymmetric about x = pi.

Sign convention of the wave operator
------------------------------------
``dalembert_apply`` implements D = d^2/dx^2 - d^2/dtau^2, which acts
mode-wise as

    D[sin(k x) sin(l tau)] = (l^2 - k^2) sin(k x) sin(l tau).

This orientation (spatial minus temporal) is fixed so that the first-order
standing-wave correction is obtained directly as
``invert_dalembert(first_order_rhs(...))`` with no extra negation; the
choice is verified by the O(eps^2) residual law of the perturbation tests.
``invert_dalembert`` divides by (l^2 - k^2) and is the exact inverse of
``dalembert_apply`` on the off-diagonal (k != l) subspace; the diagonal
k = l is the kernel of D.

Coefficients are stored dense.  The supported truncation envelope is
Kmax, Lmax <= 512.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResonantSourceError, ValidationError

MAX_MODES = 512


@dataclass(frozen=True)
class SineSeries2D:
    """Dense coefficient table C[k-1, l-1] for sum C_kl sin(kx) sin(l tau)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 2 or c.size == 0:
            raise ValidationError("coeffs must be a non-empty 2-D array")
        if c.shape[0] > MAX_MODES or c.shape[1] > MAX_MODES:
            raise ValidationError(f"truncation exceeds supported envelope {MAX_MODES}")
        if not np.all(np.isfinite(c)):
            raise ValidationError("coefficients must be finite")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def kmax(self) -> int:
        return self.coeffs.shape[0]

    @property
    def lmax(self) -> int:
        return self.coeffs.shape[1]

    def __eq__(self, other):
        return isinstance(other, SineSeries2D) and np.array_equal(self.coeffs, other.coeffs)


@dataclass(frozen=True)
class LinearSpectrum:
    """Frequencies Omega_l = sqrt(l^2 + mass^2) of the linearized field."""

    mass: float
    frequencies: np.ndarray

    @classmethod
    def build(cls, mass: float, l_max: int) -> "LinearSpectrum":
        if mass < 0:
            raise ValidationError("mass must be >= 0")
        l = np.arange(1, l_max + 1, dtype=float)
        return cls(mass=float(mass), frequencies=np.sqrt(l * l + mass * mass))


def zero_series(kmax: int, lmax: int) -> SineSeries2D:
    return SineSeries2D(np.zeros((kmax, lmax)))


def _basis(points, n_modes: int, deriv: int = 0) -> np.ndarray:
    """Rows of sin(k*points) (or its derivative of order `deriv`) for k=1..n."""
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    k = np.arange(1, n_modes + 1, dtype=float)
    arg = np.outer(pts, k)
    if deriv == 0:
        return np.sin(arg)
    if deriv == 1:
        return k * np.cos(arg)
    if deriv == 2:
        return -(k * k) * np.sin(arg)
    raise ValidationError("derivative order must be 0, 1 or 2")


def eval_series(series: SineSeries2D, x, tau, dx: int = 0, dtau: int = 0):
    """Evaluate the series (or a mixed derivative up to order 2 per axis).

    `x` and `tau` may be scalars or 1-D arrays; array inputs produce the
    tensor-grid values with shape (len(x), len(tau)).
    """
    scalar = np.isscalar(x) and np.isscalar(tau)
    sx = _basis(x, series.kmax, dx)
    st = _basis(tau, series.lmax, dtau)
    out = sx @ series.coeffs @ st.T
    return float(out[0, 0]) if scalar else out


def cube_project(series: SineSeries2D, k_out: int | None = None, l_out: int | None = None) -> SineSeries2D:
    """Sine-sine coefficients of the pointwise cube of `series`.

    The cube of a series truncated at (K, L) has modes up to (3K, 3L); the
    default output truncation is exactly that, which makes the projection
    lossless.  Coefficients are recovered by collocation on a uniform
    full-period grid fine enough that the trapezoid projection is exact.
    """
    if k_out is None:
        k_out = 3 * series.kmax
    if l_out is None:
        l_out = 3 * series.lmax
    if k_out < 1 or l_out < 1:
        raise ValidationError("output truncation must be >= 1")
    mx = 3 * series.kmax + k_out + 1
    mt = 3 * series.lmax + l_out + 1
    x = 2.0 * np.pi * np.arange(mx) / mx
    t = 2.0 * np.pi * np.arange(mt) / mt
    f = _basis(x, series.kmax) @ series.coeffs @ _basis(t, series.lmax).T
    f3 = f * f * f
    px = _basis(x, k_out) * (2.0 / mx)
    pt = _basis(t, l_out) * (2.0 / mt)
    return SineSeries2D(px.T @ f3 @ pt)


def _mode_multipliers(kmax: int, lmax: int) -> np.ndarray:
    k = np.arange(1, kmax + 1, dtype=float)
    l = np.arange(1, lmax + 1, dtype=float)
    return l[None, :] ** 2 - k[:, None] ** 2


def dalembert_apply(series: SineSeries2D) -> SineSeries2D:
    """Apply D = d^2/dx^2 - d^2/dtau^2 mode-wise: C_kl -> (l^2 - k^2) C_kl."""
    return SineSeries2D(_mode_multipliers(series.kmax, series.lmax) * series.coeffs)


def invert_dalembert(series: SineSeries2D, tol: float) -> SineSeries2D:
    """Solve D u = series on the off-diagonal subspace: C_kl / (l^2 - k^2).

    The diagonal k = l is resonant; any diagonal coefficient larger than
    `tol` in magnitude signals a secular source and raises
    ResonantSourceError.  Diagonal output entries are zero.
    """
    n = min(series.kmax, series.lmax)
    diag = np.abs(np.diagonal(series.coeffs))
    if np.any(diag > tol):
        worst = int(np.argmax(diag)) + 1
        raise ResonantSourceError(
            f"resonant source component ({worst},{worst}) = {diag[worst - 1]:.3e} exceeds tol={tol:.3e}"
        )
    mult = _mode_multipliers(series.kmax, series.lmax)
    np.fill_diagonal(mult[:n, :n], 1.0)
    out = series.coeffs / mult
    out[np.arange(n), np.arange(n)] = 0.0
    return SineSeries2D(out)


def series_to_dict(series: SineSeries2D) -> dict:
    """JSON interchange form: {"kmax", "lmax", "coeffs" (row-major)}."""
    return {
        "kmax": series.kmax,
        "lmax": series.lmax,
        "coeffs": [float(v) for v in series.coeffs.ravel()],
    }


def series_from_dict(obj: dict) -> SineSeries2D:
    kmax, lmax = int(obj["kmax"]), int(obj["lmax"])
    c = np.asarray(obj["coeffs"], dtype=float)
    if c.size != kmax * lmax:
        raise ValidationError("coeffs length does not match kmax*lmax")
    return SineSeries2D(c.reshape(kmax, lmax))
