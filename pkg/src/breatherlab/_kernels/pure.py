"""Reference numpy implementation of the hot kernels.

All evolution kernels share one convention: states live on a real-space
grid; `ana` (n_modes, n_used) projects the first n_used grid samples onto
the spectral basis, `synth` (n_grid, n_modes) evaluates coefficients back
on the full grid, and `omega` holds the linear mode frequencies.  One
Strang step is

    kick(dt/2) -> exact linear rotation(dt) -> kick(dt/2)

with consecutive half-kicks merged across the step loop.  For a mode with
omega = 0 the rotation degenerates to free drift q += dt*p.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"


def _rotation_tables(omega: np.ndarray, dt: float):
    th = omega * dt
    c = np.cos(th)
    s = np.sin(th)
    zero = omega == 0.0
    om_safe = np.where(zero, 1.0, omega)
    s_over = np.where(zero, dt, s / om_safe)
    ms_om = np.where(zero, 0.0, -s * om_safe)
    return c, s_over, ms_om


def field_evolve(phi, pi, n_steps, dt, eps, synth, ana, omega):
    """Evolve phi_tt = phi_xx - m^2 phi - eps phi^3 by n_steps Strang steps."""
    phi = phi.copy()
    pi = pi.copy()
    if n_steps <= 0:
        return phi, pi
    n_used = ana.shape[1]
    c, s_over, ms_om = _rotation_tables(omega, dt)

    def drift():
        a = ana @ phi[:n_used]
        b = ana @ pi[:n_used]
        a, b = c * a + s_over * b, ms_om * a + c * b
        return synth @ a, synth @ b

    pi -= (0.5 * dt * eps) * phi**3
    for _ in range(n_steps - 1):
        phi, pi = drift()
        pi -= (dt * eps) * phi**3
    phi, pi = drift()
    pi -= (0.5 * dt * eps) * phi**3
    return phi, pi


def polaron_evolve(phi, pi, psi, psi_t, n_steps, dt, eps, g, synth, ana, omega_field, omega_dimer):
    """Coupled field-dimer evolution.

    Equations of motion (see `breatherlab.dynamics` for the derivation):

        phi_tt = phi_xx - m^2 phi - eps phi^3 - 2 g |psi|^2 phi
        psi_tt = psi_xx - M^2 psi - (1/g) phi^2 psi
    """
    phi = phi.copy()
    pi = pi.copy()
    psi = psi.astype(complex).copy()
    psi_t = psi_t.astype(complex).copy()
    if n_steps <= 0:
        return phi, pi, psi, psi_t
    n_used = ana.shape[1]
    cf, sf_over, msf_om = _rotation_tables(omega_field, dt)
    cd, sd_over, msd_om = _rotation_tables(omega_dimer, dt)

    def drift():
        a = ana @ phi[:n_used]
        b = ana @ pi[:n_used]
        a, b = cf * a + sf_over * b, msf_om * a + cf * b
        u = ana @ psi[:n_used]
        v = ana @ psi_t[:n_used]
        u, v = cd * u + sd_over * v, msd_om * u + cd * v
        return synth @ a, synth @ b, synth @ u, synth @ v

    def kick(h):
        nonlocal pi, psi_t
        pi = pi - h * (eps * phi**3 + 2.0 * g * np.abs(psi) ** 2 * phi)
        psi_t = psi_t - (h / g) * phi**2 * psi

    kick(0.5 * dt)
    for _ in range(n_steps - 1):
        phi, pi, psi, psi_t = drift()
        kick(dt)
    phi, pi, psi, psi_t = drift()
    kick(0.5 * dt)
    return phi, pi, psi, psi_t


def linear_evolve(u, w, n_steps, dt, pot, synth, ana, omega):
    """Evolve columns of (u, w) under u_tt = u_xx - m^2 u - pot(x, t) u.

    `pot` has shape (n_steps + 1, n_grid): the time-dependent kick potential
    sampled at every step boundary.  Columns are independent; this kernel is
    BLAS-bound and has no compiled counterpart.
    """
    u = u.copy()
    w = w.copy()
    if n_steps <= 0:
        return u, w
    n_used = ana.shape[1]
    c, s_over, ms_om = _rotation_tables(omega, dt)
    cc = c[:, None]
    so = s_over[:, None]
    mo = ms_om[:, None]

    w -= (0.5 * dt) * pot[0][:, None] * u
    for s in range(1, n_steps):
        a = ana @ u[:n_used]
        b = ana @ w[:n_used]
        a, b = cc * a + so * b, mo * a + cc * b
        u = synth @ a
        w = synth @ b
        w -= dt * pot[s][:, None] * u
    a = ana @ u[:n_used]
    b = ana @ w[:n_used]
    a, b = cc * a + so * b, mo * a + cc * b
    u = synth @ a
    w = synth @ b
    w -= (0.5 * dt) * pot[n_steps][:, None] * u
    return u, w


def jacobi_cn_sn_dn(u, k):
    """Jacobi elliptic cn, sn, dn by the descending Landen transformation.

    `u` may be a scalar or array; 0 <= k < 1.  The transformation chain is
    built on moduli only; the base case k < 1e-10 is circular.  Both
    Pythagorean identities hold to machine precision by construction.
    """
    u = np.asarray(u, dtype=float)
    mus = []
    kk = float(k)
    while kk >= 1e-10 and len(mus) < 40:
        kp = np.sqrt((1.0 - kk) * (1.0 + kk))
        kk = (1.0 - kp) / (1.0 + kp)
        mus.append(kk)
    scale = 1.0
    for mu in mus:
        scale *= 1.0 + mu
    v = u / scale
    sn = np.sin(v)
    cn = np.cos(v)
    dn = 1.0 - 0.5 * kk * kk * sn * sn
    for mu in reversed(mus):
        den = 1.0 + mu * sn * sn
        cn, sn, dn = cn * dn / den, (1.0 + mu) * sn / den, (1.0 - mu * sn * sn) / den
    return cn, sn, dn
