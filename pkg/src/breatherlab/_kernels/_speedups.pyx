# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled counterparts of the hot kernels in `pure`.

Same contracts as `breatherlab._kernels.pure`; the spectral transforms are
plain matrix-vector products unrolled in C, which beats the numpy path at
the small grid sizes this package targets because it removes the
per-step temporary/dispatch overhead.
"""
import numpy as np

from libc.math cimport cos, sin, sqrt, fabs

BACKEND_NAME = "compiled"


cdef void _rotate(double[::1] a, double[::1] b, double[::1] c,
                  double[::1] s_over, double[::1] ms_om) noexcept nogil:
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double ai, bi
    for i in range(n):
        ai = a[i]
        bi = b[i]
        a[i] = c[i] * ai + s_over[i] * bi
        b[i] = ms_om[i] * ai + c[i] * bi


cdef void _analyze(double[:, ::1] ana, double[::1] grid, double[::1] modes) noexcept nogil:
    cdef Py_ssize_t i, j, m = ana.shape[0], n = ana.shape[1]
    cdef double acc
    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc += ana[i, j] * grid[j]
        modes[i] = acc


cdef void _synthesize(double[:, ::1] synth, double[::1] modes, double[::1] grid) noexcept nogil:
    cdef Py_ssize_t i, j, g = synth.shape[0], m = synth.shape[1]
    cdef double acc
    for j in range(g):
        acc = 0.0
        for i in range(m):
            acc += synth[j, i] * modes[i]
        grid[j] = acc


cdef void _tables(double[::1] omega, double dt, double[::1] c,
                  double[::1] s_over, double[::1] ms_om) noexcept nogil:
    cdef Py_ssize_t i, n = omega.shape[0]
    cdef double th
    for i in range(n):
        th = omega[i] * dt
        c[i] = cos(th)
        if omega[i] == 0.0:
            s_over[i] = dt
            ms_om[i] = 0.0
        else:
            s_over[i] = sin(th) / omega[i]
            ms_om[i] = -sin(th) * omega[i]


def field_evolve(phi, pi, n_steps, dt, eps, synth, ana, omega):
    cdef double[::1] phi_v = np.array(phi, dtype=float)
    cdef double[::1] pi_v = np.array(pi, dtype=float)
    if n_steps <= 0:
        return np.asarray(phi_v).copy(), np.asarray(pi_v).copy()
    cdef double[:, ::1] synth_v = np.ascontiguousarray(synth, dtype=float)
    cdef double[:, ::1] ana_v = np.ascontiguousarray(ana, dtype=float)
    cdef double[::1] om_v = np.ascontiguousarray(omega, dtype=float)
    cdef Py_ssize_t n_modes = om_v.shape[0]
    cdef double[::1] c = np.empty(n_modes)
    cdef double[::1] s_over = np.empty(n_modes)
    cdef double[::1] ms_om = np.empty(n_modes)
    cdef double[::1] a = np.empty(n_modes)
    cdef double[::1] b = np.empty(n_modes)
    cdef double h = dt, e = eps
    cdef Py_ssize_t steps = n_steps, g = phi_v.shape[0]
    cdef Py_ssize_t s, j
    cdef double kick
    with nogil:
        _tables(om_v, h, c, s_over, ms_om)
        kick = 0.5 * h * e
        for j in range(g):
            pi_v[j] -= kick * phi_v[j] * phi_v[j] * phi_v[j]
        kick = h * e
        for s in range(steps):
            _analyze(ana_v, phi_v, a)
            _analyze(ana_v, pi_v, b)
            _rotate(a, b, c, s_over, ms_om)
            _synthesize(synth_v, a, phi_v)
            _synthesize(synth_v, b, pi_v)
            if s == steps - 1:
                kick = 0.5 * h * e
            for j in range(g):
                pi_v[j] -= kick * phi_v[j] * phi_v[j] * phi_v[j]
    return np.asarray(phi_v).copy(), np.asarray(pi_v).copy()


def polaron_evolve(phi, pi, psi, psi_t, n_steps, dt, eps, g, synth, ana,
                   omega_field, omega_dimer):
    cdef double[::1] phi_v = np.array(phi, dtype=float)
    cdef double[::1] pi_v = np.array(pi, dtype=float)
    cdef double complex[::1] psi_v = np.array(psi, dtype=complex)
    cdef double complex[::1] psit_v = np.array(psi_t, dtype=complex)
    if n_steps <= 0:
        return (np.asarray(phi_v).copy(), np.asarray(pi_v).copy(),
                np.asarray(psi_v).copy(), np.asarray(psit_v).copy())
    cdef double[:, ::1] synth_v = np.ascontiguousarray(synth, dtype=float)
    cdef double[:, ::1] ana_v = np.ascontiguousarray(ana, dtype=float)
    cdef double[::1] omf = np.ascontiguousarray(omega_field, dtype=float)
    cdef double[::1] omd = np.ascontiguousarray(omega_dimer, dtype=float)
    cdef Py_ssize_t n_modes = omf.shape[0]
    cdef double[::1] cf = np.empty(n_modes), sf = np.empty(n_modes), mf = np.empty(n_modes)
    cdef double[::1] cd = np.empty(n_modes), sd = np.empty(n_modes), md = np.empty(n_modes)
    cdef double[::1] a = np.empty(n_modes), b = np.empty(n_modes)
    cdef double[::1] ui = np.empty(n_modes), vi = np.empty(n_modes)
    cdef double[::1] wr = np.empty(phi_v.shape[0]), wi = np.empty(phi_v.shape[0])
    cdef double h = dt, e = eps, gc = g
    cdef Py_ssize_t steps = n_steps, ng = phi_v.shape[0]
    cdef Py_ssize_t s, j
    cdef double kick, p2, amp2
    with nogil:
        _tables(omf, h, cf, sf, mf)
        _tables(omd, h, cd, sd, md)
        kick = 0.5 * h
        for s in range(steps + 1):
            for j in range(ng):
                amp2 = psi_v[j].real * psi_v[j].real + psi_v[j].imag * psi_v[j].imag
                p2 = phi_v[j] * phi_v[j]
                pi_v[j] -= kick * (e * p2 * phi_v[j] + 2.0 * gc * amp2 * phi_v[j])
                psit_v[j] = psit_v[j] - (kick / gc) * p2 * psi_v[j]
            if s == steps:
                break
            kick = h if s < steps - 1 else 0.5 * h
            _analyze(ana_v, phi_v, a)
            _analyze(ana_v, pi_v, b)
            _rotate(a, b, cf, sf, mf)
            _synthesize(synth_v, a, phi_v)
            _synthesize(synth_v, b, pi_v)
            for j in range(ng):
                wr[j] = psi_v[j].real
                wi[j] = psi_v[j].imag
            _analyze(ana_v, wr, a)
            _analyze(ana_v, wi, ui)
            for j in range(ng):
                wr[j] = psit_v[j].real
                wi[j] = psit_v[j].imag
            _analyze(ana_v, wr, b)
            _analyze(ana_v, wi, vi)
            _rotate(a, b, cd, sd, md)
            _rotate(ui, vi, cd, sd, md)
            _synthesize(synth_v, a, wr)
            _synthesize(synth_v, ui, wi)
            for j in range(ng):
                psi_v[j] = wr[j] + 1j * wi[j]
            _synthesize(synth_v, b, wr)
            _synthesize(synth_v, vi, wi)
            for j in range(ng):
                psit_v[j] = wr[j] + 1j * wi[j]
    return (np.asarray(phi_v).copy(), np.asarray(pi_v).copy(),
            np.asarray(psi_v).copy(), np.asarray(psit_v).copy())


cdef int _landen_chain(double k, double* mus) noexcept nogil:
    cdef int n = 0
    cdef double kp
    while k >= 1e-10 and n < 40:
        kp = sqrt((1.0 - k) * (1.0 + k))
        k = (1.0 - kp) / (1.0 + kp)
        mus[n] = k
        n += 1
    return n


def jacobi_cn_sn_dn(u, k):
    """Batched Jacobi (cn, sn, dn) by descending Landen; matches pure kernel."""
    u_arr = np.asarray(u, dtype=float)
    shape = u_arr.shape
    cdef double[::1] uv = np.ascontiguousarray(u_arr.ravel())
    cdef Py_ssize_t n = uv.shape[0], i
    cdef int depth, d
    cdef double mus[40]
    cdef double kk = k, scale = 1.0, base_k
    cdef double v, snv, cnv, dnv, mu, den
    cn_out = np.empty(n)
    sn_out = np.empty(n)
    dn_out = np.empty(n)
    cdef double[::1] cn_v = cn_out, sn_v = sn_out, dn_v = dn_out
    with nogil:
        depth = _landen_chain(kk, mus)
        base_k = kk if depth == 0 else mus[depth - 1]
        for d in range(depth):
            scale *= 1.0 + mus[d]
        for i in range(n):
            v = uv[i] / scale
            snv = sin(v)
            cnv = cos(v)
            dnv = 1.0 - 0.5 * base_k * base_k * snv * snv
            for d in range(depth - 1, -1, -1):
                mu = mus[d]
                den = 1.0 + mu * snv * snv
                cnv, snv, dnv = cnv * dnv / den, (1.0 + mu) * snv / den, (1.0 - mu * snv * snv) / den
            cn_v[i] = cnv
            sn_v[i] = snv
            dn_v[i] = dnv
    if shape == ():
        return float(cn_out[0]), float(sn_out[0]), float(dn_out[0])
    return cn_out.reshape(shape), sn_out.reshape(shape), dn_out.reshape(shape)
