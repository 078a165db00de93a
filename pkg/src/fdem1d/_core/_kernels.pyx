# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled layered-earth kernels: Wait's admittance back-recursion, the
reflection factor and its exact conductivity/permeability derivatives,
vectorized over quadrature nodes.

Semantics mirror ``kernels_np`` (the active backend is chosen at import
time); tests compare both backends node-for-node.
"""

import numpy as np

from libc.math cimport M_PI

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double complex ctanh(double complex)

cdef double TANH_SATURATION = 50.0
cdef double MU0 = 4.0e-7 * M_PI


cdef inline double complex tanh_sat(double complex z) noexcept nogil:
    if z.real > TANH_SATURATION:
        return 1.0
    return ctanh(z)

cdef inline double complex prop_u(double lam, double sig, double mu,
                                  double complex iw) noexcept nogil:
    # exactly lam for sigma = 0 (keeps free-space reflection exactly zero)
    if sig == 0.0:
        return lam
    return csqrt(lam * lam + iw * sig * mu)



def surface_admittance(lam, sigma, mu, d, double omega):
    """Admittance Y_1 at the ground surface for every node in lam."""
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    sigma = np.ascontiguousarray(sigma, dtype=np.float64)
    mu = np.ascontiguousarray(mu, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    cdef double[::1] lam_v = lam, sig_v = sigma, mu_v = mu
    cdef double[::1] d_v = d if d.size else np.empty(0)
    cdef Py_ssize_t L = lam_v.shape[0]
    cdef Py_ssize_t n = sig_v.shape[0]
    out = np.empty(L, dtype=complex)
    cdef double complex[::1] Y = out
    cdef Py_ssize_t s, k
    cdef double complex u, N, t, y, A, B, iw = 1j * omega
    with nogil:
        for s in range(L):
            u = prop_u(lam_v[s], sig_v[n - 1], mu_v[n - 1], iw)
            y = u / (iw * mu_v[n - 1])
            for k in range(n - 2, -1, -1):
                u = prop_u(lam_v[s], sig_v[k], mu_v[k], iw)
                N = u / (iw * mu_v[k])
                t = tanh_sat(u * d_v[k])
                A = y + N * t
                B = N + y * t
                # exact fixed point when the layer matches what lies below
                y = N if A == B else N * A / B
            Y[s] = y
    return out


def reflection(lam, sigma, mu, d, double omega):
    """Reflection factor R(lam) = (N0 - Y1)/(N0 + Y1)."""
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    Yarr = surface_admittance(lam, sigma, mu, d, omega)
    cdef double[::1] lam_v = lam
    cdef double complex[::1] Yv = Yarr
    cdef Py_ssize_t L = lam_v.shape[0]
    out = np.empty(L, dtype=complex)
    cdef double complex[::1] R = out
    cdef Py_ssize_t s
    cdef double complex N0
    with nogil:
        for s in range(L):
            N0 = lam_v[s] / (1j * omega * MU0)
            R[s] = (N0 - Yv[s]) / (N0 + Yv[s])
    return out


def reflection_gradients(lam, sigma, mu, d, double omega):
    """Reflection factor and its exact derivatives with respect to every
    layer's conductivity and absolute permeability; derivative arrays
    have shape (n_layers, len(lam))."""
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    sigma = np.ascontiguousarray(sigma, dtype=np.float64)
    mu = np.ascontiguousarray(mu, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    cdef double[::1] lam_v = lam, sig_v = sigma, mu_v = mu
    cdef double[::1] d_v = d if d.size else np.empty(0)
    cdef Py_ssize_t L = lam_v.shape[0]
    cdef Py_ssize_t n = sig_v.shape[0]

    R_arr = np.empty(L, dtype=complex)
    ds_arr = np.empty((n, L), dtype=complex)
    dm_arr = np.empty((n, L), dtype=complex)
    loc_prev = np.empty(n, dtype=complex)
    loc_sig = np.empty(n, dtype=complex)
    loc_mu = np.empty(n, dtype=complex)
    cdef double complex[::1] R = R_arr
    cdef double complex[:, ::1] dRs = ds_arr
    cdef double complex[:, ::1] dRm = dm_arr
    cdef double complex[::1] dY_dprev = loc_prev
    cdef double complex[::1] dY_dsig = loc_sig
    cdef double complex[::1] dY_dmu = loc_mu

    cdef Py_ssize_t s, k
    cdef double complex iw = 1j * omega
    cdef double complex u, N, t, z, A, B, Ynew, Y
    cdef double complex one_minus_t2, dstep_dN, dstep_dt
    cdef double complex du_dsig, du_dmu, dN_du, dN_dmu, dt_du
    cdef double complex chain, N0, dR_dY1

    for s in range(L):
        u = prop_u(lam_v[s], sig_v[n - 1], mu_v[n - 1], iw)
        Y = u / (iw * mu_v[n - 1])
        dN_du = 1.0 / (iw * mu_v[n - 1])
        du_dsig = iw * mu_v[n - 1] / (2.0 * u) if u != 0 else 0.0
        du_dmu = iw * sig_v[n - 1] / (2.0 * u) if u != 0 else 0.0
        dY_dprev[n - 1] = 0.0
        dY_dsig[n - 1] = dN_du * du_dsig
        dY_dmu[n - 1] = dN_du * du_dmu - u / (iw * mu_v[n - 1] * mu_v[n - 1])

        for k in range(n - 2, -1, -1):
            u = prop_u(lam_v[s], sig_v[k], mu_v[k], iw)
            N = u / (iw * mu_v[k])
            z = u * d_v[k]
            t = tanh_sat(z)
            one_minus_t2 = 0.0 if z.real > TANH_SATURATION else 1.0 - t * t
            A = Y + N * t
            B = N + Y * t
            Ynew = N * A / B

            dY_dprev[k] = N * N * one_minus_t2 / (B * B)
            dstep_dN = A / B + N * (t * B - A) / (B * B)
            dstep_dt = N * (N * B - A * Y) / (B * B)

            du_dsig = iw * mu_v[k] / (2.0 * u) if u != 0 else 0.0
            du_dmu = iw * sig_v[k] / (2.0 * u) if u != 0 else 0.0
            dN_du = 1.0 / (iw * mu_v[k])
            dN_dmu = -u / (iw * mu_v[k] * mu_v[k])
            dt_du = d_v[k] * one_minus_t2

            dY_dsig[k] = (dstep_dN * dN_du + dstep_dt * dt_du) * du_dsig
            dY_dmu[k] = (dstep_dN * (dN_du * du_dmu + dN_dmu)
                         + dstep_dt * dt_du * du_dmu)
            Y = Ynew

        chain = 1.0
        for k in range(n):
            dRs[k, s] = chain * dY_dsig[k]
            dRm[k, s] = chain * dY_dmu[k]
            chain = chain * dY_dprev[k]

        N0 = lam_v[s] / (1j * omega * MU0)
        dR_dY1 = -2.0 * N0 / ((N0 + Y) * (N0 + Y))
        R[s] = (N0 - Y) / (N0 + Y)
        for k in range(n):
            dRs[k, s] = dR_dY1 * dRs[k, s]
            dRm[k, s] = dR_dY1 * dRm[k, s]

    return R_arr, ds_arr, dm_arr
