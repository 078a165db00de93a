"""NumPy implementation of the hot layered-earth kernels.

Evaluates, vectorized over the quadrature nodes ``lam``:

* the surface admittance of the layer stack (Wait's back-recursion),
* the reflection factor R(lam) = (N0 - Y1)/(N0 + Y1),
* the exact partial derivatives of R with respect to every layer's
  conductivity and (absolute) permeability, propagated through the
  recursion by the chain rule.

A compiled twin with identical semantics lives in ``_kernels.pyx``; the
active backend is chosen at import time in ``fdem1d._core``.
"""

import numpy as np

from ..constants import MU0

# tanh(z) is replaced by 1 once Re(z) exceeds this; the error is below
# 2*exp(-100) and the replacement also zeroes the derivative cleanly.
TANH_SATURATION = 50.0


def _tanh(z):
    t = np.ones_like(z)
    live = z.real <= TANH_SATURATION
    t[live] = np.tanh(z[live])
    return t


def _prop(lam, sigma_k, mu_k, iw):
    """u_k = sqrt(lam^2 + i*omega*sigma_k*mu_k); exactly lam when the
    layer has no induction term (keeps the free-space reflection exactly
    zero instead of rounding-noise sized)."""
    if sigma_k == 0.0:
        return lam.astype(complex)
    return np.sqrt(lam * lam + iw * sigma_k * mu_k)


def surface_admittance(lam, sigma, mu, d, omega):
    """Admittance Y_1 seen at the ground surface, per node.

    lam    quadrature nodes, 1-D float array, all > 0
    sigma  conductivity per layer, S/m
    mu     absolute permeability per layer, H/m
    d      thicknesses, m (len(sigma) - 1 entries)
    omega  angular frequency, rad/s
    """
    lam = np.asarray(lam, dtype=float)
    n = len(sigma)
    iw = 1j * omega
    u = _prop(lam, sigma[n - 1], mu[n - 1], iw)
    Y = u / (iw * mu[n - 1])
    for k in range(n - 2, -1, -1):
        u = _prop(lam, sigma[k], mu[k], iw)
        N = u / (iw * mu[k])
        t = _tanh(u * d[k])
        A = Y + N * t
        B = N + Y * t
        # A == B exactly when the layer matches what lies below; keep the
        # fixed point exact so zero-contrast models reflect nothing
        Y = np.where(A == B, N, N * A / B)
    return Y


def reflection(lam, sigma, mu, d, omega):
    """Reflection factor R(lam) of the layer stack against free space."""
    lam = np.asarray(lam, dtype=float)
    Y1 = surface_admittance(lam, sigma, mu, d, omega)
    N0 = lam / (1j * omega * MU0)
    return (N0 - Y1) / (N0 + Y1)


def reflection_gradients(lam, sigma, mu, d, omega):
    """Reflection factor and its exact parameter derivatives.

    Returns (R, dR_dsigma, dR_dmu) where the derivative arrays have shape
    (n_layers, len(lam)) and dR_dmu is taken with respect to the absolute
    permeability in H/m.
    """
    lam = np.asarray(lam, dtype=float)
    n = len(sigma)
    L = lam.shape[0]
    iw = 1j * omega

    u_all = np.empty((n, L), dtype=complex)
    N_all = np.empty((n, L), dtype=complex)
    for k in range(n):
        u_all[k] = _prop(lam, sigma[k], mu[k], iw)
        N_all[k] = u_all[k] / (iw * mu[k])

    # Backward sweep: Y_k plus the local partials of the recursion step.
    dY_dprev = np.empty((n, L), dtype=complex)   # dY_k/dY_{k+1}
    dY_dsig = np.empty((n, L), dtype=complex)    # direct dY_k/dsigma_k
    dY_dmu = np.empty((n, L), dtype=complex)     # direct dY_k/dmu_k

    u = u_all[n - 1]
    du_dsig = np.where(u != 0, iw * mu[n - 1] / (2 * u), 0.0)
    du_dmu = np.where(u != 0, iw * sigma[n - 1] / (2 * u), 0.0)
    dN_du = 1.0 / (iw * mu[n - 1])
    Y = N_all[n - 1]
    dY_dprev[n - 1] = 0.0
    dY_dsig[n - 1] = dN_du * du_dsig
    dY_dmu[n - 1] = dN_du * du_dmu - u / (iw * mu[n - 1] ** 2)

    for k in range(n - 2, -1, -1):
        u = u_all[k]
        N = N_all[k]
        z = u * d[k]
        t = _tanh(z)
        live = z.real <= TANH_SATURATION
        A = Y + N * t
        B = N + Y * t
        Ynew = N * A / B

        one_minus_t2 = np.where(live, 1.0 - t * t, 0.0)
        dY_dprev[k] = N * N * one_minus_t2 / (B * B)
        dstep_dN = A / B + N * (t * B - A) / (B * B)
        dstep_dt = N * (N * B - A * Y) / (B * B)

        du_dsig = np.where(u != 0, iw * mu[k] / (2 * u), 0.0)
        du_dmu = np.where(u != 0, iw * sigma[k] / (2 * u), 0.0)
        dN_du = 1.0 / (iw * mu[k])
        dN_dmu = -u / (iw * mu[k] ** 2)
        dt_du = d[k] * one_minus_t2

        dY_dsig[k] = (dstep_dN * dN_du + dstep_dt * dt_du) * du_dsig
        dY_dmu[k] = (dstep_dN * (dN_du * du_dmu + dN_dmu)
                     + dstep_dt * dt_du * du_dmu)
        Y = Ynew

    # Forward accumulation of the chain dY_1/dY_k.
    chain = np.ones(L, dtype=complex)
    dY1_dsig = np.empty((n, L), dtype=complex)
    dY1_dmu = np.empty((n, L), dtype=complex)
    for k in range(n):
        dY1_dsig[k] = chain * dY_dsig[k]
        dY1_dmu[k] = chain * dY_dmu[k]
        chain = chain * dY_dprev[k]

    N0 = lam / (1j * omega * MU0)
    denom = (N0 + Y) ** 2
    dR_dY1 = -2.0 * N0 / denom
    R = (N0 - Y) / (N0 + Y)
    return R, dR_dY1 * dY1_dsig, dR_dY1 * dY1_dmu
