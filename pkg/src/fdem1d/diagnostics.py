"""Survey-design diagnostics: skin depth, induction number, sensitivity
profiles, cumulative response and depth of investigation (DOI).

Layered skin depth comes from the recursive response function

    C_n = 1/k_n,   k_j = sqrt(i*omega*mu_j*sigma_j)
    C_j = (1/k_j) (k_j C_{j+1} + tanh(k_j d_j))
                / (1 + k_j C_{j+1} tanh(k_j d_j))
    delta = sqrt(2) * |C_1|

whose homogeneous limit reproduces delta = sqrt(2/(omega*mu*sigma)).

Sensitivities are exact derivatives of the loop-loop response with
respect to the conductivity/permeability of thin uniform cells the model
is resampled onto; a central finite-difference estimator of the same
quantities serves as an independent cross-check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import hankel
from ._core import kernels
from .constants import MU0
from .earthmodel import GeometryElement, LayeredEarth
from .forward import _ORIENTATION_RULES, _model_arrays, response_element

# Depth of investigation: cumulative |S| of this component reaches DOI_TAU.
# The threshold is a calibration constant, fitted once against a reference
# multi-coil sounding and then frozen; see tools/calibrate_doi_tau.py.
DOI_TAU = 0.8938
DOI_COMPONENT = "q_sigma"

# Finite-difference steps: relative with absolute floors.
FD_REL_STEP = 1e-6
FD_ABS_SIGMA = 1e-9
FD_ABS_MU = 1e-9 * MU0


class DiagnosticsError(ValueError):
    """Raised when a diagnostic is undefined for the given model."""


@dataclass(frozen=True)
class DepthGrid:
    """Uniform fine grid of thin cells used for sensitivity and DOI."""

    dz: float = 0.1
    z_max: float = 15.0

    def __post_init__(self):
        if self.dz <= 0 or self.z_max <= self.dz:
            raise ValueError("require dz > 0 and z_max > dz")

    @property
    def n_cells(self) -> int:
        return int(round(self.z_max / self.dz))

    @property
    def tops(self) -> np.ndarray:
        return np.arange(self.n_cells) * self.dz

    @property
    def bottoms(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 1) * self.dz

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dz


@dataclass(frozen=True)
class SensitivityProfile:
    """Per-cell response derivatives for one measurement configuration.

    s_sigma is d(response)/d(sigma of cell) in 1/(S/m); s_mu is taken
    with respect to the absolute permeability, in 1/(H/m).  The basement
    entries hold the derivative with respect to the half-space below the
    grid; they let the cumulative curve be normalized against the whole
    subsurface rather than just the gridded part.
    """

    depths: np.ndarray           # cell top edges, starting at 0
    dz: float
    s_sigma: np.ndarray          # complex, one per cell
    s_mu: np.ndarray             # complex, one per cell
    element: GeometryElement
    s_sigma_basement: complex = 0.0
    s_mu_basement: complex = 0.0


@dataclass(frozen=True)
class DoiEstimate:
    doi: float                   # m (nan when the threshold is not reached)
    tau: float
    depths: np.ndarray           # cell bottom edges
    cumulative: np.ndarray       # normalized cumulative sensitivity
    reached: bool
    element: GeometryElement = field(default=None)

    @property
    def max_cumulative(self) -> float:
        return float(self.cumulative[-1])


def skin_depth_homogeneous(sigma: float, mu: float, omega: float) -> float:
    """delta = sqrt(2/(omega*mu*sigma)); infinite for sigma = 0."""
    if sigma < 0 or mu <= 0 or omega <= 0:
        raise ValueError("require sigma >= 0, mu > 0, omega > 0")
    if sigma == 0:
        return math.inf
    return math.sqrt(2.0 / (omega * mu * sigma))


def c_response(model: LayeredEarth, omega: float) -> complex:
    """Recursive EM-response function C_1 of the layer stack."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if any(s <= 0 for s in model.sigma):
        raise DiagnosticsError(
            "layered skin depth requires positive conductivity in "
            "every layer")
    sigma, mu, d = _model_arrays(model)
    k = np.sqrt(1j * omega * mu * sigma)
    c = 1.0 / k[-1]
    for j in range(len(sigma) - 2, -1, -1):
        z = k[j] * d[j]
        t = 1.0 if z.real > 50.0 else cmath.tanh(z)
        c = (1.0 / k[j]) * (k[j] * c + t) / (1.0 + k[j] * c * t)
    return complex(c)


def skin_depth_layered(model: LayeredEarth, omega: float) -> float:
    """delta = sqrt(2)*|C_1|; equals the homogeneous formula for n = 1."""
    return math.sqrt(2.0) * abs(c_response(model, omega))


def induction_number(length: float, delta: float) -> float:
    """beta = l/delta for a system length scale l (coil spacing or
    height)."""
    if delta <= 0:
        raise ValueError("skin depth must be positive")
    return length / delta


def discretize(model: LayeredEarth, grid: DepthGrid) -> LayeredEarth:
    """Resample a layered model onto the fine grid (cell property taken
    at the cell center) plus the basement half-space below z_max."""
    tops = model.depths
    sigma, mu_r = [], []
    for zc in grid.centers:
        k = 0
        for i, zt in enumerate(tops):
            if zc >= zt:
                k = i
        sigma.append(model.sigma[k])
        mu_r.append(model.mu_r[k])
    # basement: properties at z_max and below
    k = 0
    for i, zt in enumerate(tops):
        if grid.z_max >= zt:
            k = i
    sigma.append(model.sigma[k])
    mu_r.append(model.mu_r[k])
    thick = [grid.dz] * grid.n_cells
    return LayeredEarth(sigma, mu_r, thick)


def sensitivity_analytic(model: LayeredEarth, element: GeometryElement,
                         grid: DepthGrid = DepthGrid()) -> SensitivityProfile:
    """Exact per-cell derivatives of the response, obtained by chain-rule
    differentiation of the admittance recursion under the Hankel
    integral."""
    fine = discretize(model, grid)
    sigma, mu, d = _model_arrays(fine)
    order, rho_pow, lam_pow = _ORIENTATION_RULES[element.orientation]
    omega = 2 * math.pi * element.frequency
    rho, h = element.spacing, element.height
    nodes, wts = hankel.transform_weights(order, rho)
    _, dr_ds, dr_dm = kernels.reflection_gradients(nodes, sigma, mu, d, omega)
    factor = -(rho**rho_pow) * wts * np.exp(-2.0 * nodes * h) * nodes**lam_pow
    s_sigma = dr_ds @ factor
    s_mu = dr_dm @ factor
    return SensitivityProfile(grid.tops, grid.dz, s_sigma[:-1], s_mu[:-1],
                              element, complex(s_sigma[-1]),
                              complex(s_mu[-1]))


def sensitivity_fd(model: LayeredEarth, element: GeometryElement,
                   grid: DepthGrid = DepthGrid(),
                   rel_step: float = FD_REL_STEP) -> SensitivityProfile:
    """Central finite-difference estimate of the same per-cell
    sensitivities; independent of the analytic path."""
    if rel_step <= 0:
        raise ValueError("rel_step must be positive")
    fine = discretize(model, grid)
    n = grid.n_cells
    s_sigma = np.empty(n, dtype=complex)
    s_mu = np.empty(n, dtype=complex)
    sig0 = list(fine.sigma)
    mur0 = list(fine.mu_r)
    for k in range(n):
        hs = max(rel_step * abs(sig0[k]), FD_ABS_SIGMA)
        up, dn = list(sig0), list(sig0)
        up[k] += hs
        dn[k] = max(dn[k] - hs, 0.0)
        span = up[k] - dn[k]
        mp = response_element(fine.with_sigma(up), element).m_value
        mm = response_element(fine.with_sigma(dn), element).m_value
        s_sigma[k] = (mp - mm) / span

        hm_abs = max(rel_step * abs(mur0[k] * MU0), FD_ABS_MU)
        hm = hm_abs / MU0
        up, dn = list(mur0), list(mur0)
        up[k] += hm
        dn[k] -= hm
        mp = response_element(fine.with_mu_r(up), element).m_value
        mm = response_element(fine.with_mu_r(dn), element).m_value
        s_mu[k] = (mp - mm) / (2.0 * hm_abs)
    return SensitivityProfile(grid.tops, grid.dz, s_sigma, s_mu, element)


def _component_values(profile: SensitivityProfile, component: str):
    base, _, quantity = component.partition("_")
    if quantity == "mu":
        s, tail = profile.s_mu, profile.s_mu_basement
    else:
        s, tail = profile.s_sigma, profile.s_sigma_basement
    if base == "q":
        return np.abs(s.imag), abs(tail.imag)
    if base == "p":
        return np.abs(s.real), abs(tail.real)
    if base == "abs":
        return np.abs(s), abs(tail)
    raise ValueError(f"unknown sensitivity component {component!r}")


def cumulative_response(profile: SensitivityProfile,
                        component: str = DOI_COMPONENT,
                        include_basement: bool = False):
    """Normalized running sum of the per-cell |S| over depth: the
    fraction of the total sensitivity lying above each cell bottom.

    With include_basement the normalization also counts the half-space
    below the grid, so the curve tops out below 1 on a shallow grid
    (that is what makes an unreachable threshold detectable) and the
    crossing depths become independent of the grid extent.
    """
    vals, tail = _component_values(profile, component)
    total = vals.sum() + (tail if include_basement else 0.0)
    if total == 0:
        raise DiagnosticsError("sensitivity profile is identically zero")
    cum = np.cumsum(vals) / total
    depths = profile.depths + profile.dz
    return depths, cum


def depth_of_investigation(model: LayeredEarth, element: GeometryElement,
                           tau: float = DOI_TAU,
                           grid: DepthGrid = DepthGrid(),
                           component: str = DOI_COMPONENT) -> DoiEstimate:
    """First grid depth at which the cumulative sensitivity (normalized
    against the whole subsurface) reaches tau."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    profile = sensitivity_analytic(model, element, grid)
    depths, cum = cumulative_response(profile, component,
                                      include_basement=True)
    idx = np.searchsorted(cum, tau)
    if idx >= len(cum):
        return DoiEstimate(math.nan, tau, depths, cum, False, element)
    return DoiEstimate(float(depths[idx]), tau, depths, cum, True, element)
