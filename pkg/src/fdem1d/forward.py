"""Nonlinear forward model for loop-loop induction devices.

The response of a layered half-space is the ratio M = Hs/Hp of the
secondary to the primary magnetic field,

    HCP :  -rho^3 * int_0^inf e^(-2*lam*h) lam^2 R(lam) J0(rho*lam) dlam
    VCP :  -rho^2 * int_0^inf e^(-2*lam*h) lam   R(lam) J1(rho*lam) dlam
    PERP:  -rho^2 * int_0^inf e^(-2*lam*h) lam^2 R(lam) J1(rho*lam) dlam

with the reflection factor R built from Wait's admittance recursion.
The quadrature runs over the digital filters of :mod:`fdem1d.hankel`;
the layer recursion is evaluated by the compiled core when available.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import hankel
from ._core import kernels
from .constants import MU0
from .earthmodel import (GeometryElement, LayeredEarth, MeasurementGeometry,
                         ResponseSet)

# (Bessel order, rho power, lambda power) per coil orientation
_ORIENTATION_RULES = {
    "HCP": (0, 3, 2),
    "VCP": (1, 2, 1),
    "PERP": (1, 2, 2),
}


class DeviceScale(NamedTuple):
    """Measurement units of a device: quadrature as apparent conductivity
    in mS/m or as ppm; in-phase as ppt or ppm."""

    q_unit: str = "mS/m"
    p_unit: str = "ppt"


@dataclass(frozen=True)
class ForwardResponse:
    """One complex response with its measurement configuration attached."""

    m_value: complex
    orientation: str
    spacing: float
    frequency: float
    height: float

    @property
    def quadrature(self) -> float:
        return self.m_value.imag

    @property
    def in_phase(self) -> float:
        return self.m_value.real


def _model_arrays(model: LayeredEarth):
    sigma = np.asarray(model.sigma, dtype=float)
    mu = np.asarray(model.mu_r, dtype=float) * MU0
    d = np.asarray(model.thickness, dtype=float)
    return sigma, mu, d


def propagation_constant(model: LayeredEarth, k: int, lam, omega: float):
    """Layer propagation constant u_k = sqrt(lam^2 + i*sigma_k*mu_k*omega),
    principal branch (Re >= 0)."""
    sigma, mu, _ = _model_arrays(model)
    lam = np.asarray(lam, dtype=float)
    return np.sqrt(lam * lam + 1j * sigma[k] * mu[k] * omega)


def intrinsic_admittance(model: LayeredEarth, k: int, lam, omega: float):
    """N_k = u_k / (i*omega*mu_k)."""
    _, mu, _ = _model_arrays(model)
    return propagation_constant(model, k, lam, omega) / (1j * omega * mu[k])


def free_space_admittance(lam, omega: float):
    """N_0 = lam / (i*omega*mu0)."""
    return np.asarray(lam, dtype=float) / (1j * omega * MU0)


def surface_admittance(model: LayeredEarth, lam, omega: float):
    """Admittance at the ground surface via Wait's back-recursion,
    Y_n = N_n and Y_k = N_k (Y_{k+1} + N_k tanh(u_k d_k)) /
    (N_k + Y_{k+1} tanh(u_k d_k))."""
    sigma, mu, d = _model_arrays(model)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = kernels.surface_admittance(lam, sigma, mu, d, omega)
    return out[0] if np.isscalar(lam) or out.shape == (1,) else out


def reflection_factor(model: LayeredEarth, lam, omega: float):
    """R(lam) = (N_0 - Y_1) / (N_0 + Y_1)."""
    sigma, mu, d = _model_arrays(model)
    scalar = np.isscalar(lam) or np.ndim(lam) == 0
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = kernels.reflection(lam, sigma, mu, d, omega)
    return out[0] if scalar else out


def response(model: LayeredEarth, orientation: str, h: float, omega: float,
             rho: float) -> ForwardResponse:
    """Complex response M = Hs/Hp for a single configuration."""
    if orientation not in _ORIENTATION_RULES:
        raise ValueError(f"unknown orientation {orientation!r}")
    if h < 0 or rho <= 0 or omega <= 0:
        raise ValueError("require h >= 0, rho > 0, omega > 0")
    order, rho_pow, lam_pow = _ORIENTATION_RULES[orientation]
    sigma, mu, d = _model_arrays(model)
    nodes, wts = hankel.transform_weights(order, rho)
    refl = kernels.reflection(nodes, sigma, mu, d, omega)
    vals = np.exp(-2.0 * nodes * h) * nodes**lam_pow * refl
    if not np.all(np.isfinite(vals)):
        node = nodes[np.argmax(~np.isfinite(vals))]
        raise hankel.QuadratureError(
            f"non-finite forward kernel at lambda={node:.6e}")
    m = -(rho**rho_pow) * complex(np.dot(wts, vals))
    return ForwardResponse(m, orientation, rho, omega / (2 * np.pi), h)


def response_element(model: LayeredEarth,
                     element: GeometryElement) -> ForwardResponse:
    return response(model, element.orientation, element.height,
                    2 * np.pi * element.frequency, element.spacing)


def response_batch(model: LayeredEarth, geometry) -> ResponseSet:
    """Responses for every element of a geometry (or element sequence),
    in its lexicographic/stated order."""
    if isinstance(geometry, MeasurementGeometry):
        elements = geometry.elements()
        geom = geometry
    else:
        elements = tuple(GeometryElement(*e) for e in geometry)
        geom = None
    values = np.empty(len(elements), dtype=complex)
    for idx, el in enumerate(elements):
        try:
            values[idx] = response_element(model, el).m_value
        except hankel.QuadratureError as exc:
            raise hankel.QuadratureError(
                f"element {idx} {tuple(el)}: {exc}") from exc
    return ResponseSet(values, elements, geom)


def lin_forward(sigma: float, omega: float, rho: float) -> float:
    """Low-induction-number quadrature: omega*mu0*rho^2*sigma/4."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    return omega * MU0 * rho * rho * sigma / 4.0


def apparent_conductivity(q: float, omega: float, rho: float) -> float:
    """Apparent conductivity sigma_a = 4*q/(omega*mu0*rho^2); the exact
    inverse of lin_forward."""
    if rho <= 0 or omega <= 0:
        raise ValueError("require rho > 0 and omega > 0")
    return 4.0 * q / (omega * MU0 * rho * rho)


def to_device_units(r: ForwardResponse, scale: DeviceScale) -> dict:
    """Express a response in the device's measurement units."""
    omega = 2 * np.pi * r.frequency
    if scale.q_unit == "mS/m":
        q = 1000.0 * apparent_conductivity(r.quadrature, omega, r.spacing)
    elif scale.q_unit == "ppm":
        q = 1e6 * r.quadrature
    else:
        raise ValueError(f"unknown quadrature unit {scale.q_unit!r}")
    if scale.p_unit == "ppt":
        p = 1000.0 * r.in_phase
    elif scale.p_unit == "ppm":
        p = 1e6 * r.in_phase
    else:
        raise ValueError(f"unknown in-phase unit {scale.p_unit!r}")
    return {"Q": q, "P": p, "Q_unit": scale.q_unit, "P_unit": scale.p_unit}
