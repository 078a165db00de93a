"""Lumped-circuit picture of electromagnetic induction.

Covers the quasi-static wavenumber of a lossy medium, the RL equivalent
circuit of an eddy-current loop (impedance, phase lag, current phasor)
and the coupled transmitter-target-receiver response with its in-phase
and quadrature decomposition.  All functions are pure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .constants import EPS0, MU0


@dataclass(frozen=True)
class LoopCircuit:
    """Eddy-current loop as a lumped RL circuit driven at omega."""

    resistance: float   # ohm
    inductance: float   # henry
    omega: float        # rad/s

    def __post_init__(self):
        if self.resistance < 0 or self.inductance <= 0 or self.omega <= 0:
            raise ValueError("require R >= 0, L > 0, omega > 0")

    @property
    def beta(self) -> float:
        """Response parameter omega*L/R (infinite for R = 0)."""
        if self.resistance == 0:
            return math.inf
        return self.omega * self.inductance / self.resistance


@dataclass(frozen=True)
class CouplingChain:
    """Mutual inductances of the transmitter-target-receiver chain.

    The denominator inductance is the direct transmitter-receiver
    coupling; it is stored as ``m_direct`` without committing to either
    of the two labels it carries in the literature.
    """

    m_tx_target: float
    m_target_rx: float
    m_direct: float
    target_inductance: float

    def __post_init__(self):
        vals = (self.m_tx_target, self.m_target_rx, self.m_direct,
                self.target_inductance)
        if any(v <= 0 for v in vals):
            raise ValueError("all inductances must be positive")

    @property
    def coupling_coefficient(self) -> float:
        return -(self.m_tx_target * self.m_target_rx) / (
            self.m_direct * self.target_inductance)


@dataclass(frozen=True)
class WavenumberParams:
    sigma: float    # S/m
    mu: float       # H/m
    epsilon: float  # F/m
    omega: float    # rad/s

    def __post_init__(self):
        if min(self.sigma, self.mu, self.epsilon) < 0 or self.omega <= 0:
            raise ValueError("require non-negative media and omega > 0")


def wavenumber_full(p: WavenumberParams) -> complex:
    """Complex wavenumber k = a + ib of a lossy medium,

        a = omega*sqrt(mu*eps/2*(sqrt(1+(sigma/(omega*eps))^2) + 1))
        b = omega*sqrt(mu*eps/2*(sqrt(1+(sigma/(omega*eps))^2) - 1))

    1/b is the skin depth; sigma >> omega*eps recovers sqrt(i*omega*mu*sigma).
    """
    loss = p.sigma / (p.omega * p.epsilon) if p.epsilon > 0 else math.inf
    if math.isinf(loss):
        # purely conductive limit
        k = cmath.sqrt(1j * p.omega * p.mu * p.sigma)
        return k
    root = math.sqrt(1.0 + loss * loss)
    me2 = p.mu * p.epsilon / 2.0
    a = p.omega * math.sqrt(me2 * (root + 1.0))
    b = p.omega * math.sqrt(max(me2 * (root - 1.0), 0.0))
    return complex(a, b)


def quasistatic_wavenumber(sigma: float, mu: float, omega: float) -> complex:
    """k = sqrt(i*omega*mu*sigma) = (1+i)/delta."""
    return cmath.sqrt(1j * omega * mu * sigma)


def wavenumber_from_relative(sigma: float, mu_r: float = 1.0,
                             eps_r: float = 1.0,
                             omega: float = 1.0) -> complex:
    return wavenumber_full(
        WavenumberParams(sigma, mu_r * MU0, eps_r * EPS0, omega))


def impedance(c: LoopCircuit) -> complex:
    """Z = R + i*omega*L."""
    return complex(c.resistance, c.omega * c.inductance)


def phase_lag(c: LoopCircuit) -> float:
    """Extra phase alpha = arctan(omega*L/R) by which the eddy current
    lags the driving voltage; pi/2 in the inductive limit R = 0."""
    if c.resistance == 0:
        return math.pi / 2.0
    return math.atan(c.omega * c.inductance / c.resistance)


def eddy_current_phasor(c: LoopCircuit, voltage_amplitude: float) -> complex:
    """Eddy-current phasor relative to the primary current: the driving
    voltage lags the primary by pi/2 and the current lags the voltage by
    phase_lag(c), with amplitude E0/|Z|."""
    amp = voltage_amplitude / abs(impedance(c))
    return amp * cmath.exp(-1j * (math.pi / 2.0 + phase_lag(c)))


def response_function(beta: float) -> complex:
    """G(beta) = i*beta/(1+i*beta): 0 in the resistive limit, 1 in the
    inductive limit, Im part peaking at 1/2 for beta = 1."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if math.isinf(beta):
        return 1.0 + 0.0j
    b2 = beta * beta
    return complex(b2 / (1.0 + b2), beta / (1.0 + b2))


def coupled_response(chain: CouplingChain, c: LoopCircuit) -> complex:
    """Device reading for a coupled loop target: kappa * G(beta)."""
    return chain.coupling_coefficient * response_function(c.beta)
