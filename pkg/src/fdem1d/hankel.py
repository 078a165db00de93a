"""Hankel transforms of orders 0 and 1 by digital filtering.

The integral  int_0^inf K(lambda) J_nu(rho*lambda) dlambda  is evaluated
as a weighted sum over fixed log-spaced abscissae,

    (1/rho) * sum_s w_s K(base_s / rho),

with the filter coefficients shipped as versioned data assets (see
``tools/design_hankel_filter.py`` for how they were produced and
validated).  Filters are immutable; ``transform`` is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

FILTER_VERSION = "1"
FILTER_POINTS = 301


class QuadratureError(ValueError):
    """A kernel returned a non-finite value on a quadrature node."""


@dataclass(frozen=True)
class HankelFilter:
    order: int
    spacing: float   # log10 step between nodes
    shift: float     # log10 of the first node
    weights: np.ndarray

    @property
    def base(self) -> np.ndarray:
        s = np.arange(len(self.weights))
        return 10.0 ** (self.shift + s * self.spacing)


def _parse_asset(text: str, order: int) -> HankelFilter:
    """Asset lines hold 'log10(node) weight' pairs; nodes must be on a
    uniform log grid."""
    exponents, weights = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError("malformed Hankel filter asset line")
        exponents.append(float(parts[0]))
        weights.append(float(parts[1]))
    if len(weights) < 2:
        raise ValueError("malformed Hankel filter asset")
    steps = np.diff(exponents)
    spacing = float(steps[0])
    if not np.allclose(steps, spacing, rtol=0, atol=1e-12):
        raise ValueError("Hankel filter nodes must be log-uniform")
    w = np.array(weights)
    w.setflags(write=False)
    return HankelFilter(order=order, spacing=spacing,
                        shift=float(exponents[0]), weights=w)


def _load(order: int) -> HankelFilter:
    name = f"hankel_j{order}_{FILTER_POINTS}_v{FILTER_VERSION}.txt"
    text = resources.files("fdem1d.data").joinpath(name).read_text()
    return _parse_asset(text, order)


_FILTERS = {0: _load(0), 1: _load(1)}


def get_filter(order: int) -> HankelFilter:
    if order not in _FILTERS:
        raise ValueError("only Hankel orders 0 and 1 are supported")
    return _FILTERS[order]


def transform(kernel, order: int, rho: float) -> complex:
    """Evaluate int_0^inf kernel(lambda) J_order(rho*lambda) dlambda.

    ``kernel`` must accept a 1-D array of nodes and return the sampled
    values (real or complex).  Raises QuadratureError if any sample is
    not finite, reporting the offending node.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    filt = get_filter(order)
    lam = filt.base / rho
    vals = np.asarray(kernel(lam))
    if vals.shape != lam.shape:
        raise QuadratureError("kernel must return one value per node")
    bad = ~np.isfinite(vals)
    if bad.any():
        node = lam[np.argmax(bad)]
        raise QuadratureError(
            f"kernel returned a non-finite value at lambda={node:.6e}")
    return complex(np.dot(filt.weights, vals) / rho)


def transform_weights(order: int, rho: float):
    """Nodes and effective weights for a fixed rho: the transform is then
    dot(weights, kernel(nodes)).  Used to amortize kernel evaluation when
    many transforms share the same nodes."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    filt = get_filter(order)
    return filt.base / rho, filt.weights / rho
