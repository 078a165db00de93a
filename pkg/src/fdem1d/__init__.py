"""Frequency-domain EMI toolkit: forward modelling of loop-loop devices
over a 1-D layered half-space, survey-design diagnostics and regularized
Gauss-Newton / minimal-norm inversion."""

from ._core import BACKEND as KERNEL_BACKEND
from .earthmodel import (GeometryElement, LayeredEarth, MeasurementGeometry,
                         ResponseSet)

__version__ = "0.1.0"

__all__ = [
    "GeometryElement",
    "KERNEL_BACKEND",
    "LayeredEarth",
    "MeasurementGeometry",
    "ResponseSet",
    "__version__",
]
