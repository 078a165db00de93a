"""Layered half-space model, measurement geometry and response containers.

All types are immutable value objects: safe to share between threads and
to use as building blocks for the forward and inversion machinery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

ORIENTATIONS = ("HCP", "VCP", "PERP")


class ModelError(ValueError):
    """Raised for malformed model/geometry files or invariant violations."""


class GeometryElement(NamedTuple):
    """One measurement configuration: coil orientation, spacing (m),
    operating frequency (Hz) and height above ground (m)."""

    orientation: str
    spacing: float
    frequency: float
    height: float


@dataclass(frozen=True)
class LayeredEarth:
    """Stack of homogeneous horizontal layers over an infinite basement.

    sigma      electrical conductivity per layer, S/m
    mu_r       relative magnetic permeability per layer (absolute value is
               mu_r * mu0)
    thickness  layer thicknesses, m; one fewer than the number of layers,
               the last layer is a half-space
    """

    sigma: tuple
    mu_r: tuple
    thickness: tuple

    def __init__(self, sigma: Sequence[float], mu_r: Sequence[float],
                 thickness: Sequence[float] = ()):
        object.__setattr__(self, "sigma", tuple(float(s) for s in sigma))
        object.__setattr__(self, "mu_r", tuple(float(m) for m in mu_r))
        object.__setattr__(self, "thickness",
                           tuple(float(d) for d in thickness))
        problems = validate(self)
        if problems:
            raise ModelError("; ".join(problems))

    @property
    def n_layers(self) -> int:
        return len(self.sigma)

    @property
    def depths(self) -> tuple:
        """Layer top depths z_k, starting at z_1 = 0."""
        z = [0.0]
        for d in self.thickness:
            z.append(z[-1] + d)
        return tuple(z)

    def with_sigma(self, sigma: Sequence[float]) -> "LayeredEarth":
        return LayeredEarth(sigma, self.mu_r, self.thickness)

    def with_mu_r(self, mu_r: Sequence[float]) -> "LayeredEarth":
        return LayeredEarth(self.sigma, mu_r, self.thickness)


def validate(model) -> list:
    """Check the layered-earth invariants; returns the list of violations
    (empty when the model is valid).

    Duck-typed on sigma / mu_r / thickness so unvalidated drafts (e.g. a
    SimpleNamespace or an editor buffer) can be diagnosed without
    raising."""
    problems = []
    n = len(model.sigma)
    if n < 1:
        problems.append("model must have at least one layer")
    if len(model.mu_r) != n:
        problems.append(
            f"mu_r has {len(model.mu_r)} entries, expected {n}")
    if len(model.thickness) != max(n - 1, 0):
        problems.append(
            f"thickness has {len(model.thickness)} entries, "
            f"expected {max(n - 1, 0)}")
    if any(s < 0 for s in model.sigma):
        problems.append("conductivity must be non-negative")
    if any(m <= 0 for m in model.mu_r):
        problems.append("relative permeability must be positive")
    if any(d <= 0 for d in model.thickness):
        problems.append("thickness must be positive")
    if any(not np.isfinite(v)
           for v in (*model.sigma, *model.mu_r, *model.thickness)):
        problems.append("model values must be finite")
    return problems


@dataclass(frozen=True)
class MeasurementGeometry:
    """Cartesian product of orientations x spacings x frequencies x heights.

    Responses over this geometry are ordered lexicographically with the
    orientation index outermost and the height index innermost, each axis
    in the order given here.  This ordering is normative for every file
    and vector produced by the package.
    """

    orientations: tuple
    spacings: tuple
    frequencies: tuple
    heights: tuple

    def __init__(self, orientations: Sequence[str],
                 spacings: Sequence[float],
                 frequencies: Sequence[float],
                 heights: Sequence[float]):
        orientations = tuple(str(o).upper() for o in orientations)
        for o in orientations:
            if o not in ORIENTATIONS:
                raise ModelError(f"unknown orientation {o!r}")
        if not orientations:
            raise ModelError("at least one orientation required")
        spacings = tuple(float(x) for x in spacings)
        frequencies = tuple(float(x) for x in frequencies)
        heights = tuple(float(x) for x in heights)
        if not spacings or any(x <= 0 for x in spacings):
            raise ModelError("spacings must be positive and non-empty")
        if not frequencies or any(x <= 0 for x in frequencies):
            raise ModelError("frequencies must be positive and non-empty")
        if len(heights) == 0 or any(x < 0 for x in heights):
            raise ModelError("heights must be non-negative and non-empty")
        object.__setattr__(self, "orientations", orientations)
        object.__setattr__(self, "spacings", spacings)
        object.__setattr__(self, "frequencies", frequencies)
        object.__setattr__(self, "heights", heights)

    @property
    def size(self) -> int:
        return (len(self.orientations) * len(self.spacings)
                * len(self.frequencies) * len(self.heights))

    def flat_index(self, v: int, t: int, i: int, j: int) -> int:
        m_rho = len(self.spacings)
        m_om = len(self.frequencies)
        m_h = len(self.heights)
        if not (0 <= v < len(self.orientations) and 0 <= t < m_rho
                and 0 <= i < m_om and 0 <= j < m_h):
            raise IndexError("geometry index out of range")
        return ((v * m_rho + t) * m_om + i) * m_h + j

    def unravel(self, flat: int):
        m_rho = len(self.spacings)
        m_om = len(self.frequencies)
        m_h = len(self.heights)
        if not 0 <= flat < self.size:
            raise IndexError("flat index out of range")
        flat, j = divmod(flat, m_h)
        flat, i = divmod(flat, m_om)
        v, t = divmod(flat, m_rho)
        return v, t, i, j

    def elements(self) -> tuple:
        """All measurement configurations in lexicographic order."""
        out = []
        for o in self.orientations:
            for rho in self.spacings:
                for f in self.frequencies:
                    for h in self.heights:
                        out.append(GeometryElement(o, rho, f, h))
        return tuple(out)


@dataclass(frozen=True)
class ResponseSet:
    """Complex responses Hs/Hp attached to their measurement elements.

    Built either from a MeasurementGeometry (full product, lexicographic
    order) or from an explicit element sequence (e.g. a device whose
    spacing list differs per orientation).
    """

    values: np.ndarray
    elements: tuple
    geometry: MeasurementGeometry | None = field(default=None)

    def __init__(self, values: Iterable[complex], elements: Sequence,
                 geometry: MeasurementGeometry | None = None):
        values = np.asarray(list(values), dtype=complex)
        elements = tuple(GeometryElement(*e) for e in elements)
        if values.shape != (len(elements),):
            raise ModelError("one value per geometry element required")
        if geometry is not None and geometry.size != len(elements):
            raise ModelError("geometry size does not match element count")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "geometry", geometry)

    def __len__(self) -> int:
        return len(self.elements)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def model_to_dict(model: LayeredEarth) -> dict:
    return {
        "sigma_S_per_m": list(model.sigma),
        "mu_r": list(model.mu_r),
        "thickness_m": list(model.thickness),
    }


def model_from_dict(data: dict) -> LayeredEarth:
    for key in ("sigma_S_per_m", "mu_r", "thickness_m"):
        if key not in data:
            raise ModelError(f"model file missing field {key!r}")
    return LayeredEarth(data["sigma_S_per_m"], data["mu_r"],
                        data["thickness_m"])


def save_model(model: LayeredEarth, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path) -> LayeredEarth:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed model file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ModelError(f"model file {path} must hold a JSON object")
    return model_from_dict(data)


def geometry_to_dict(geom: MeasurementGeometry) -> dict:
    return {
        "orientations": list(geom.orientations),
        "spacings_m": list(geom.spacings),
        "frequencies_Hz": list(geom.frequencies),
        "heights_m": list(geom.heights),
    }


def geometry_from_dict(data: dict) -> MeasurementGeometry:
    for key in ("orientations", "spacings_m", "frequencies_Hz", "heights_m"):
        if key not in data:
            raise ModelError(f"geometry file missing field {key!r}")
    return MeasurementGeometry(data["orientations"], data["spacings_m"],
                               data["frequencies_Hz"], data["heights_m"])


def save_geometry(geom: MeasurementGeometry, path) -> None:
    Path(path).write_text(json.dumps(geometry_to_dict(geom), indent=2) + "\n")


def load_geometry(path) -> MeasurementGeometry:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed geometry file {path}: {exc}") from exc
    return geometry_from_dict(data)
