"""Regeneration of the survey-design example datasets.

Two three-layer example models (a conductive top layer over a resistive
or strongly conductive middle layer and a moderately resistive
basement) are pushed through the forward model, the diagnostics and the
circuit response to produce figure-ready CSV files: height sweeps for
the multi-coil devices, frequency sweeps for the multi-frequency
device, induction-number curves, skin-depth/DOI tables and the coupled
loop response function.  Everything is deterministic: two runs produce
bit-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from . import circuit, devicedb, diagnostics, forward, reporting
from .earthmodel import LayeredEarth

# Three-layer examples: the models differ only in the conductivity of
# the middle layer (resistive vs strongly conductive trapped layer).
MODEL_LOW = LayeredEarth([0.1, 0.001, 0.01], [1.0, 1.01, 1.005], [1.5, 1.0])
MODEL_HIGH = LayeredEarth([0.1, 2.0, 0.01], [1.0, 1.01, 1.005], [1.5, 1.0])

HEIGHT_SWEEP = np.round(np.arange(0.0, 3.0 + 1e-9, 0.05), 10)
FREQ_SWEEP = np.logspace(math.log10(30.0), math.log10(93000.0), 61)
FREQ_SWEEP[0], FREQ_SWEEP[-1] = 30.0, 93000.0  # exact range endpoints
MARKER_HEIGHT = 0.9


def _device(catalog, name):
    if catalog is not None:
        return catalog.lookup(name)
    for entry in devicedb.seed_defaults():
        if entry.name == name:
            return entry
    raise devicedb.DeviceError(f"seed device {name!r} missing")


def _height_sweep_rows(model, device):
    rows = []
    for h in HEIGHT_SWEEP:
        elements = device.elements((float(h),))
        values = [forward.response_element(model, el).m_value
                  for el in elements]
        rows.extend(reporting.response_rows(elements, values, device.scale))
    return rows


def _write(path: Path, text: str):
    path.write_text(text)
    return path.name


def write_all(outdir, catalog=None) -> list:
    """Write every example dataset into outdir; returns the file names."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    dualem = _device(catalog, "Dualem-21H")
    explorer = _device(catalog, "CMD Explorer")
    gem2 = _device(catalog, "GEM-2")

    # Height sweeps of the multi-coil devices over both models.
    for name, model, device in (
            ("height_sweep_dualem21h_low.csv", MODEL_LOW, dualem),
            ("height_sweep_explorer_low.csv", MODEL_LOW, explorer),
            ("height_sweep_dualem21h_high.csv", MODEL_HIGH, dualem),
            ("height_sweep_explorer_high.csv", MODEL_HIGH, explorer)):
        text = reporting.csv_text(reporting.RESPONSE_HEADER,
                                  _height_sweep_rows(model, device))
        written.append(_write(out / name, text))

    # Frequency sweep of the multi-frequency device at two heights.
    header = ("model",) + reporting.RESPONSE_HEADER
    rows = []
    for label, model in (("low", MODEL_LOW), ("high", MODEL_HIGH)):
        for h in (0.2, MARKER_HEIGHT):
            elements = gem2.elements((h,), frequencies=FREQ_SWEEP)
            values = [forward.response_element(model, el).m_value
                      for el in elements]
            for row in reporting.response_rows(elements, values, gem2.scale):
                rows.append((label,) + row)
    written.append(_write(out / "freq_sweep_gem2.csv",
                          reporting.csv_text(header, rows)))

    # Induction number vs frequency spanned by the multi-frequency device.
    rho = gem2.rows[0].spacings[0]
    rows = []
    for f in FREQ_SWEEP:
        omega = 2 * math.pi * f
        d1 = diagnostics.skin_depth_layered(MODEL_LOW, omega)
        d2 = diagnostics.skin_depth_layered(MODEL_HIGH, omega)
        rows.append((f, rho / d1, rho / d2))
    written.append(_write(
        out / "induction_numbers_gem2.csv",
        reporting.csv_text(("frequency_Hz", "beta_model_low",
                            "beta_model_high"), rows)))

    # Coupled-loop response function G(beta) on a log grid.
    betas = np.logspace(-3, 3, 121)
    rows = [(b, circuit.response_function(b).real,
             circuit.response_function(b).imag) for b in betas]
    written.append(_write(out / "response_function.csv",
                          reporting.csv_text(("beta", "Re_G", "Im_G"), rows)))

    # Skin depth / induction number table for the three example devices.
    rows = []
    for device in (dualem, explorer, gem2):
        for row in device.rows:
            freqs = (row.frequency,) if row.frequency else \
                device.default_frequencies
            for rho_i in row.spacings:
                for f in freqs:
                    omega = 2 * math.pi * f
                    d1 = diagnostics.skin_depth_layered(MODEL_LOW, omega)
                    d2 = diagnostics.skin_depth_layered(MODEL_HIGH, omega)
                    rows.append((device.name, row.orientation, rho_i, f,
                                 d1, rho_i / d1, d2, rho_i / d2))
    written.append(_write(
        out / "skin_depth_induction.csv",
        reporting.csv_text(
            ("device", "orientation", "spacing_m", "frequency_Hz",
             "delta_model_low_m", "beta_model_low",
             "delta_model_high_m", "beta_model_high"), rows)))

    # DOI table at the example operating height.
    rows = []
    for device in (dualem, explorer, gem2):
        for label, model in (("low", MODEL_LOW), ("high", MODEL_HIGH)):
            for el in device.elements((MARKER_HEIGHT,)):
                est = diagnostics.depth_of_investigation(model, el)
                rows.append((device.name, label, el.orientation, el.spacing,
                             el.frequency, est.doi, est.tau))
    written.append(_write(
        out / "depth_of_investigation.csv",
        reporting.csv_text(
            ("device", "model", "orientation", "spacing_m", "frequency_Hz",
             "doi_m", "tau"), rows)))

    return written
