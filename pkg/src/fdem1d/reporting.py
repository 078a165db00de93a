"""Canonical CSV/JSON emission shared by the CLI, the HTTP service and
the figure-dataset writer.

One code path produces every outward-facing byte: the service returns
exactly the text the CLI writes, which is what makes the two interfaces
verifiably identical and the outputs reproducible bit-for-bit.

CSV format: comma separator, '.' decimal point, one header row, floats
rendered with repr (shortest round-trip form).
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

import numpy as np

from .diagnostics import (DepthGrid, DoiEstimate, SensitivityProfile,
                          cumulative_response, induction_number,
                          skin_depth_layered)
from .earthmodel import GeometryElement, LayeredEarth
from .forward import DeviceScale, apparent_conductivity


def fmt(value) -> str:
    """Shortest round-trip decimal form of a scalar."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return repr(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if not isinstance(v, str) else v
                              for v in row))
    return "\n".join(lines) + "\n"


def canonical_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True,
                      allow_nan=True) + "\n"


# ---------------------------------------------------------------------------
# Response tables
# ---------------------------------------------------------------------------

RESPONSE_HEADER = ("orientation", "spacing_m", "frequency_Hz", "height_m",
                   "Q_raw", "P_raw", "Q_mS_per_m", "P_device_unit")


def response_rows(elements: Sequence[GeometryElement],
                  values: Sequence[complex],
                  scale: DeviceScale = DeviceScale()) -> list:
    rows = []
    for el, m in zip(elements, values):
        omega = 2 * math.pi * el.frequency
        q_msm = 1000.0 * apparent_conductivity(m.imag, omega, el.spacing)
        p_dev = (1000.0 if scale.p_unit == "ppt" else 1e6) * m.real
        rows.append((el.orientation, el.spacing, el.frequency, el.height,
                     m.imag, m.real, q_msm, p_dev))
    return rows


def response_csv(elements, values, scale: DeviceScale = DeviceScale()) -> str:
    return csv_text(RESPONSE_HEADER, response_rows(elements, values, scale))


def response_payload(elements, values,
                     scale: DeviceScale = DeviceScale()) -> dict:
    rows = response_rows(elements, values, scale)
    return {
        "columns": list(RESPONSE_HEADER),
        "p_unit": scale.p_unit,
        "rows": [[r[0]] + [float(x) for x in r[1:]] for r in rows],
    }


def parse_response_csv(text: str):
    """Elements and complex values from a response table (the inverse of
    response_csv; extra columns are ignored)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    idx = {name: header.index(name) for name in
           ("orientation", "spacing_m", "frequency_Hz", "height_m",
            "Q_raw", "P_raw")}
    elements, values = [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        elements.append(GeometryElement(
            parts[idx["orientation"]], float(parts[idx["spacing_m"]]),
            float(parts[idx["frequency_Hz"]]), float(parts[idx["height_m"]])))
        values.append(complex(float(parts[idx["P_raw"]]),
                              float(parts[idx["Q_raw"]])))
    return tuple(elements), np.array(values, dtype=complex)


# ---------------------------------------------------------------------------
# Diagnostics tables
# ---------------------------------------------------------------------------

def skin_depth_payload(model: LayeredEarth, frequency: float) -> dict:
    """Single skin-depth readout: layered recursion for stacks, the
    closed form for a homogeneous model (which also covers the
    unbounded sigma = 0 case, reported as null + a flag so the JSON
    stays parseable everywhere)."""
    from .constants import MU0
    from .diagnostics import skin_depth_homogeneous
    omega = 2 * math.pi * frequency
    if model.n_layers == 1:
        delta = skin_depth_homogeneous(model.sigma[0],
                                       model.mu_r[0] * MU0, omega)
    else:
        delta = skin_depth_layered(model, omega)
    unbounded = math.isinf(delta)
    return {
        "delta_m": None if unbounded else float(delta),
        "unbounded": unbounded,
        "frequency_Hz": float(frequency),
    }


def skin_beta_rows(model: LayeredEarth,
                   elements: Sequence[GeometryElement]) -> list:
    rows = []
    for el in elements:
        delta = skin_depth_layered(model, 2 * math.pi * el.frequency)
        rows.append((el.orientation, el.spacing, el.frequency, el.height,
                     delta, induction_number(el.spacing, delta)))
    return rows


SKIN_BETA_HEADER = ("orientation", "spacing_m", "frequency_Hz", "height_m",
                    "delta_m", "beta")


def skin_beta_csv(model, elements) -> str:
    return csv_text(SKIN_BETA_HEADER, skin_beta_rows(model, elements))


def skin_beta_payload(model, elements) -> dict:
    rows = skin_beta_rows(model, elements)
    return {
        "columns": list(SKIN_BETA_HEADER),
        "rows": [[r[0]] + [float(x) for x in r[1:]] for r in rows],
    }


SENSITIVITY_HEADER = ("depth_m", "Re_S_sigma", "Im_S_sigma", "Re_S_mu",
                      "Im_S_mu", "cumulative")


def sensitivity_rows(profile: SensitivityProfile,
                     component: str | None = None) -> list:
    from .diagnostics import DOI_COMPONENT
    _, cum = cumulative_response(profile, component or DOI_COMPONENT)
    rows = []
    for i in range(len(profile.depths)):
        rows.append((profile.depths[i],
                     profile.s_sigma[i].real, profile.s_sigma[i].imag,
                     profile.s_mu[i].real, profile.s_mu[i].imag,
                     cum[i]))
    return rows


def sensitivity_csv(profile, component: str | None = None) -> str:
    return csv_text(SENSITIVITY_HEADER, sensitivity_rows(profile, component))


DOI_HEADER = ("orientation", "spacing_m", "frequency_Hz", "height_m",
              "doi_m", "tau", "reached")


def doi_rows(estimates: Sequence[DoiEstimate]) -> list:
    rows = []
    for est in estimates:
        el = est.element
        rows.append((el.orientation, el.spacing, el.frequency, el.height,
                     est.doi, est.tau, est.reached))
    return rows


def doi_csv(estimates) -> str:
    return csv_text(DOI_HEADER, doi_rows(estimates))


def doi_payload(estimates, include_curves: bool = False) -> dict:
    rows = []
    for est in estimates:
        el = est.element
        row = {
            "orientation": el.orientation,
            "spacing_m": el.spacing,
            "frequency_Hz": el.frequency,
            "height_m": el.height,
            "doi_m": None if not est.reached else float(est.doi),
            "tau": float(est.tau),
            "reached": bool(est.reached),
            "max_cumulative": float(est.max_cumulative),
        }
        if include_curves:
            row["depths_m"] = [float(z) for z in est.depths]
            row["cumulative"] = [float(c) for c in est.cumulative]
        rows.append(row)
    return {"rows": rows}


# ---------------------------------------------------------------------------
# Inversion report
# ---------------------------------------------------------------------------

def inversion_report(result, problem, grid_model: LayeredEarth) -> dict:
    opts = result.options
    iterations = []
    for i in range(result.iterations):
        iterations.append({
            "iteration": i + 1,
            "residual_norm": float(result.residual_history[i + 1]),
            "step_norm": float(result.step_norms[i]),
            "rank": int(result.ranks[i]),
            "alpha": float(result.alphas[i]),
            "beta": float(result.betas[i]),
        })
    return {
        "options": {
            "method": opts.method,
            "component": opts.component,
            "mode": opts.mode,
            "regularizer": opts.regularizer.kind,
            "rank": opts.rank,
            "noise_level": opts.noise_level,
            "safety": opts.safety,
            "max_iterations": opts.max_iterations,
            "step_tol": opts.step_tol,
            "residual_tol": opts.residual_tol,
        },
        "grid": {
            "thickness_m": list(grid_model.thickness),
            "n_layers": grid_model.n_layers,
        },
        "initial_residual_norm": float(result.residual_history[0]),
        "iterations": iterations,
        "final_model": [float(v) for v in result.x],
        "converged": bool(result.converged),
        "reason": result.reason,
        "stationarity": result.stationarity,
    }
