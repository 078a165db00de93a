#!/usr/bin/env python3
"""One-time calibration of the DOI threshold DOI_TAU.

The depth of investigation is the first depth where the cumulative
sensitivity (|Im S_sigma| per cell, normalized against the whole
subsurface including the basement term) reaches DOI_TAU.  The threshold
was fitted once on a single cell of a published multi-device sounding
comparison at 0.9 m height (wide-spacing HCP row over the
resistive-middle model: 6.7 m) and then frozen in
``fdem1d.diagnostics``.  This script re-derives it and reports how the
remaining cells of the reference table compare, honestly: most of them
do not land within 0.4 m under any single-threshold rule (the
reference's exact recipe is not published); the structural orderings do
hold and are part of the acceptance suite.

Run from the repo root: python3 tools/calibrate_doi_tau.py
"""

import numpy as np

from fdem1d.diagnostics import (DOI_TAU, DepthGrid, cumulative_response,
                                depth_of_investigation,
                                sensitivity_analytic)
from fdem1d.earthmodel import GeometryElement, LayeredEarth

HEIGHT = 0.9
GRID = DepthGrid(0.1, 15.0)

MODEL_LOW = LayeredEarth([0.1, 0.001, 0.01], [1, 1.01, 1.005], [1.5, 1.0])
MODEL_HIGH = LayeredEarth([0.1, 2.0, 0.01], [1, 1.01, 1.005], [1.5, 1.0])

# reference DOI values: (orientation, spacing, frequency, low, high)
REFERENCE = [
    ("HCP", 0.5, 9000.0, 2.7, 2.7), ("HCP", 1.0, 9000.0, 3.5, 3.5),
    ("HCP", 2.0, 9000.0, 6.7, 6.3), ("PERP", 0.6, 9000.0, 2.7, 2.4),
    ("PERP", 1.1, 9000.0, 2.8, 2.8), ("PERP", 2.1, 9000.0, 3.9, 3.9),
    ("HCP", 1.48, 10000.0, 5.5, 5.1), ("HCP", 2.82, 10000.0, 5.9, 5.6),
    ("HCP", 4.49, 10000.0, 7.9, 7.1), ("VCP", 1.48, 10000.0, 3.2, 3.2),
    ("VCP", 2.82, 10000.0, 5.1, 4.7), ("VCP", 4.49, 10000.0, 8.3, 7.5),
    ("HCP", 1.66, 1275.0, 8.3, 8.3), ("HCP", 1.66, 4250.0, 8.3, 8.3),
    ("HCP", 1.66, 12525.0, 8.3, 7.2), ("HCP", 1.66, 28725.0, 8.3, 6.4),
    ("HCP", 1.66, 54150.0, 8.3, 5.5), ("HCP", 1.66, 82150.0, 7.9, 4.7),
]

CAL = ("HCP", 2.0, 9000.0)
CAL_TARGET = 6.7


def derive_tau() -> float:
    el = GeometryElement(*CAL, HEIGHT)
    profile = sensitivity_analytic(MODEL_LOW, el, GRID)
    _, cum = cumulative_response(profile, include_basement=True)
    i = int(round(CAL_TARGET / GRID.dz)) - 1
    return float(0.5 * (cum[i - 1] + cum[i]))


def main():
    tau = derive_tau()
    print(f"derived tau = {tau:.4f} (frozen DOI_TAU = {DOI_TAU})")
    errs = []
    for orient, rho, f, target_low, target_high in REFERENCE:
        el = GeometryElement(orient, rho, f, HEIGHT)
        for model, target in ((MODEL_LOW, target_low),
                              (MODEL_HIGH, target_high)):
            est = depth_of_investigation(model, el, tau=tau, grid=GRID)
            if (orient, rho, f) != CAL or model is not MODEL_LOW:
                errs.append(est.doi - target)
    errs = np.array(errs)
    print(f"held-out cells: {np.sum(np.abs(errs) <= 0.4)}/{len(errs)} "
          f"within 0.4 m, worst {np.max(np.abs(errs)):.1f} m")
    print("(expected: most are outside 0.4 m; the reference recipe is "
          "unpublished. Structural orderings are asserted in the "
          "acceptance suite.)")


if __name__ == "__main__":
    main()
