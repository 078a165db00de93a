"""Backend equivalence: the compiled kernel core and the NumPy fallback
must agree node-for-node, and both must agree with a finite-difference
probe of the reflection factor."""

import numpy as np
import pytest

from fdem1d._core import kernels_np
from fdem1d.constants import MU0

try:
    from fdem1d._core import _kernels as compiled
except ImportError:  # pragma: no cover - build-environment dependent
    compiled = None

LAM = np.logspace(-6, 5, 301)
OMEGA = 2 * np.pi * 9000.0

CASES = {
    "three-layer": (np.array([0.1, 0.001, 0.01]),
                    np.array([1.0, 1.01, 1.005]) * MU0,
                    np.array([1.5, 1.0])),
    "homogeneous": (np.array([0.25]), np.array([1.0]) * MU0, np.array([])),
    "with-free-space-layer": (np.array([0.0, 0.5]),
                              np.array([1.0, 1.2]) * MU0, np.array([2.0])),
    "thick-conductive": (np.array([5.0, 0.01]), np.array([1.0, 1.0]) * MU0,
                         np.array([50.0])),
}


needs_compiled = pytest.mark.skipif(compiled is None,
                                    reason="compiled kernels not built")


@needs_compiled
@pytest.mark.parametrize("case", CASES)
def test_backends_agree_on_reflection(case):
    sigma, mu, d = CASES[case]
    a = kernels_np.reflection(LAM, sigma, mu, d, OMEGA)
    b = compiled.reflection(LAM, sigma, mu, d, OMEGA)
    assert np.max(np.abs(a - b)) < 1e-13


@needs_compiled
@pytest.mark.parametrize("case", CASES)
def test_backends_agree_on_gradients(case):
    sigma, mu, d = CASES[case]
    ra, dsa, dma = kernels_np.reflection_gradients(LAM, sigma, mu, d, OMEGA)
    rb, dsb, dmb = compiled.reflection_gradients(LAM, sigma, mu, d, OMEGA)
    assert np.max(np.abs(ra - rb)) < 1e-13
    # zero-conductivity layers amplify rounding differences through the
    # 1/(2u) = 1/(2*lam) factor at tiny nodes; 1e-9 is still machine level
    # for that conditioning
    scale_s = np.max(np.abs(dsa)) or 1.0
    scale_m = np.max(np.abs(dma)) or 1.0
    assert np.max(np.abs(dsa - dsb)) / scale_s < 1e-9
    assert np.max(np.abs(dma - dmb)) / scale_m < 1e-9


@pytest.mark.parametrize("backend", [kernels_np] +
                         ([compiled] if compiled else []))
def test_gradients_match_finite_differences(backend):
    sigma, mu, d = CASES["three-layer"]
    lam = np.logspace(-3, 2, 40)
    _, ds, dm = backend.reflection_gradients(lam, sigma, mu, d, OMEGA)
    for k in range(len(sigma)):
        h = 1e-6 * sigma[k]
        up, dn = sigma.copy(), sigma.copy()
        up[k] += h
        dn[k] -= h
        fd = (backend.reflection(lam, up, mu, d, OMEGA)
              - backend.reflection(lam, dn, mu, d, OMEGA)) / (2 * h)
        assert np.max(np.abs(ds[k] - fd)) / np.max(np.abs(ds[k])) < 1e-6
        hm = 1e-8 * mu[k]
        up, dn = mu.copy(), mu.copy()
        up[k] += hm
        dn[k] -= hm
        fd = (backend.reflection(lam, sigma, up, d, OMEGA)
              - backend.reflection(lam, sigma, dn, d, OMEGA)) / (2 * hm)
        assert np.max(np.abs(dm[k] - fd)) / np.max(np.abs(dm[k])) < 1e-6


def test_free_space_layer_is_exact():
    # sigma = 0 keeps u = lam exactly; a stack of free-space layers over
    # free space reflects nothing at all
    sigma = np.array([0.0, 0.0])
    mu = np.array([1.0, 1.0]) * MU0
    d = np.array([3.0])
    r = kernels_np.reflection(LAM, sigma, mu, d, OMEGA)
    assert np.all(r == 0.0)


def test_tanh_saturation_matches_exact_region():
    # an effectively opaque first layer hides everything below it
    mu = np.array([1.0, 1.0]) * MU0
    d = np.array([80.0])
    shallow = kernels_np.reflection(LAM, np.array([1.0, 0.001]), mu, d,
                                    OMEGA)
    other = kernels_np.reflection(LAM, np.array([1.0, 5.0]), mu, d, OMEGA)
    # difference sits at recursion rounding level, 12 orders below |R|
    assert np.max(np.abs(shallow - other)) < 1e-12
