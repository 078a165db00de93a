import numpy as np
import pytest

from fdem1d.earthmodel import GeometryElement, LayeredEarth


@pytest.fixture
def three_layer_low():
    """Resistive middle layer trapped between conductive top and
    moderately resistive basement."""
    return LayeredEarth([0.1, 0.001, 0.01], [1.0, 1.01, 1.005], [1.5, 1.0])


@pytest.fixture
def three_layer_high():
    """Same stack with a strongly conductive middle layer."""
    return LayeredEarth([0.1, 2.0, 0.01], [1.0, 1.01, 1.005], [1.5, 1.0])


@pytest.fixture
def homogeneous():
    return LayeredEarth([0.1], [1.0], [])


@pytest.fixture
def dualem_elements():
    """Dualem-21H at 0.9 m: three HCP and three PERP spacings, 9 kHz."""
    hcp = [GeometryElement("HCP", r, 9000.0, 0.9) for r in (0.5, 1.0, 2.0)]
    perp = [GeometryElement("PERP", r, 9000.0, 0.9) for r in (0.6, 1.1, 2.1)]
    return tuple(hcp + perp)


@pytest.fixture(autouse=True)
def _isolated_home(tmp_path, monkeypatch):
    monkeypatch.setenv("FDEM1D_DATA_DIR", str(tmp_path / "fdem1d-home"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
