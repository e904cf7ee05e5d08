import numpy as np
import pytest

from aquasynth.spectra import load_camera_response, load_water_type


@pytest.fixture(scope="session")
def response():
    return load_camera_response()


@pytest.fixture(scope="session")
def water_3c():
    return load_water_type("3C")


@pytest.fixture(scope="session")
def water_9c():
    return load_water_type("9C")


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
