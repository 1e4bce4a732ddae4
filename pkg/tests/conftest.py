import numpy as np
import pytest

from polycf import SolidKind, cf_for, solid_metrics


@pytest.fixture(scope="session")
def tetra():
    return solid_metrics(SolidKind.TETRAHEDRON, 1.0)


@pytest.fixture(scope="session")
def octa():
    return solid_metrics(SolidKind.OCTAHEDRON, 1.0)


@pytest.fixture(scope="session")
def sphere():
    return solid_metrics(SolidKind.SPHERE, 1.0)


@pytest.fixture(scope="session")
def tetra_cf(tetra):
    return cf_for(tetra)


@pytest.fixture(scope="session")
def octa_cf(octa):
    return cf_for(octa)


@pytest.fixture(scope="session")
def sphere_cf(sphere):
    return cf_for(sphere)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
