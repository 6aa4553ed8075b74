import numpy as np
import pytest

from curvadapt.construct import ConstructedHypersurface, make_curve
from curvadapt.hypersurface import GeodesicSphere, Horosphere
from curvadapt.spaceform import SpaceForm

S2 = SpaceForm.sphere(2)
H2 = SpaceForm.hyperbolic(2)
E2 = SpaceForm.euclidean(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def spheres_scene():
    """S^2 x S^2 with geodesic spheres r = 0.5 and circle(0.1)."""
    return ConstructedHypersurface(GeodesicSphere(S2, 0.5), GeodesicSphere(S2, 0.5), make_curve("circle", radius=0.1))


@pytest.fixture(scope="session")
def mixed_scene():
    """S^2 x H^2 with geodesic spheres r = 0.5 and circle(0.1)."""
    return ConstructedHypersurface(GeodesicSphere(S2, 0.5), GeodesicSphere(H2, 0.5), make_curve("circle", radius=0.1))


@pytest.fixture(scope="session")
def horo_scene():
    return ConstructedHypersurface(Horosphere(SpaceForm.hyperbolic(3)), Horosphere(H2), make_curve("circle", radius=0.3))


# -- acceptance report -------------------------------------------------------

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """``criterion(n, ok, detail)`` records and prints one verdict line."""
    def record(number, ok, detail):
        line = f"acceptance {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append((number, line))
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
