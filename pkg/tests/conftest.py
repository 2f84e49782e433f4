import numpy as np
import pytest

from boundtransport.cases.channel import build_channel
from boundtransport.dependencies import shutdown_executor
from boundtransport.fem.mesh import Mesh
from boundtransport.schemas.physics.cases import ChannelSpec

SQRT3 = np.sqrt(3.0)


@pytest.fixture(autouse=True)
def serial_assembly():
    yield
    shutdown_executor()


@pytest.fixture
def equilateral() -> Mesh:
    return Mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, SQRT3 / 2.0]]), np.array([[0, 1, 2]]))


@pytest.fixture
def unit_square() -> Mesh:
    """Two triangles; the right edge x = 1 is marked "outlet"."""
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    elements = np.array([[0, 1, 2], [0, 2, 3]])
    return Mesh(nodes, elements, np.array([[1, 2]]), ("outlet",))


@pytest.fixture
def unit_tet() -> Mesh:
    nodes = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    return Mesh(nodes, np.array([[0, 1, 2, 3]]))


@pytest.fixture
def small_channel():
    return build_channel(ChannelSpec(nx=20, ny=10))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
