from pathlib import Path

import numpy as np
import pytest

from qwalk import experiments as ex
from qwalk.graph_model import build_graph

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
TWO_PI = 2 * np.pi


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def triangle():
    """Triangle on spoke 1 of a 64-spoke star, full basis, tuned to phi = 2 pi."""
    return build_graph(ex.triangle_spec(64))


@pytest.fixture
def triangle_small():
    return build_graph(ex.triangle_spec(4))
