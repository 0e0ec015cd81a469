import numpy as np
import pytest
from hypothesis import settings

from backend.sphere_geometry import make_rng
from models.data_models import QuadratureSpec, RunConfig

settings.register_profile("lab", max_examples=40, deadline=None)
settings.load_profile("lab")


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(20240601)


@pytest.fixture
def quad() -> QuadratureSpec:
    return QuadratureSpec()


@pytest.fixture
def config(tmp_path) -> RunConfig:
    return RunConfig(dimension=5, seed=42, output_path=tmp_path / "report.json")
