"""
Shared pytest fixtures: settings, small graphs and their spectra.
"""

import sys
from dataclasses import replace
from pathlib import Path

import pytest

# Add project root to path
ROOT = Path(__file__).parent
sys.path.insert(0, str(ROOT))

from config.settings import Settings  # noqa: E402
from src.graphs.graph_models import build_transition, lazy  # noqa: E402
from src.models.graph import GraphFamily, GraphSpec  # noqa: E402
from src.spectral.eigen import eigendecompose, group_eigenvalues  # noqa: E402


def spec(family: str, **params) -> GraphSpec:
    return GraphSpec(family=GraphFamily(family), **params)


def make(family: str, **params):
    return build_transition(spec(family, **params))


def spectral(matrix):
    spectrum = eigendecompose(matrix)
    return spectrum, group_eigenvalues(spectrum)


@pytest.fixture
def settings() -> Settings:
    base = Settings()
    return replace(base, storage=replace(base.storage, golden_dir=ROOT / "golden"))


@pytest.fixture
def cycle4():
    return make("cycle", n=4)


@pytest.fixture
def lazy_cycle4(cycle4):
    return lazy(cycle4)


@pytest.fixture
def complete8():
    return make("complete", size=8, with_self_loops=True)


@pytest.fixture
def torus52():
    return make("torus", p=5, d=2)


@pytest.fixture
def config_file(tmp_path) -> Path:
    """YAML config writing logs under tmp_path and reading the committed golden tables."""
    text = (ROOT / "config" / "config.yaml").read_text()
    text = text.replace("./logs/qwalk.log", str(tmp_path / "logs" / "qwalk.log"))
    text = text.replace("./data/runs", str(tmp_path / "runs"))
    text = text.replace("golden_dir: ./golden", f"golden_dir: {ROOT / 'golden'}")
    path = tmp_path / "config.yaml"
    path.write_text(text)
    return path
