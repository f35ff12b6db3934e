import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from cold.fixtures import CHAIN, FIVE, GRAPHS, write_graphs  # noqa: E402
from cold.graph import random_chordal  # noqa: E402
from cold.io import parse_text  # noqa: E402

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")


@st.composite
def uccgs(draw, n_min=1, n_max=12):
    n = draw(st.integers(n_min, n_max))
    full = n * (n - 1) // 2
    m = draw(st.integers(n - 1, full))
    seed = draw(st.integers(0, 2**31 - 1))
    return random_chordal(n, m, seed)


@st.composite
def rngs(draw):
    return random.Random(draw(st.integers(0, 2**31 - 1)))


@pytest.fixture
def five():
    return parse_text(FIVE)


@pytest.fixture
def chain():
    return parse_text(CHAIN)


@pytest.fixture
def graph_files(tmp_path):
    write_graphs(tmp_path)
    return {name: tmp_path / name for name in GRAPHS}
