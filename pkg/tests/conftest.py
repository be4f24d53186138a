import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import s0  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def scenario_s0():
    return s0()


@pytest.fixture(scope="session")
def scenario_s0_noise():
    return s0(noise=True)


@pytest.fixture(scope="session")
def scenarios_dir():
    return ROOT / "scenarios"
