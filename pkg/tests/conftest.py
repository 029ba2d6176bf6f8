import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))

from givenclause.env import default_problem_path  # noqa: E402


@pytest.fixture
def problem_path():
    def lookup(name: str) -> str:
        return str(default_problem_path(name))

    return lookup


@pytest.fixture
def fixtures_dir() -> Path:
    return TESTS_DIR / "fixtures"
