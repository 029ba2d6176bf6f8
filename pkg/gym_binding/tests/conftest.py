import pytest

from givenclause.env import default_problem_path


@pytest.fixture
def problem_path():
    def lookup(name: str) -> str:
        return str(default_problem_path(name))

    return lookup
