import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from compotest import fixtures  # noqa: E402


@pytest.fixture(scope="session")
def fx():
    return {name: fixtures.load(name) for name in fixtures.names()}
