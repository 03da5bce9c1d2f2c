import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import exhaustive_corpus, satisfiable_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus500():
    return satisfiable_corpus(500)


@pytest.fixture(scope="session")
def tiny_exhaustive():
    return exhaustive_corpus(50)
