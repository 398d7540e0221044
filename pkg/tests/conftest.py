from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def small_gazetteer():
    from tweetmine.corpus import Gazetteer
    return Gazetteer.load(FIXTURES / "gazetteer_small.tsv")
