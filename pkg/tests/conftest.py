import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))

from specsynth.mining import ingest_corpus  # noqa: E402


def corpus(name):
    return ingest_corpus(FIXTURES / f"{name}.mini")


def artifact(corpus_name, fn):
    return next(a for a in corpus(corpus_name) if a.name == fn)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def swap_corpus():
    return corpus("swap")


@pytest.fixture(scope="session")
def micro_corpus():
    return corpus("micro")


SWAP_CONTRACT = "requires: (x |-> v1) * (y |-> v2)\nensures: (x |-> v2) * (y |-> v1)"


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
