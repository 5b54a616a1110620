import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import blobs, topic_docs, write_corpus  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def text_docs():
    return topic_docs(30, seed=0)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory, text_docs):
    return write_corpus(tmp_path_factory.mktemp("corpus"), text_docs)


@pytest.fixture(scope="session")
def blob_data():
    return blobs(30, dim=20, seed=0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
