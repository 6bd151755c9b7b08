import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# Filled by tests/test_acceptance.py; echoed after the run so the one-line
# verdicts survive pytest's fd-level output capture.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_corpus():
    from pomo.corpus import load_parsed_corpus

    return list(load_parsed_corpus(FIXTURES / "corpus.jsonl"))


@pytest.fixture(scope="session")
def fixture_kb():
    from pomo.kb import load_kb

    return load_kb(FIXTURES / "kb.jsonl")


@pytest.fixture(scope="session")
def gold_candidates():
    with open(FIXTURES / "gold_candidates.jsonl", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle]


@pytest.fixture(scope="session")
def fixture_instances(fixture_corpus, fixture_kb):
    from pomo.dataset import build_instances
    from pomo.extraction import extract_from_corpus

    return list(build_instances(extract_from_corpus(fixture_corpus), fixture_kb))
