"""Shared fixtures: the canonical seed-7 demo corpus and acceptance reporting."""
from __future__ import annotations

import pytest

from corpusel import build_fixture, build_index, demo_graph, demo_mix

FIXTURE_SEED = 7
FIXTURE_DOCS = 200


@pytest.fixture(scope="session")
def fixture_graph():
    return demo_graph()


@pytest.fixture(scope="session")
def fixture_corpus(fixture_graph):
    """(documents, truth) for the canonical seed-7, 200-document fixture."""
    return build_fixture(FIXTURE_SEED, FIXTURE_DOCS, fixture_graph, demo_mix())


@pytest.fixture(scope="session")
def fixture_docs(fixture_corpus):
    return fixture_corpus[0]


@pytest.fixture(scope="session")
def fixture_truth(fixture_corpus):
    return fixture_corpus[1]


@pytest.fixture(scope="session")
def fixture_index(fixture_docs):
    return build_index(fixture_docs)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion test."""
    outcomes: dict[str, str] = {}
    for status, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if verdict == "FAIL" or name not in outcomes:
                outcomes[name] = verdict
    if outcomes:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(outcomes):
            label = name.removeprefix("test_").replace("_", " ")
            terminalreporter.write_line(f"ACCEPTANCE {outcomes[name]}: {label}")
