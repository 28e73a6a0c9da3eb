"""Acceptance gate: one test per criterion, at the stated tolerance and budget.

All comparisons run against independent oracles (round-based reachability,
plain-count majority rule, character-scan clue extraction, full corpus scans)
and the committed golden file; the service contract is exercised over real
HTTP against a fixture server with no web UI built.
"""
from __future__ import annotations

import itertools
import json
import random
import socket
import threading
import time
from pathlib import Path

import httpx
import pytest
import uvicorn

from corpusel import (
    Period,
    TemporalClass,
    build_index,
    classify_entity,
    create_session,
    demo_graph,
    demo_mix,
    descendant_categories,
    effective_query,
    export_corpus,
    extract_clues,
    frequencies,
    missing_entities,
    prune_categories,
    read_export,
    retrieve,
    aggregate,
    replay_session,
    toggle_category,
    toggle_entity,
)
from corpusel.service import build_app
from corpusel.session import assess_document, audit_lines, Verdict
from gen import (
    narrower_map,
    random_category_graph,
    random_clues,
    random_description,
    random_period,
    widen_period,
)
from oracles import (
    char_scan_clues,
    majority_keep,
    reach_by_rounds,
    scan_aggregate,
    scan_frequencies,
    scan_retrieve,
)

pytestmark = pytest.mark.acceptance

GOLDEN_PATH = Path(__file__).parent / "data" / "golden_end_to_end.json"


def test_category_majority_rule():
    """All class multisets of size <= 6 agree with the counting oracle."""
    started = time.perf_counter()
    all_classes = list(TemporalClass)
    checked = 0
    for size in range(7):
        for combo in itertools.product(all_classes, repeat=size):
            memberships = {"cat": {f"e{i}" for i in range(size)}}
            classes = {f"e{i}": cls for i, cls in enumerate(combo)}
            decision = prune_categories(memberships, classes)[0]
            expected = majority_keep([cls.value for cls in combo])
            assert decision.auto_selected == expected, combo
            checked += 1
    elapsed = time.perf_counter() - started
    assert checked == sum(4 ** k for k in range(7))
    assert elapsed < 1.0, f"majority-rule enumeration took {elapsed:.2f}s"


def test_temporal_monotonicity():
    """1,000 random clue/period pairs: widening the period never demotes."""
    started = time.perf_counter()
    rng = random.Random(1402)
    rank = {
        TemporalClass.OUT_OF_PERIOD: 0,
        TemporalClass.BORDERLINE: 1,
        TemporalClass.IN_PERIOD: 2,
        TemporalClass.UNDATED: -1,  # undated is period-independent
    }
    violations = 0
    for _ in range(1000):
        clues = random_clues(rng)
        period = random_period(rng)
        wider = widen_period(rng, period)
        before = classify_entity(clues, Period(*period))
        after = classify_entity(clues, Period(*wider))
        if clues.is_empty:
            if not (before is TemporalClass.UNDATED and after is TemporalClass.UNDATED):
                violations += 1
        elif rank[after] < rank[before]:
            violations += 1
    elapsed = time.perf_counter() - started
    assert violations == 0
    assert elapsed < 1.0, f"monotonicity sweep took {elapsed:.2f}s"


def test_traversal_oracle():
    """100 random graphs (cycles allowed): traversal equals round-based reachability."""
    started = time.perf_counter()
    rng = random.Random(77)
    for g in range(100):
        n_categories = rng.randint(2, 100)
        n_edges = rng.randint(0, n_categories * 3)
        graph = random_category_graph(rng, n_categories, n_edges,
                                      allow_cycles=bool(g % 2))
        roots = set(rng.sample(sorted(graph.categories),
                               rng.randint(1, min(3, n_categories))))
        oracle_adjacency = narrower_map(graph)
        for depth in range(1, 7):
            expected = reach_by_rounds(oracle_adjacency, roots, depth)
            actual = descendant_categories(graph, roots, depth)
            assert actual == expected
            assert len(actual) <= len(graph.categories)
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"traversal sweep took {elapsed:.2f}s"


def test_index_oracle(fixture_graph, fixture_docs, fixture_index):
    """Frequencies, retrieve, aggregate equal full-scan results for 20 entity sets."""
    started = time.perf_counter()
    rng = random.Random(2025)
    entity_ids = sorted(fixture_graph.entities)
    for _ in range(20):
        queried = set(rng.sample(entity_ids, rng.randint(1, len(entity_ids))))

        report = frequencies(fixture_index, queried)
        assert ({e: (r.documents, r.mentions) for e, r in report.rows.items()}
                == scan_frequencies(fixture_docs, queried))

        rows = retrieve(fixture_index, queried)
        assert ([(r.doc_id, set(r.matched_entities), r.mention_count) for r in rows]
                == [(d, set(m), c) for d, m, c in scan_retrieve(fixture_docs, queried)])

        for dimension in ("year", "party"):
            assert (aggregate(fixture_index, queried, dimension)
                    == scan_aggregate(fixture_docs, queried, dimension))
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"index oracle sweep took {elapsed:.2f}s"


def test_clue_extraction():
    """The four stated examples plus 50 generated strings match the reference scan."""
    clues = extract_clues("founded in 1602 and dissolved in 1799")
    assert (clues.years, clues.intervals) == ({1602, 1799}, frozenset())
    clues = extract_clues("the occupation of 1940-1945")
    assert (clues.years, clues.intervals) == ({1940, 1945}, {(1940, 1945)})
    clues = extract_clues("ISBN 9781602000000")
    assert (clues.years, clues.intervals) == (frozenset(), frozenset())
    clues = extract_clues("")
    assert clues.is_empty

    rng = random.Random(1799)
    for _ in range(50):
        text = random_description(rng)
        expected_years, expected_intervals = char_scan_clues(text)
        clues = extract_clues(text)
        assert clues.years == expected_years, text
        assert clues.intervals == expected_intervals, text


def test_session_replay(fixture_graph, fixture_index):
    """100 random toggles/assessments replay exactly; export round-trips ids."""
    state = create_session(fixture_graph, ("c:age_of_sail",), Period(1588, 1702))
    rng = random.Random(31)
    categories = sorted(state.category_selected)
    entities = sorted(state.entity_selected)
    for _ in range(100):
        roll = rng.random()
        if roll < 0.4:
            toggle_category(state, rng.choice(categories))
        elif roll < 0.8:
            toggle_entity(state, rng.choice(entities))
        else:
            rows = retrieve(fixture_index, effective_query(state).entities)
            if rows:
                assess_document(state, fixture_index, rng.choice(rows).doc_id,
                                rng.choice(list(Verdict)))

    replayed = replay_session(fixture_graph, audit_lines(state).splitlines())
    assert replayed.category_selected == state.category_selected
    assert replayed.entity_selected == state.entity_selected
    assert replayed.doc_assessments == state.doc_assessments

    content = export_corpus(state, fixture_index, include_unjudged=True)
    _, exported_docs, _ = read_export(content.splitlines())
    expected_ids = {
        r.doc_id
        for r in retrieve(fixture_index, effective_query(state).entities)
        if state.doc_assessments.get(r.doc_id, Verdict.UNJUDGED) is not Verdict.IRRELEVANT
    }
    assert {d.doc_id for d in exported_docs} == expected_ids

    for category in categories:
        before = state.category_selected[category]
        toggle_category(state, category)
        toggle_category(state, category)
        assert state.category_selected[category] is before
    for entity in entities:
        before = state.entity_selected[entity]
        toggle_entity(state, entity)
        toggle_entity(state, entity)
        assert state.entity_selected[entity] is before


def test_end_to_end_golden(fixture_graph, fixture_index):
    """Session on the fixture matches the committed oracle-traced golden file."""
    golden = json.loads(GOLDEN_PATH.read_text(encoding="utf-8"))
    state = create_session(
        fixture_graph,
        golden["roots"],
        Period(golden["period"]["start_year"], golden["period"]["end_year"]),
        golden["max_depth"],
    )
    assert sorted(state.tree.categories) == golden["reached_categories"]
    assert ({e: c.value for e, c in state.tree.classes.items()} == golden["classes"])
    assert ({c: d.auto_selected for c, d in state.tree.decisions.items()}
            == golden["category_selected"])
    query = effective_query(state)
    assert query.sorted() == golden["effective_query"]
    rows = retrieve(fixture_index, query.entities)
    assert [r.doc_id for r in rows] == golden["result_doc_ids"]
    assert sorted(missing_entities(state, fixture_index)) == golden["missing_entities"]


class FixtureServer:
    """A real uvicorn server on an ephemeral localhost port."""

    def __init__(self):
        graph = demo_graph()
        from corpusel import build_fixture

        docs, _ = build_fixture(7, 200, graph, demo_mix())
        app = build_app(graph, build_index(docs))
        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        self.port = probe.getsockname()[1]
        probe.close()
        self.server = uvicorn.Server(uvicorn.Config(
            app, host="127.0.0.1", port=self.port, log_level="error",
        ))
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self):
        self.thread.start()
        base = f"http://127.0.0.1:{self.port}"
        deadline = time.time() + 10
        while time.time() < deadline:
            try:
                httpx.get(f"{base}/health", timeout=0.5)
                return base
            except httpx.HTTPError:
                time.sleep(0.05)
        raise RuntimeError("fixture server did not come up")

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=5)


def test_service_contract():
    """Every documented endpoint answers over real HTTP with conformant shapes."""
    with FixtureServer() as base:
        http = httpx.Client(base_url=base, timeout=10)

        def expect_error(response, status, code):
            assert response.status_code == status
            body = response.json()
            assert body["schema_version"] == 1
            assert body["error"]["code"] == code
            assert body["error"]["message"]

        health = http.get("/health").json()
        assert health["schema_version"] == 1 and health["status"] == "ok"
        assert health["documents"] == 200

        matches = http.get("/categories", params={"q": "port"}).json()["matches"]
        assert {"id": "c:northern_ports", "label": "Northern Ports"} in matches

        created = http.post("/sessions", json={
            "roots": ["c:age_of_sail"],
            "period": {"start_year": 1588, "end_year": 1702},
            "max_depth": 5,
        })
        assert created.status_code == 201
        session = created.json()["session"]
        sid = session["id"]
        assert session["result_count"] > 0
        assert session["groups"]

        fetched = http.get(f"/sessions/{sid}").json()["session"]
        assert fetched["effective_query"] == session["effective_query"]

        toggled = http.post(f"/sessions/{sid}/toggle", json={
            "kind": "category", "target": "c:naval_battles",
        }).json()["session"]
        assert toggled["result_count"] != session["result_count"]
        http.post(f"/sessions/{sid}/toggle",
                  json={"kind": "category", "target": "c:naval_battles"})

        results = http.get(f"/sessions/{sid}/results", params={"page": 1}).json()
        assert results["total_documents"] == session["result_count"]
        doc_id = results["documents"][0]["doc_id"]

        assessed = http.post(f"/sessions/{sid}/assess", json={
            "doc_id": doc_id, "verdict": "relevant",
        }).json()
        assert assessed["relevant_count"] == 1

        for dimension in ("year", "party"):
            body = http.get(f"/sessions/{sid}/aggregate",
                            params={"dimension": dimension}).json()
            assert sum(r["documents"] for r in body["rows"]) == session["result_count"]

        missing = http.get(f"/sessions/{sid}/missing").json()["missing_entities"]
        assert "e:fogbay" in missing

        export = http.post(f"/sessions/{sid}/export", json={"include_unjudged": False})
        assert export.status_code == 200
        header, docs, _ = read_export(export.text.splitlines())
        assert header["session_id"] == sid
        assert {d.doc_id for d in docs} == {doc_id}

        expect_error(http.get("/sessions/ghost"), 404, "not_found")
        expect_error(http.post("/sessions", json={
            "roots": ["c:ghost"], "period": {"start_year": 1600, "end_year": 1700},
        }), 404, "not_found")
        expect_error(http.post("/sessions", json={
            "roots": ["c:age_of_sail"],
            "period": {"start_year": 1700, "end_year": 1600},
        }), 400, "invalid_input")
        expect_error(http.post(f"/sessions/{sid}/toggle",
                               json={"kind": "nonsense", "target": "x"}),
                     400, "invalid_input")
        expect_error(http.get(f"/sessions/{sid}/aggregate",
                              params={"dimension": "speaker"}),
                     400, "invalid_input")
        all_ids = {f"doc-{i:04d}" for i in range(200)}
        hit_ids = set()
        page_no = 1
        while True:
            body = http.get(f"/sessions/{sid}/results", params={"page": page_no}).json()
            if not body["documents"]:
                break
            hit_ids |= {d["doc_id"] for d in body["documents"]}
            page_no += 1
        outside = sorted(all_ids - hit_ids)[0]
        expect_error(http.post(f"/sessions/{sid}/assess",
                               json={"doc_id": outside, "verdict": "relevant"}),
                     409, "conflict")
        http.close()
