"""CLI subcommands: exit codes, emitted files, environment fallbacks."""
from __future__ import annotations

import pytest

from corpusel import (
    build_index,
    create_session,
    demo_graph,
    effective_query,
    frequencies,
    load_snapshot,
    parse_corpus,
    read_export,
    retrieve,
    toggle_category,
    Period,
)
from corpusel.cli import main
from corpusel.session import assess_document, write_audit


@pytest.fixture(scope="module")
def demo_dir(tmp_path_factory):
    """A generated demo dataset: graph TSVs, corpus, truth."""
    out = tmp_path_factory.mktemp("demo")
    assert main(["gen-fixture", "--seed", "7", "--docs", "60", "--out", str(out)]) == 0
    return out


class TestGenFixture:
    def test_writes_graph_and_corpus(self, demo_dir):
        for name in ("nodes.tsv", "edges.tsv", "corpus.jsonl", "truth.json"):
            assert (demo_dir / name).exists()
        with open(demo_dir / "corpus.jsonl", encoding="utf-8") as fh:
            docs, warnings = parse_corpus(fh)
        assert len(docs) == 60
        assert warnings == []

    def test_same_seed_twice_identical(self, tmp_path):
        for run in ("a", "b"):
            assert main(["gen-fixture", "--seed", "7", "--docs", "25",
                         "--out", str(tmp_path / run)]) == 0
        assert ((tmp_path / "a" / "corpus.jsonl").read_bytes()
                == (tmp_path / "b" / "corpus.jsonl").read_bytes())
        assert ((tmp_path / "a" / "truth.json").read_bytes()
                == (tmp_path / "b" / "truth.json").read_bytes())


class TestLoadGraph:
    def test_valid_graph_reports_counts(self, demo_dir, capsys):
        code = main(["load-graph", "--graph-nodes", str(demo_dir / "nodes.tsv"),
                     "--graph-edges", str(demo_dir / "edges.tsv")])
        assert code == 0
        out = capsys.readouterr().out
        assert "9 categories" in out and "19 entities" in out

    def test_dangling_edge_fails_with_line(self, demo_dir, tmp_path, capsys):
        bad_edges = tmp_path / "edges.tsv"
        original = (demo_dir / "edges.tsv").read_text(encoding="utf-8")
        bad_edges.write_text(original + "e:ghost\tmember_of\tc:age_of_sail\n",
                             encoding="utf-8")
        code = main(["load-graph", "--graph-nodes", str(demo_dir / "nodes.tsv"),
                     "--graph-edges", str(bad_edges)])
        assert code == 1
        err = capsys.readouterr().err
        assert "line" in err and "e:ghost" in err

    def test_missing_flag_fails(self, capsys):
        assert main(["load-graph"]) == 1
        assert "--graph-nodes" in capsys.readouterr().err

    def test_env_var_fallback(self, demo_dir, monkeypatch, capsys):
        monkeypatch.setenv("CORPUSEL_GRAPH_NODES", str(demo_dir / "nodes.tsv"))
        monkeypatch.setenv("CORPUSEL_GRAPH_EDGES", str(demo_dir / "edges.tsv"))
        assert main(["load-graph"]) == 0
        assert "19 entities" in capsys.readouterr().out


class TestBuildIndex:
    def test_snapshot_roundtrip_answers_identical_queries(self, demo_dir, tmp_path):
        snapshot = tmp_path / "index.json"
        code = main(["build-index", "--corpus", str(demo_dir / "corpus.jsonl"),
                     "--out", str(snapshot)])
        assert code == 0
        with open(demo_dir / "corpus.jsonl", encoding="utf-8") as fh:
            docs, _ = parse_corpus(fh)
        in_memory = build_index(docs)
        reloaded = load_snapshot(snapshot)
        entities = sorted(demo_graph().entities)
        assert frequencies(reloaded, entities) == frequencies(in_memory, entities)

    def test_missing_corpus_fails(self, tmp_path, capsys):
        assert main(["build-index", "--corpus", str(tmp_path / "nope.jsonl"),
                     "--out", str(tmp_path / "out.json")]) == 1
        assert "error" in capsys.readouterr().err


class TestExportSession:
    def test_replay_and_export(self, demo_dir, tmp_path):
        graph = demo_graph()
        with open(demo_dir / "corpus.jsonl", encoding="utf-8") as fh:
            docs, _ = parse_corpus(fh)
        index = build_index(docs)
        state = create_session(graph, {"c:age_of_sail"}, Period(1550, 1900))
        toggle_category(state, "c:naval_battles")
        rows = retrieve(index, effective_query(state).entities)
        assess_document(state, index, rows[0].doc_id, "relevant")
        audit_path = tmp_path / "audit.jsonl"
        write_audit(state, audit_path)

        out_path = tmp_path / "export.jsonl"
        code = main(["export-session",
                     "--graph-nodes", str(demo_dir / "nodes.tsv"),
                     "--graph-edges", str(demo_dir / "edges.tsv"),
                     "--corpus", str(demo_dir / "corpus.jsonl"),
                     "--audit", str(audit_path),
                     "--out", str(out_path)])
        assert code == 0
        header, exported, _ = read_export(
            out_path.read_text(encoding="utf-8").splitlines())
        assert header["session_id"] == state.session_id
        assert {d.doc_id for d in exported} == {rows[0].doc_id}

    def test_include_unjudged_flag(self, demo_dir, tmp_path):
        graph = demo_graph()
        state = create_session(graph, {"c:age_of_sail"}, Period(1550, 1900))
        audit_path = tmp_path / "audit.jsonl"
        write_audit(state, audit_path)
        out_path = tmp_path / "export.jsonl"
        code = main(["export-session",
                     "--graph-nodes", str(demo_dir / "nodes.tsv"),
                     "--graph-edges", str(demo_dir / "edges.tsv"),
                     "--corpus", str(demo_dir / "corpus.jsonl"),
                     "--audit", str(audit_path),
                     "--include-unjudged",
                     "--out", str(out_path)])
        assert code == 0
        header, exported, _ = read_export(
            out_path.read_text(encoding="utf-8").splitlines())
        assert header["include_unjudged"] is True
        assert len(exported) == header["document_count"] > 0


class TestReport:
    def test_report_writes_tables_and_figures(self, demo_dir, tmp_path):
        out_dir = tmp_path / "report"
        code = main(["report", "--corpus", str(demo_dir / "corpus.jsonl"),
                     "--entities", "e:united_spice_company,e:tariff_wars,e:fogbay",
                     "--out", str(out_dir)])
        assert code == 0
        for name in ("frequencies.csv", "aggregate_by_year.csv", "aggregate_by_year.png",
                     "aggregate_by_party.csv", "aggregate_by_party.png"):
            assert (out_dir / name).exists(), name
        freq_lines = (out_dir / "frequencies.csv").read_text().strip().splitlines()
        assert freq_lines[0] == "entity,documents,mentions,absent"
        assert len(freq_lines) == 4
        assert any(line.startswith("e:fogbay,0,0,true") for line in freq_lines)
        assert (out_dir / "aggregate_by_year.png").stat().st_size > 0

    def test_report_from_audit(self, demo_dir, tmp_path):
        state = create_session(demo_graph(), {"c:age_of_sail"}, Period(1550, 1900))
        audit_path = tmp_path / "audit.jsonl"
        write_audit(state, audit_path)
        out_dir = tmp_path / "report"
        code = main(["report", "--corpus", str(demo_dir / "corpus.jsonl"),
                     "--graph-nodes", str(demo_dir / "nodes.tsv"),
                     "--graph-edges", str(demo_dir / "edges.tsv"),
                     "--audit", str(audit_path),
                     "--out", str(out_dir)])
        assert code == 0
        assert (out_dir / "frequencies.csv").exists()

    def test_report_without_entity_source_fails(self, demo_dir, tmp_path, capsys):
        assert main(["report", "--corpus", str(demo_dir / "corpus.jsonl"),
                     "--out", str(tmp_path / "r")]) == 1
        assert "entities" in capsys.readouterr().err


class TestServe:
    def test_missing_data_fails_cleanly(self, tmp_path, capsys):
        assert main(["serve", "--graph-nodes", str(tmp_path / "n.tsv"),
                     "--graph-edges", str(tmp_path / "e.tsv"),
                     "--corpus", str(tmp_path / "c.jsonl")]) == 1
        assert "error" in capsys.readouterr().err
