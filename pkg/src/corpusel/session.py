"""Reversible query sculpting over a candidate tree, with a replayable audit log.

Every decision (selection toggles, document verdicts) is appended to the
session's audit log with its prior state, so the full override and assessment
maps can be reconstructed by replay and nothing the user does is lost. The
machine's initial judgment is only a default: out-of-period entities start
deselected but stay in the tree, and any choice can be reversed.
"""
from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable

from .errors import ConflictError, RecordError, UnknownIdError
from .index import CorpusIndex, frequencies, retrieve
from .ingest import AnnotatedDocument, DocId, document_to_record, parse_record
from .kb_graph import DEFAULT_MAX_DEPTH, CategoryId, EntityId, KnowledgeGraph
from .temporal_filter import CandidateTree, Period, TemporalClass, candidate_set

EXPORT_KIND = "corpusel-export"
EXPORT_VERSION = 1


class Verdict(Enum):
    RELEVANT = "relevant"
    IRRELEVANT = "irrelevant"
    UNJUDGED = "unjudged"


@dataclass(frozen=True)
class AuditRecord:
    ts: str
    session_id: str
    action: str  # create_session | toggle_category | toggle_entity | assess_document
    target: str | None
    prior: object
    new: object
    reason: str | None = None

    def to_json(self) -> str:
        record = {
            "ts": self.ts, "session_id": self.session_id, "action": self.action,
            "target": self.target, "prior": self.prior, "new": self.new,
        }
        if self.reason is not None:
            record["reason"] = self.reason
        return json.dumps(record, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str, line_no: int | None = None) -> "AuditRecord":
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(f"invalid JSON: {exc.msg}", line_no) from None
        for name in ("ts", "session_id", "action", "target", "prior", "new"):
            if name not in raw:
                raise RecordError(f"audit record missing field {name!r}", line_no)
        return cls(ts=raw["ts"], session_id=raw["session_id"], action=raw["action"],
                   target=raw["target"], prior=raw["prior"], new=raw["new"],
                   reason=raw.get("reason"))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass
class SessionState:
    session_id: str
    roots: tuple[CategoryId, ...]
    period: Period
    max_depth: int
    tree: CandidateTree
    category_selected: dict[CategoryId, bool]
    entity_selected: dict[EntityId, bool]
    doc_assessments: dict[DocId, Verdict] = field(default_factory=dict)
    audit_log: list[AuditRecord] = field(default_factory=list)

    @property
    def category_overrides(self) -> dict[CategoryId, str]:
        """Categories whose selection differs from the machine default."""
        return {
            c: ("selected" if sel else "deselected")
            for c, sel in sorted(self.category_selected.items())
            if sel != self.tree.decisions[c].auto_selected
        }

    @property
    def entity_overrides(self) -> dict[EntityId, str]:
        return {
            e: ("selected" if sel else "deselected")
            for e, sel in sorted(self.entity_selected.items())
            if sel != (self.tree.classes[e] is not TemporalClass.OUT_OF_PERIOD)
        }


@dataclass(frozen=True)
class EffectiveQuery:
    entities: frozenset[EntityId]

    def sorted(self) -> list[EntityId]:
        return sorted(self.entities)

    def __len__(self) -> int:
        return len(self.entities)

    def __contains__(self, entity: EntityId) -> bool:
        return entity in self.entities


def create_session(
    graph: KnowledgeGraph,
    roots: Iterable[CategoryId],
    period: Period,
    max_depth: int = DEFAULT_MAX_DEPTH,
    session_id: str | None = None,
) -> SessionState:
    """Expand roots, classify and prune, and seed the default selections.

    Initial selections follow the machine's judgment: categories keep their
    auto_selected decision; in-period, borderline, and undated entities start
    selected while out-of-period entities start deselected.
    """
    roots = tuple(sorted(set(roots)))
    if not roots:
        raise ValueError("at least one root category is required")
    tree = candidate_set(graph, roots, period, max_depth)
    state = SessionState(
        session_id=session_id or uuid.uuid4().hex,
        roots=roots,
        period=period,
        max_depth=max_depth,
        tree=tree,
        category_selected={c: d.auto_selected for c, d in tree.decisions.items()},
        entity_selected={
            e: cls is not TemporalClass.OUT_OF_PERIOD for e, cls in tree.classes.items()
        },
    )
    state.audit_log.append(AuditRecord(
        ts=_now(), session_id=state.session_id, action="create_session",
        target=None, prior=None,
        new={
            "roots": list(roots),
            "period": {"start_year": period.start_year, "end_year": period.end_year},
            "max_depth": max_depth,
        },
    ))
    return state


def _flag_name(selected: bool) -> str:
    return "selected" if selected else "deselected"


def toggle_category(state: SessionState, category: CategoryId,
                    reason: str | None = None) -> SessionState:
    if category not in state.category_selected:
        raise UnknownIdError(category, f"category {category!r} is not in the candidate tree")
    prior = state.category_selected[category]
    state.category_selected[category] = not prior
    state.audit_log.append(AuditRecord(
        ts=_now(), session_id=state.session_id, action="toggle_category",
        target=category, prior=_flag_name(prior), new=_flag_name(not prior), reason=reason,
    ))
    return state


def toggle_entity(state: SessionState, entity: EntityId,
                  reason: str | None = None) -> SessionState:
    if entity not in state.entity_selected:
        raise UnknownIdError(entity, f"entity {entity!r} is not in the candidate tree")
    prior = state.entity_selected[entity]
    state.entity_selected[entity] = not prior
    state.audit_log.append(AuditRecord(
        ts=_now(), session_id=state.session_id, action="toggle_entity",
        target=entity, prior=_flag_name(prior), new=_flag_name(not prior), reason=reason,
    ))
    return state


def effective_query(state: SessionState) -> EffectiveQuery:
    """Entities that are themselves selected AND sit under a selected category."""
    included = set()
    for category, members in state.tree.memberships.items():
        if not state.category_selected[category]:
            continue
        for entity in members:
            if state.entity_selected[entity]:
                included.add(entity)
    return EffectiveQuery(entities=frozenset(included))


def assess_document(
    state: SessionState,
    index: CorpusIndex,
    doc_id: DocId,
    verdict: Verdict | str,
    reason: str | None = None,
) -> SessionState:
    """Record a relevance verdict for a document in the current result set."""
    if isinstance(verdict, str):
        try:
            verdict = Verdict(verdict)
        except ValueError:
            raise ValueError(f"unknown verdict {verdict!r}") from None
    if doc_id not in index.doc_store:
        raise UnknownIdError(doc_id, f"unknown document: {doc_id!r}")
    current_ids = {row.doc_id for row in retrieve(index, effective_query(state).entities)}
    if doc_id not in current_ids:
        raise ConflictError(f"document {doc_id!r} is not retrieved by the current query")
    prior = state.doc_assessments.get(doc_id, Verdict.UNJUDGED)
    state.doc_assessments[doc_id] = verdict
    state.audit_log.append(AuditRecord(
        ts=_now(), session_id=state.session_id, action="assess_document",
        target=doc_id, prior=prior.value, new=verdict.value, reason=reason,
    ))
    return state


def missing_entities(state: SessionState, index: CorpusIndex) -> set[EntityId]:
    """Entities the final query asks for that the corpus never mentions."""
    query = effective_query(state)
    report = frequencies(index, query.entities)
    return {e for e, row in report.rows.items() if row.mentions == 0}


def audit_lines(state: SessionState) -> str:
    return "".join(record.to_json() + "\n" for record in state.audit_log)


def audit_digest(state: SessionState) -> str:
    return hashlib.sha256(audit_lines(state).encode("utf-8")).hexdigest()


def write_audit(state: SessionState, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(audit_lines(state))


def replay_session(graph: KnowledgeGraph, lines: Iterable[str]) -> SessionState:
    """Reconstruct a session from its audit log.

    The log is the system's own record, so recorded decisions are applied
    as-is (no retrievability re-checks); targets must still exist in the tree.
    """
    records = []
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if line:
            records.append(AuditRecord.from_json(line, line_no))
    if not records or records[0].action != "create_session":
        raise RecordError("audit log must start with a create_session record", 1)
    head = records[0]
    params = head.new
    if not isinstance(params, dict):
        raise RecordError("create_session record carries no parameters", 1)
    period = Period(params["period"]["start_year"], params["period"]["end_year"])
    state = create_session(
        graph, params["roots"], period, params["max_depth"], session_id=head.session_id,
    )
    for i, record in enumerate(records[1:], start=2):
        if record.action == "toggle_category":
            if record.target not in state.category_selected:
                raise RecordError(f"unknown category {record.target!r}", i)
            state.category_selected[record.target] = record.new == "selected"
        elif record.action == "toggle_entity":
            if record.target not in state.entity_selected:
                raise RecordError(f"unknown entity {record.target!r}", i)
            state.entity_selected[record.target] = record.new == "selected"
        elif record.action == "assess_document":
            state.doc_assessments[record.target] = Verdict(record.new)
        else:
            raise RecordError(f"unknown audit action {record.action!r}", i)
    state.audit_log = records
    return state


def export_corpus(
    state: SessionState,
    index: CorpusIndex,
    include_unjudged: bool = False,
) -> str:
    """Render the final corpus as JSON lines: a provenance header, then documents.

    Documents come from the effective query's result set; relevant ones are
    always included, unjudged ones only on request, irrelevant ones never.
    """
    query = effective_query(state)
    rows = retrieve(index, query.entities)
    exported = []
    for row in rows:
        verdict = state.doc_assessments.get(row.doc_id, Verdict.UNJUDGED)
        if verdict is Verdict.IRRELEVANT:
            continue
        if verdict is Verdict.UNJUDGED and not include_unjudged:
            continue
        exported.append((row, verdict))
    header = {
        "kind": EXPORT_KIND,
        "export_version": EXPORT_VERSION,
        "session_id": state.session_id,
        "roots": list(state.roots),
        "period": {"start_year": state.period.start_year, "end_year": state.period.end_year},
        "max_depth": state.max_depth,
        "include_unjudged": include_unjudged,
        "selected_categories": sorted(c for c, s in state.category_selected.items() if s),
        "selected_entities": sorted(e for e, s in state.entity_selected.items() if s),
        "effective_query": query.sorted(),
        "document_count": len(exported),
        "audit_digest": audit_digest(state),
    }
    lines = [json.dumps(header, ensure_ascii=False)]
    for row, verdict in exported:
        record = document_to_record(index.doc_store[row.doc_id])
        record["verdict"] = verdict.value
        record["matched_entities"] = sorted(row.matched_entities)
        record["mention_count"] = row.mention_count
        lines.append(json.dumps(record, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)


def read_export(
    lines: Iterable[str],
) -> tuple[dict, list[AnnotatedDocument], dict[DocId, dict]]:
    """Parse an export file back into (header, documents, per-doc extras)."""
    header = None
    documents = []
    extras = {}
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(f"invalid JSON: {exc.msg}", line_no) from None
        if header is None:
            if not isinstance(raw, dict) or raw.get("kind") != EXPORT_KIND:
                raise RecordError("export must start with a header record", line_no)
            header = raw
            continue
        doc, _ = parse_record(raw, line_no)
        documents.append(doc)
        extras[doc.doc_id] = {
            "verdict": raw.get("verdict"),
            "matched_entities": raw.get("matched_entities", []),
            "mention_count": raw.get("mention_count"),
        }
    if header is None:
        raise RecordError("empty export file")
    return header, documents, extras
