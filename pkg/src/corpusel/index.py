"""Entity-centric retrieval over the corpus.

Queries are OR-semantics over an entity set: any mention of any queried
entity makes a document a hit. Zero-hit entities are first-class output, not
an error, because absence is itself evidence. Results are ordered
chronologically (newest first) rather than by relevance score.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date as Date
from typing import Iterable

from .errors import DuplicateIdError, RecordError
from .ingest import AnnotatedDocument, DocId, document_to_record, parse_record
from .kb_graph import EntityId
from .temporal_filter import Period

DEFAULT_PREVIEW_WINDOW = 150
DEFAULT_PREVIEW_LIMIT = 3

SNAPSHOT_FORMAT = "corpusel-index"
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class EntityFrequency:
    documents: int
    mentions: int

    @property
    def absent(self) -> bool:
        return self.mentions == 0


@dataclass(frozen=True)
class FrequencyReport:
    """One row per queried entity, zero-count entities included."""

    rows: dict[EntityId, EntityFrequency]

    @property
    def absent_entities(self) -> frozenset[EntityId]:
        return frozenset(e for e, row in self.rows.items() if row.absent)


@dataclass(frozen=True)
class PreviewSnippet:
    doc_id: DocId
    entity: EntityId
    snippet: str
    mention_offset: int


@dataclass(frozen=True)
class RetrievedDoc:
    doc_id: DocId
    matched_entities: frozenset[EntityId]
    mention_count: int


class CorpusIndex:
    """Immutable after build; rebuilds replace the whole object."""

    def __init__(self, docs: Iterable[AnnotatedDocument]):
        self.doc_store: dict[DocId, AnnotatedDocument] = {}
        postings: dict[EntityId, dict[DocId, list[int]]] = {}
        by_date: dict[Date, set[DocId]] = {}
        by_party: dict[str, set[DocId]] = {}
        for doc in docs:
            if doc.doc_id in self.doc_store:
                raise DuplicateIdError(doc.doc_id)
            self.doc_store[doc.doc_id] = doc
            by_date.setdefault(doc.date, set()).add(doc.doc_id)
            by_party.setdefault(doc.party, set()).add(doc.doc_id)
            for ann in doc.annotations:
                postings.setdefault(ann.entity, {}).setdefault(doc.doc_id, []).append(ann.begin)
        # doc ids ascending within a posting, offsets ascending within a doc
        self.postings: dict[EntityId, list[tuple[DocId, list[int]]]] = {
            entity: [(doc_id, sorted(offsets)) for doc_id, offsets in sorted(docs_map.items())]
            for entity, docs_map in sorted(postings.items())
        }
        self.by_date = {d: frozenset(ids) for d, ids in by_date.items()}
        self.by_party = {p: frozenset(ids) for p, ids in by_party.items()}

    @property
    def n_documents(self) -> int:
        return len(self.doc_store)

    def _doc_order_key(self, doc_id: DocId) -> tuple:
        # newest first, then doc_id ascending for a stable total order
        return (-self.doc_store[doc_id].date.toordinal(), doc_id)


def build_index(docs: Iterable[AnnotatedDocument]) -> CorpusIndex:
    return CorpusIndex(docs)


def frequencies(index: CorpusIndex, entities: Iterable[EntityId]) -> FrequencyReport:
    """Document and mention counts for every queried entity, present or not."""
    rows = {}
    for entity in sorted(set(entities)):
        posting = index.postings.get(entity, [])
        rows[entity] = EntityFrequency(
            documents=len(posting),
            mentions=sum(len(offsets) for _, offsets in posting),
        )
    return FrequencyReport(rows=rows)


def _snippet_bounds(text: str, begin: int, end: int, window: int) -> tuple[int, int]:
    """Window bounds that stay on word boundaries without cutting the mention."""
    left = max(0, begin - window)
    if left > 0 and not text[left - 1].isspace() and not text[left].isspace():
        while left < begin and not text[left].isspace():
            left += 1
    while left < begin and text[left].isspace():
        left += 1
    right = min(len(text), end + window)
    if right < len(text) and not text[right].isspace() and not text[right - 1].isspace():
        while right > end and not text[right - 1].isspace():
            right -= 1
    while right > end and text[right - 1].isspace():
        right -= 1
    return left, right


def preview(
    index: CorpusIndex,
    entities: Iterable[EntityId],
    per_entity_limit: int = DEFAULT_PREVIEW_LIMIT,
    window: int = DEFAULT_PREVIEW_WINDOW,
) -> list[PreviewSnippet]:
    """Up to per_entity_limit context snippets per entity, newest documents first.

    The window is the code-point budget on each side of the mention; edges are
    pulled in to word boundaries, so the surface form always survives intact.
    """
    if per_entity_limit < 1:
        raise ValueError(f"per_entity_limit must be positive, got {per_entity_limit}")
    if window < 1:
        raise ValueError(f"window must be positive, got {window}")
    snippets = []
    for entity in sorted(set(entities)):
        posting = index.postings.get(entity, [])
        remaining = per_entity_limit
        for doc_id, offsets in sorted(posting, key=lambda p: index._doc_order_key(p[0])):
            if remaining == 0:
                break
            doc = index.doc_store[doc_id]
            surface_by_offset = {a.begin: a for a in doc.annotations if a.entity == entity}
            for offset in offsets:
                if remaining == 0:
                    break
                ann = surface_by_offset[offset]
                left, right = _snippet_bounds(doc.text, ann.begin, ann.end, window)
                snippets.append(PreviewSnippet(
                    doc_id=doc_id, entity=entity,
                    snippet=doc.text[left:right], mention_offset=offset,
                ))
                remaining -= 1
    return snippets


def retrieve(
    index: CorpusIndex,
    entities: Iterable[EntityId],
    date_filter: Period | None = None,
) -> list[RetrievedDoc]:
    """Documents mentioning at least one queried entity, each listed once.

    Ordered by (date descending, doc_id ascending); date_filter keeps only
    documents whose calendar year falls inside the period.
    """
    entities = set(entities)
    matched: dict[DocId, dict[EntityId, int]] = {}
    for entity in entities:
        for doc_id, offsets in index.postings.get(entity, []):
            matched.setdefault(doc_id, {})[entity] = len(offsets)
    results = []
    for doc_id in sorted(matched, key=index._doc_order_key):
        if date_filter is not None and index.doc_store[doc_id].year not in date_filter:
            continue
        per_entity = matched[doc_id]
        results.append(RetrievedDoc(
            doc_id=doc_id,
            matched_entities=frozenset(per_entity),
            mention_count=sum(per_entity.values()),
        ))
    return results


AGGREGATE_DIMENSIONS = ("year", "party")


def aggregate(
    index: CorpusIndex,
    entities: Iterable[EntityId],
    dimension: str,
) -> dict[object, tuple[int, int]]:
    """Group the retrieve result by document year or party.

    Values are (documents, mentions) per key. Every document carries exactly
    one year and one party, so document counts across keys sum to the size of
    the retrieve result.
    """
    if dimension not in AGGREGATE_DIMENSIONS:
        raise ValueError(f"unsupported dimension {dimension!r}, expected one of {AGGREGATE_DIMENSIONS}")
    rows = retrieve(index, entities)
    grouped: dict[object, list[int]] = {}
    for row in rows:
        doc = index.doc_store[row.doc_id]
        key = doc.year if dimension == "year" else doc.party
        cell = grouped.setdefault(key, [0, 0])
        cell[0] += 1
        cell[1] += row.mention_count
    assert sum(cell[0] for cell in grouped.values()) == len(rows)
    # keys are homogeneous per dimension (all ints or all strs), so plain sort works
    return {key: (cell[0], cell[1]) for key, cell in sorted(grouped.items())}


def save_snapshot(index: CorpusIndex, path) -> None:
    """Persist the index as a versioned snapshot (documents; postings are derived)."""
    payload = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "documents": [document_to_record(index.doc_store[doc_id])
                      for doc_id in sorted(index.doc_store)],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
        fh.write("\n")


def load_snapshot(path) -> CorpusIndex:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or payload.get("format") != SNAPSHOT_FORMAT:
        raise RecordError(f"not a {SNAPSHOT_FORMAT} snapshot: {path}")
    if payload.get("version") != SNAPSHOT_VERSION:
        raise RecordError(f"unsupported snapshot version {payload.get('version')!r}")
    docs = [parse_record(raw)[0] for raw in payload.get("documents", [])]
    return build_index(docs)
