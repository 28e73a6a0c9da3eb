"""Category/entity knowledge graph: loading, reverse traversal, temporal clues.

The graph holds two node kinds (categories and entities) and two edge kinds:
``member_of`` links an entity to a category it belongs to, ``broader`` links a
category to its parent category. Query expansion walks ``broader`` edges in
reverse (parent to narrower) and then collects member entities.

Temporal clues (years and year intervals mentioned in an entity's description)
are extracted once at load time and cached on the entity node.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import DuplicateIdError, RecordError, UnknownIdError

CategoryId = str
EntityId = str

YEAR_MIN = 1000
YEAR_MAX = 2099
DEFAULT_MAX_DEPTH = 5

# Standalone 3-4 digit runs; the range check below leaves only plausible years.
_YEAR_RE = re.compile(r"(?<![0-9])[0-9]{3,4}(?![0-9])")
# Two year tokens joined by a hyphen, en-dash or em-dash with no spaces around it.
_INTERVAL_RE = re.compile(r"(?<![0-9])([0-9]{3,4})[-–—]([0-9]{3,4})(?![0-9])")


class EdgeKind(Enum):
    MEMBER_OF = "member_of"
    BROADER = "broader"


@dataclass(frozen=True)
class TemporalClues:
    """Years and year intervals mentioned in an entity description."""

    years: frozenset[int] = frozenset()
    intervals: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "years", frozenset(self.years))
        object.__setattr__(self, "intervals", frozenset(self.intervals))
        for start, end in self.intervals:
            if start > end:
                raise ValueError(f"interval start {start} > end {end}")

    @property
    def is_empty(self) -> bool:
        return not self.years and not self.intervals


@dataclass(frozen=True)
class EntityNode:
    id: EntityId
    label: str = ""
    description: str = ""
    clues: TemporalClues = TemporalClues()


Edge = tuple[str, EdgeKind, str]


@dataclass
class KnowledgeGraph:
    """Immutable after construction; safe for concurrent readers.

    ``narrower`` and ``members`` are the reverse adjacency of ``broader`` and
    ``member_of`` edges, which is the direction query expansion walks.
    """

    categories: dict[CategoryId, str]  # id -> label
    entities: dict[EntityId, EntityNode]
    edges: frozenset[Edge]
    narrower: dict[CategoryId, frozenset[CategoryId]] = field(default_factory=dict)
    members: dict[CategoryId, frozenset[EntityId]] = field(default_factory=dict)

    def __post_init__(self):
        narrower: dict[CategoryId, set[CategoryId]] = {c: set() for c in self.categories}
        members: dict[CategoryId, set[EntityId]] = {c: set() for c in self.categories}
        for source, kind, target in self.edges:
            if kind is EdgeKind.BROADER:
                narrower[target].add(source)
            else:
                members[target].add(source)
        self.narrower = {c: frozenset(s) for c, s in narrower.items()}
        self.members = {c: frozenset(s) for c, s in members.items()}

    @property
    def n_nodes(self) -> int:
        return len(self.categories) + len(self.entities)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return (
            self.categories == other.categories
            and self.entities == other.entities
            and self.edges == other.edges
        )


def extract_clues(description: str) -> TemporalClues:
    """Pull year mentions out of free text.

    Years are standalone 3-4 digit tokens in [1000, 2099]; digits embedded in
    a longer run (ISBNs, phone numbers) never match. Dash-joined year pairs
    with start <= end are intervals; their endpoints also count as years.
    """
    years = {
        int(token)
        for token in _YEAR_RE.findall(description)
        if YEAR_MIN <= int(token) <= YEAR_MAX
    }
    intervals = set()
    for start_tok, end_tok in _INTERVAL_RE.findall(description):
        start, end = int(start_tok), int(end_tok)
        if YEAR_MIN <= start <= YEAR_MAX and YEAR_MIN <= end <= YEAR_MAX and start <= end:
            intervals.add((start, end))
            years.add(start)
            years.add(end)
    return TemporalClues(years=frozenset(years), intervals=frozenset(intervals))


_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\\\": "\\", "\\t": "\t", "\\n": "\n", "\\r": "\r"}
_UNESCAPE_RE = re.compile(r"\\[\\tnr]")


def _escape_field(value: str) -> str:
    for raw, escaped in _ESCAPES.items():
        value = value.replace(raw, escaped)
    return value


def _unescape_field(value: str) -> str:
    return _UNESCAPE_RE.sub(lambda m: _UNESCAPES[m.group(0)], value)


def load_graph(nodes_source: Iterable[str], edges_source: Iterable[str]) -> KnowledgeGraph:
    """Load and validate a graph from the tab-separated node/edge streams.

    Raises RecordError (with line number) on malformed records and edges that
    reference undeclared nodes or connect the wrong node kinds, and
    DuplicateIdError when a node id occurs twice.
    """
    categories: dict[CategoryId, str] = {}
    entities: dict[EntityId, EntityNode] = {}

    for line_no, line in enumerate(nodes_source, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = [_unescape_field(f) for f in line.split("\t")]
        kind = fields[0]
        if kind == "C":
            if len(fields) != 3:
                raise RecordError(
                    f"category record needs 3 fields, got {len(fields)}", line_no
                )
            _, node_id, label = fields
            description = ""
        elif kind == "E":
            if len(fields) != 4:
                raise RecordError(
                    f"entity record needs 4 fields, got {len(fields)}", line_no
                )
            _, node_id, label, description = fields
        else:
            raise RecordError(f"unknown node kind {kind!r}", line_no)
        if not node_id:
            raise RecordError("empty node id", line_no)
        if node_id in categories or node_id in entities:
            raise DuplicateIdError(node_id, f"line {line_no}: duplicate node id {node_id!r}")
        if kind == "C":
            categories[node_id] = label
        else:
            entities[node_id] = EntityNode(
                id=node_id, label=label, description=description,
                clues=extract_clues(description),
            )

    edges: set[Edge] = set()
    for line_no, line in enumerate(edges_source, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = [_unescape_field(f) for f in line.split("\t")]
        if len(fields) != 3:
            raise RecordError(f"edge record needs 3 fields, got {len(fields)}", line_no)
        source, kind_name, target = fields
        try:
            kind = EdgeKind(kind_name)
        except ValueError:
            raise RecordError(f"unknown edge kind {kind_name!r}", line_no) from None
        for endpoint in (source, target):
            if endpoint not in categories and endpoint not in entities:
                raise RecordError(f"edge references unknown node {endpoint!r}", line_no)
        if kind is EdgeKind.MEMBER_OF:
            if source not in entities or target not in categories:
                raise RecordError(
                    "member_of must link an entity to a category", line_no
                )
        else:
            if source not in categories or target not in categories:
                raise RecordError(
                    "broader must link a category to a category", line_no
                )
        edges.add((source, kind, target))

    return KnowledgeGraph(categories=categories, entities=entities, edges=frozenset(edges))


def serialize_graph(graph: KnowledgeGraph) -> tuple[str, str]:
    """Render (nodes_text, edges_text) that load_graph reads back identically."""
    node_lines = [
        "\t".join(("C", _escape_field(cid), _escape_field(label)))
        for cid, label in sorted(graph.categories.items())
    ]
    node_lines += [
        "\t".join(
            ("E", _escape_field(e.id), _escape_field(e.label), _escape_field(e.description))
        )
        for _, e in sorted(graph.entities.items())
    ]
    edge_lines = [
        "\t".join((_escape_field(s), k.value, _escape_field(t)))
        for s, k, t in sorted(graph.edges, key=lambda e: (e[0], e[1].value, e[2]))
    ]
    nodes_text = "".join(line + "\n" for line in node_lines)
    edges_text = "".join(line + "\n" for line in edge_lines)
    return nodes_text, edges_text


def descendant_depths(
    graph: KnowledgeGraph, roots: Iterable[CategoryId], max_depth: int = DEFAULT_MAX_DEPTH
) -> dict[CategoryId, int]:
    """Map each reachable category to the minimum depth at which it is reached.

    Walks broader edges in reverse (parent to narrower), breadth-first with a
    visited set, so cycles terminate. Roots sit at depth 0 and are included.
    """
    if max_depth < 1:
        raise ValueError(f"max_depth must be positive, got {max_depth}")
    roots = set(roots)
    for root in roots:
        if root not in graph.categories:
            raise UnknownIdError(root, f"unknown root category: {root!r}")
    depths = {root: 0 for root in roots}
    frontier = deque(depths.items())
    while frontier:
        category, depth = frontier.popleft()
        if depth == max_depth:
            continue
        for child in graph.narrower[category]:
            if child not in depths:
                depths[child] = depth + 1
                frontier.append((child, depth + 1))
    return depths


def descendant_categories(
    graph: KnowledgeGraph, roots: Iterable[CategoryId], max_depth: int = DEFAULT_MAX_DEPTH
) -> set[CategoryId]:
    """Categories reachable from any root in at most max_depth reverse hops."""
    return set(descendant_depths(graph, roots, max_depth))


def member_entities(
    graph: KnowledgeGraph, categories: Iterable[CategoryId]
) -> dict[CategoryId, frozenset[EntityId]]:
    """Member entities per category; an entity may appear under several keys."""
    result = {}
    for category in categories:
        if category not in graph.categories:
            raise UnknownIdError(category, f"unknown category: {category!r}")
        result[category] = graph.members[category]
    return result
