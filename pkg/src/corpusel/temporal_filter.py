"""Temporal classification of entities and majority-rule category pruning.

Given a target period, each entity's cached clues place it in one of four
classes: in-period, out-of-period, borderline, or undated. Categories whose
dated members are mostly out-of-period get deselected up front; everything
stays visible so the user can reverse any machine judgment.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from enum import Enum
from typing import Iterable, Mapping

from .errors import UnknownIdError
from .kb_graph import (
    DEFAULT_MAX_DEPTH,
    CategoryId,
    EntityId,
    KnowledgeGraph,
    TemporalClues,
    descendant_depths,
    member_entities,
)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Period:
    start_year: int
    end_year: int

    def __post_init__(self):
        if self.start_year > self.end_year:
            raise ValueError(
                f"period start {self.start_year} is after end {self.end_year}"
            )

    def __contains__(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year


class TemporalClass(Enum):
    IN_PERIOD = "in_period"
    OUT_OF_PERIOD = "out_of_period"
    BORDERLINE = "borderline"
    UNDATED = "undated"


@dataclass(frozen=True)
class ClassificationFeatures:
    """Fractions are exact; None means the underlying clue set is empty."""

    frac_years_in: Fraction | None
    frac_intervals_overlap: Fraction | None
    has_year_in_period: bool


@dataclass(frozen=True)
class CategoryDecision:
    category: CategoryId
    auto_selected: bool
    dated_member_count: int
    out_of_period_count: int


def compute_features(clues: TemporalClues, period: Period) -> ClassificationFeatures:
    years_in = sum(1 for y in clues.years if y in period)
    frac_years_in = Fraction(years_in, len(clues.years)) if clues.years else None
    # Closed intervals: touching the period boundary counts as overlap.
    overlapping = sum(
        1
        for start, end in clues.intervals
        if start <= period.end_year and end >= period.start_year
    )
    frac_intervals_overlap = (
        Fraction(overlapping, len(clues.intervals)) if clues.intervals else None
    )
    return ClassificationFeatures(
        frac_years_in=frac_years_in,
        frac_intervals_overlap=frac_intervals_overlap,
        has_year_in_period=years_in > 0,
    )


def classify_entity(clues: TemporalClues, period: Period) -> TemporalClass:
    """Four-way temporal verdict for one entity against the target period.

    In-period needs both defined fractions at or above one half plus some
    positive in-period evidence; any positive evidence short of that is
    borderline. Both conditions are monotone under period widening, so
    widening can never demote an entity.
    """
    if clues.is_empty:
        return TemporalClass.UNDATED
    features = compute_features(clues, period)
    fy = features.frac_years_in
    fi = features.frac_intervals_overlap
    years_ok = fy is None or fy >= HALF
    intervals_ok = fi is None or fi >= HALF
    any_positive = (fy is not None and fy > 0) or (fi is not None and fi > 0)
    if years_ok and intervals_ok and any_positive:
        return TemporalClass.IN_PERIOD
    if features.has_year_in_period or (fi is not None and fi > 0):
        return TemporalClass.BORDERLINE
    return TemporalClass.OUT_OF_PERIOD


def prune_categories(
    memberships: Mapping[CategoryId, Iterable[EntityId]],
    classes: Mapping[EntityId, TemporalClass],
) -> list[CategoryDecision]:
    """Deselect categories where more than half the dated members are out-of-period.

    "More than half" is strict: an exact tie stays selected, and so do
    categories without any dated member. Decisions are sorted by category id.
    """
    decisions = []
    for category in sorted(memberships):
        dated = 0
        out = 0
        for entity in memberships[category]:
            if entity not in classes:
                raise UnknownIdError(entity, f"no temporal class for entity {entity!r}")
            cls = classes[entity]
            if cls is not TemporalClass.UNDATED:
                dated += 1
            if cls is TemporalClass.OUT_OF_PERIOD:
                out += 1
        decisions.append(
            CategoryDecision(
                category=category,
                auto_selected=not (2 * out > dated),
                dated_member_count=dated,
                out_of_period_count=out,
            )
        )
    return decisions


@dataclass(frozen=True)
class EntityCandidate:
    entity: EntityId
    label: str
    temporal_class: TemporalClass


@dataclass(frozen=True)
class CategoryNode:
    category: CategoryId
    label: str
    depth: int
    decision: CategoryDecision
    entities: tuple[EntityCandidate, ...]


@dataclass(frozen=True)
class RootGroup:
    root: CategoryId
    categories: tuple[CategoryNode, ...]


@dataclass
class CandidateTree:
    """Per-root category/entity candidates plus the flat maps queries need.

    A category reachable from several roots appears in each root's group but
    is a single selectable unit; the flat maps are keyed by id.
    """

    period: Period
    max_depth: int
    roots: tuple[CategoryId, ...]
    groups: tuple[RootGroup, ...]
    memberships: dict[CategoryId, frozenset[EntityId]]
    classes: dict[EntityId, TemporalClass]
    decisions: dict[CategoryId, CategoryDecision]

    @property
    def categories(self) -> frozenset[CategoryId]:
        return frozenset(self.memberships)

    @property
    def entities(self) -> frozenset[EntityId]:
        return frozenset(self.classes)


def candidate_set(
    graph: KnowledgeGraph,
    roots: Iterable[CategoryId],
    period: Period,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> CandidateTree:
    """Expand roots to categories, collect members, classify, and prune."""
    roots = tuple(sorted(set(roots)))
    if not roots:
        return CandidateTree(
            period=period, max_depth=max_depth, roots=(), groups=(),
            memberships={}, classes={}, decisions={},
        )
    all_categories = set()
    per_root_depths = {}
    for root in roots:
        depths = descendant_depths(graph, {root}, max_depth)
        per_root_depths[root] = depths
        all_categories.update(depths)
    memberships = member_entities(graph, all_categories)
    classes = {
        entity: classify_entity(graph.entities[entity].clues, period)
        for members in memberships.values()
        for entity in members
    }
    decisions = {d.category: d for d in prune_categories(memberships, classes)}

    groups = []
    for root in roots:
        depths = per_root_depths[root]
        nodes = tuple(
            CategoryNode(
                category=category,
                label=graph.categories[category],
                depth=depths[category],
                decision=decisions[category],
                entities=tuple(
                    EntityCandidate(
                        entity=entity,
                        label=graph.entities[entity].label,
                        temporal_class=classes[entity],
                    )
                    for entity in sorted(memberships[category])
                ),
            )
            for category in sorted(depths, key=lambda c: (depths[c], c))
        )
        groups.append(RootGroup(root=root, categories=nodes))

    return CandidateTree(
        period=period,
        max_depth=max_depth,
        roots=roots,
        groups=tuple(groups),
        memberships=memberships,
        classes=classes,
        decisions=decisions,
    )
