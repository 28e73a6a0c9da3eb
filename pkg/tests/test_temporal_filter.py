"""Entity classification, category pruning, and candidate tree assembly."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from corpusel import (
    EdgeKind,
    EntityNode,
    KnowledgeGraph,
    Period,
    TemporalClass,
    TemporalClues,
    UnknownIdError,
    candidate_set,
    classify_entity,
    compute_features,
    load_graph,
    prune_categories,
)
from gen import random_clues, random_period, widen_period
from oracles import majority_keep

IN = TemporalClass.IN_PERIOD
OUT = TemporalClass.OUT_OF_PERIOD
BORDER = TemporalClass.BORDERLINE
UNDATED = TemporalClass.UNDATED


def clues(years=(), intervals=()):
    return TemporalClues(years=frozenset(years), intervals=frozenset(intervals))


class TestPeriod:
    def test_contains_is_closed(self):
        period = Period(1588, 1702)
        assert 1588 in period and 1702 in period
        assert 1587 not in period and 1703 not in period

    def test_invalid_period_rejected(self):
        with pytest.raises(ValueError):
            Period(1800, 1700)


class TestComputeFeatures:
    def test_half_of_years_in(self):
        features = compute_features(clues(years={1602, 1799}), Period(1588, 1702))
        assert features.frac_years_in == Fraction(1, 2)
        assert features.has_year_in_period is True

    def test_disjoint_interval(self):
        features = compute_features(clues(intervals={(1940, 1945)}), Period(1946, 1950))
        assert features.frac_intervals_overlap == 0
        assert features.frac_years_in is None
        assert features.has_year_in_period is False

    def test_endpoint_touch_counts_as_overlap(self):
        features = compute_features(clues(intervals={(1940, 1945)}), Period(1945, 1950))
        assert features.frac_intervals_overlap == 1

    def test_empty_clues_have_no_defined_fractions(self):
        features = compute_features(clues(), Period(1900, 1910))
        assert features.frac_years_in is None
        assert features.frac_intervals_overlap is None
        assert features.has_year_in_period is False


class TestClassifyEntity:
    def test_empty_clues_are_undated(self):
        assert classify_entity(clues(), Period(1588, 1702)) is UNDATED

    def test_all_years_in_period(self):
        assert classify_entity(clues(years={1602, 1650}), Period(1588, 1702)) is IN

    def test_minority_years_with_hit_is_borderline(self):
        result = classify_entity(clues(years={1602, 1799, 1850, 1900}), Period(1588, 1702))
        assert result is BORDER

    def test_no_year_in_period_is_out(self):
        assert classify_entity(clues(years={1799, 1850}), Period(1588, 1702)) is OUT

    def test_exactly_half_of_years_is_in_period(self):
        assert classify_entity(clues(years={1602, 1799}), Period(1588, 1702)) is IN

    def test_interval_only_overlap(self):
        assert classify_entity(clues(intervals={(1940, 1945)}), Period(1944, 1950)) is IN
        assert classify_entity(clues(intervals={(1940, 1945)}), Period(1946, 1950)) is OUT

    def test_overlapping_intervals_but_minority_years(self):
        # all years out but every interval overlaps: positive evidence, not enough
        result = classify_entity(
            clues(years={1800, 1810}, intervals={(1600, 1700)}), Period(1588, 1702)
        )
        assert result is BORDER

    def test_undated_iff_empty_property(self):
        rng = random.Random(17)
        for _ in range(300):
            c = random_clues(rng)
            start, end = random_period(rng)
            result = classify_entity(c, Period(start, end))
            assert (result is UNDATED) == c.is_empty

    def test_widening_never_demotes(self):
        rng = random.Random(23)
        rank = {OUT: 0, BORDER: 1, IN: 2}
        for _ in range(300):
            c = random_clues(rng)
            if c.is_empty:
                continue
            start, end = random_period(rng)
            wide_start, wide_end = widen_period(rng, (start, end))
            before = classify_entity(c, Period(start, end))
            after = classify_entity(c, Period(wide_start, wide_end))
            assert rank[after] >= rank[before]


class TestPruneCategories:
    def classes_for(self, sequence):
        memberships = {"cat": {f"e{i}" for i in range(len(sequence))}}
        classes = {f"e{i}": cls for i, cls in enumerate(sequence)}
        return prune_categories(memberships, classes)[0]

    def test_one_of_three_out_keeps_category(self):
        decision = self.classes_for([IN, IN, OUT])
        assert decision.auto_selected is True
        assert decision.dated_member_count == 3
        assert decision.out_of_period_count == 1

    def test_two_of_three_out_deselects(self):
        assert self.classes_for([OUT, OUT, IN]).auto_selected is False

    def test_exact_half_stays_selected(self):
        assert self.classes_for([OUT, IN]).auto_selected is True

    def test_all_undated_stays_selected(self):
        decision = self.classes_for([UNDATED, UNDATED])
        assert decision.auto_selected is True
        assert decision.dated_member_count == 0

    def test_borderline_counts_as_dated(self):
        # out=1 of dated=2: a tie, kept
        assert self.classes_for([BORDER, OUT]).auto_selected is True

    def test_missing_class_rejected(self):
        with pytest.raises(UnknownIdError):
            prune_categories({"cat": {"e0"}}, {})

    def test_matches_counting_oracle_up_to_four(self):
        all_classes = [IN, OUT, BORDER, UNDATED]
        for size in range(5):
            for combo in itertools.product(all_classes, repeat=size):
                decision = self.classes_for(list(combo))
                assert decision.auto_selected == majority_keep([c.value for c in combo])

    def test_permutation_invariance(self):
        rng = random.Random(5)
        all_classes = [IN, OUT, BORDER, UNDATED]
        for _ in range(50):
            combo = [rng.choice(all_classes) for _ in range(rng.randint(0, 6))]
            shuffled = combo[:]
            rng.shuffle(shuffled)
            assert (self.classes_for(combo).auto_selected
                    == self.classes_for(shuffled).auto_selected)


def small_graph():
    """One root, two subcategories, four entities with hand-picked dating."""
    categories = {"r": "Root", "s1": "Sub One", "s2": "Sub Two"}
    entities = {
        "a": EntityNode(id="a", label="A", clues=clues(years={1600, 1650})),
        "b": EntityNode(id="b", label="B", clues=clues(years={1800})),
        "c": EntityNode(id="c", label="C", clues=clues(years={1600, 1800, 1900, 2000})),
        "d": EntityNode(id="d", label="D", clues=clues()),
    }
    B, M = EdgeKind.BROADER, EdgeKind.MEMBER_OF
    edges = frozenset({
        ("s1", B, "r"), ("s2", B, "r"),
        ("a", M, "s1"), ("b", M, "s1"),
        ("b", M, "s2"), ("c", M, "s2"), ("d", M, "s2"),
    })
    return KnowledgeGraph(categories=categories, entities=entities, edges=edges)


class TestCandidateSet:
    def test_hand_computed_tree(self):
        tree = candidate_set(small_graph(), {"r"}, Period(1588, 1702), max_depth=3)
        # classes applied by hand: a in, b out, c borderline (1/4 with a hit), d undated
        assert tree.classes == {"a": IN, "b": OUT, "c": BORDER, "d": UNDATED}
        # s1 = {a in, b out}: 1 out of 2 dated -> kept; s2 = {b out, c border, d undated}:
        # 1 out of 2 dated -> kept; r has no direct members -> kept
        assert tree.decisions["s1"].auto_selected is True
        assert tree.decisions["s2"].auto_selected is True
        assert tree.decisions["r"].dated_member_count == 0
        assert tree.memberships == {
            "r": frozenset(), "s1": frozenset({"a", "b"}),
            "s2": frozenset({"b", "c", "d"}),
        }
        assert tree.roots == ("r",)
        assert len(tree.groups) == 1
        depths = {node.category: node.depth for node in tree.groups[0].categories}
        assert depths == {"r": 0, "s1": 1, "s2": 1}

    def test_deselection_on_majority_out(self):
        period = Period(1750, 1850)  # a out, b in, c 3/4 out but has hit -> borderline
        tree = candidate_set(small_graph(), {"r"}, period, max_depth=3)
        assert tree.classes == {"a": OUT, "b": IN, "c": BORDER, "d": UNDATED}
        assert tree.decisions["s1"].auto_selected is True  # 1 out of 2 dated: tie
        assert tree.decisions["s2"].auto_selected is True

    def test_period_covering_everything_selects_all(self):
        tree = candidate_set(small_graph(), {"r"}, Period(1000, 2099), max_depth=3)
        for entity, cls in tree.classes.items():
            if entity == "d":
                assert cls is UNDATED
            else:
                assert cls is IN
        assert all(d.auto_selected for d in tree.decisions.values())

    def test_empty_roots_give_empty_tree(self):
        tree = candidate_set(small_graph(), set(), Period(1600, 1700))
        assert tree.groups == ()
        assert tree.memberships == {}
        assert tree.classes == {}

    def test_duplicate_broader_edge_changes_nothing(self):
        nodes = ["C\tr\tRoot\n", "C\ts1\tSub\n", "E\ta\tA\tfounded 1600\n"]
        edges_once = ["s1\tbroader\tr\n", "a\tmember_of\ts1\n"]
        edges_twice = edges_once + ["s1\tbroader\tr\n"]
        period = Period(1588, 1702)
        tree_once = candidate_set(load_graph(nodes, edges_once), {"r"}, period)
        tree_twice = candidate_set(load_graph(nodes, edges_twice), {"r"}, period)
        assert tree_once.entities == tree_twice.entities
        assert tree_once.decisions == tree_twice.decisions

    def test_every_tree_entity_has_exactly_one_class(self):
        tree = candidate_set(small_graph(), {"r"}, Period(1588, 1702))
        seen = {}
        for group in tree.groups:
            for node in group.categories:
                for cand in node.entities:
                    if cand.entity in seen:
                        assert seen[cand.entity] == cand.temporal_class
                    seen[cand.entity] = cand.temporal_class
                    assert cand.temporal_class is tree.classes[cand.entity]
        assert set(seen) == set(tree.classes)
