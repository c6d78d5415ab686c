import numpy as np
import pytest

from icnsim.containment import (
    Container,
    ContainerHierarchy,
    Target,
    TargetMode,
    containerize,
    containerize_level,
    hierarchy_from_text,
    hierarchy_to_text,
    validate_hierarchy,
)
from icnsim.errors import InvalidParams, UnitMismatch
from icnsim.topology import Edge, Node, NodeKind, build_graph

from oracles import oracle_hierarchy, oracle_level_groups


def make(n, edges, unit="latency_us"):
    nodes = [Node(i, NodeKind.SWITCH) for i in range(n)]
    return build_graph(nodes, [Edge(*e) for e in edges], unit)


def members(containers):
    return [sorted(c.members) for c in containers]


def random_graph(rng, n, max_extra=4):
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v, int(rng.integers(1, 30))))
    seen = {(min(a, b), max(a, b)) for a, b, _ in edges}
    for _ in range(int(rng.integers(0, max_extra + 1))):
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        key = (min(a, b), max(a, b))
        if a != b and key not in seen:
            seen.add(key)
            edges.append((a, b, int(rng.integers(1, 30))))
    return edges


class TestContainerizeLevel:
    def test_single_isolated_node(self):
        g = make(1, [])
        out = containerize_level(g, Target(1, 5))
        assert members(out) == [[0]]

    def test_edge_not_under_target_stays_split(self):
        # brute-force oracle agrees: weight 10 is not contracted for T=5
        g = make(2, [(0, 1, 10)])
        out = containerize_level(g, Target(1, 5))
        assert members(out) == [[0], [1]]
        assert members(out) == oracle_level_groups(2, [(0, 1, 10)], 5, "additive")

    def test_contracted_chain_merges(self):
        edges = [(0, 1, 2), (1, 2, 2)]
        g = make(3, edges)
        out = containerize_level(g, Target(1, 5))
        assert members(out) == [[0, 1, 2]]
        assert members(out) == oracle_level_groups(3, edges, 5, "additive")

    def test_bottleneck_keeps_wide_links(self):
        edges = [(0, 1, 10), (1, 2, 3)]
        g = make(3, edges, "bandwidth_bps")
        out = containerize_level(g, Target(1, 5, TargetMode.BOTTLENECK))
        assert members(out) == [[0, 1], [2]]
        assert members(out) == oracle_level_groups(3, edges, 5, "bottleneck")

    def test_exact_hit_closes_the_bound(self):
        edges = [(0, 1, 5), (1, 2, 9)]
        g = make(3, edges)
        closed = containerize_level(g, Target(1, 5, TargetMode.EXACT_HIT))
        open_ = containerize_level(g, Target(1, 5))
        assert members(closed) == oracle_level_groups(3, edges, 5, "exact_hit")
        assert members(closed) == [[0, 1], [2]]
        assert members(open_) == [[0], [1], [2]]

    def test_unit_mismatch(self):
        g = make(2, [(0, 1, 3)], "bandwidth_bps")
        with pytest.raises(UnitMismatch):
            containerize_level(g, Target(1, 5))
        g2 = make(2, [(0, 1, 3)])
        with pytest.raises(UnitMismatch):
            containerize_level(g2, Target(1, 5, TargetMode.BOTTLENECK))

    def test_seed_order_changes_indexing_only(self):
        edges = [(0, 1, 1), (2, 3, 1)]
        g = make(4, edges)
        fwd = containerize_level(g, Target(1, 5))
        rev = containerize_level(g, Target(1, 5), seed_order=[3, 2, 1, 0])
        assert members(fwd) == [[0, 1], [2, 3]]
        assert members(rev) == [[2, 3], [0, 1]]

    def test_matches_oracle_on_random_graphs(self):
        rng = np.random.default_rng(100)
        for _ in range(40):
            n = int(rng.integers(2, 10))
            edges = random_graph(rng, n)
            target = int(rng.integers(2, 35))
            mode = ("additive", "bottleneck", "exact_hit")[int(rng.integers(0, 3))]
            unit = "bandwidth_bps" if mode == "bottleneck" else "latency_us"
            g = make(n, edges, unit)
            out = containerize_level(g, Target(1, target, TargetMode(mode)))
            assert members(out) == oracle_level_groups(n, edges, target, mode)


class TestContainerize:
    def test_single_target_equals_single_level(self):
        g = make(3, [(0, 1, 2), (1, 2, 9)])
        h = containerize(g, [Target(1, 5)])
        assert members(h.levels[0]) == members(containerize_level(g, Target(1, 5)))

    def test_four_node_chain_two_levels(self):
        # brute-force oracle on the 4-node instance
        g = make(4, [(0, 1, 1), (1, 2, 10), (2, 3, 1)])
        h = containerize(g, [Target(1, 5), Target(2, 50)])
        assert members(h.levels[0]) == [[0, 1], [2, 3]]
        assert members(h.levels[1]) == [[0, 1, 2, 3]]

    def test_every_low_container_has_exactly_one_parent(self):
        rng = np.random.default_rng(5)
        for _ in range(15):
            n = int(rng.integers(2, 10))
            g = make(n, random_graph(rng, n))
            h = containerize(g, [Target(1, 4), Target(2, 12), Target(3, 40)])
            for low, high in zip(h.levels, h.levels[1:]):
                for child in low:
                    owners = [c for c in high if child.members <= c.members]
                    assert len(owners) == 1

    def test_matches_multilevel_oracle(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            n = int(rng.integers(2, 9))
            edges = random_graph(rng, n)
            g = make(n, edges)
            targets = sorted(set(int(t) for t in rng.integers(2, 40, size=3)))
            if len(targets) < 3:
                continue
            h = containerize(g, [Target(i + 1, t) for i, t in enumerate(targets)])
            expected = oracle_hierarchy(n, edges, targets, "additive")
            assert [members(level) for level in h.levels] == expected

    def test_determinism(self):
        g = make(6, [(0, 1, 3), (1, 2, 8), (3, 4, 2), (4, 5, 30), (2, 3, 14)])
        t = [Target(1, 5), Target(2, 20)]
        a, b = containerize(g, t), containerize(g, t)
        assert hierarchy_to_text(a) == hierarchy_to_text(b)

    def test_rejects_bad_sequences(self):
        g = make(2, [(0, 1, 3)])
        with pytest.raises(InvalidParams):
            containerize(g, [])
        with pytest.raises(InvalidParams):
            containerize(g, [Target(1, 5), Target(1, 9)])
        with pytest.raises(InvalidParams):
            containerize(g, [Target(1, 5), Target(2, 5)])
        with pytest.raises(InvalidParams):
            containerize(
                g, [Target(1, 5), Target(2, 9, TargetMode.EXACT_HIT)]
            )

    def test_target_validation(self):
        with pytest.raises(InvalidParams):
            Target(0, 5)
        with pytest.raises(InvalidParams):
            Target(1, 0)

    def test_container_count_non_increasing_in_target(self):
        rng = np.random.default_rng(77)
        for _ in range(10):
            n = int(rng.integers(3, 10))
            g = make(n, random_graph(rng, n))
            counts = [
                len(containerize_level(g, Target(1, t))) for t in (2, 5, 12, 25, 60)
            ]
            assert counts == sorted(counts, reverse=True)


class TestValidateHierarchy:
    def test_constructed_hierarchies_are_valid(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            n = int(rng.integers(2, 10))
            g = make(n, random_graph(rng, n))
            h = containerize(g, [Target(1, 4), Target(2, 18)])
            assert validate_hierarchy(h).ok

    def test_overlap_violation(self):
        g = make(3, [(0, 1, 1)])
        h = ContainerHierarchy(
            levels=[[
                Container(1, 1, frozenset({0, 1})),
                Container(1, 2, frozenset({1, 2})),
            ]],
            targets=[], source_graph=g,
        )
        report = validate_hierarchy(h)
        assert not report.ok
        assert sum("overlaps" in v for v in report.violations) == 1

    def test_coverage_violation(self):
        g = make(3, [(0, 1, 1)])
        h = ContainerHierarchy(
            levels=[[Container(1, 1, frozenset({0, 1}))]],
            targets=[], source_graph=g,
        )
        report = validate_hierarchy(h)
        assert not report.ok
        assert sum("uncovered" in v for v in report.violations) == 1

    def test_nesting_violation(self):
        g = make(2, [(0, 1, 1)])
        h = ContainerHierarchy(
            levels=[
                [Container(1, 1, frozenset({0, 1}))],
                [Container(2, 1, frozenset({0}))],
            ],
            targets=[], source_graph=g,
        )
        assert any("nested" in v for v in validate_hierarchy(h).violations)


class TestHierarchyDump:
    def test_round_trip(self):
        g = make(5, [(0, 1, 2), (1, 2, 9), (3, 4, 1), (2, 3, 30)])
        h = containerize(g, [Target(1, 5), Target(2, 50)])
        text = hierarchy_to_text(h)
        again = hierarchy_from_text(text, g)
        assert hierarchy_to_text(again) == text
        assert [members(level) for level in again.levels] == [
            members(level) for level in h.levels
        ]

    def test_children_rebuilt_from_membership(self):
        g = make(4, [(0, 1, 1), (1, 2, 10), (2, 3, 1)])
        h = containerize(g, [Target(1, 5), Target(2, 50)])
        again = hierarchy_from_text(hierarchy_to_text(h))
        top = again.levels[1][0]
        assert sorted(sorted(c.members) for c in top.children) == [[0, 1], [2, 3]]
