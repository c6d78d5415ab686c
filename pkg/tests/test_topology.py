import math

import numpy as np
import pytest

from icnsim.errors import (
    DanglingEndpoint,
    DuplicateEdge,
    InvalidParams,
    NegativeWeight,
    Unreachable,
)
from icnsim.evaluation import ScenarioParams
from icnsim.topology import (
    Edge,
    Node,
    NodeKind,
    build_graph,
    generate_topology,
    graph_from_text,
    graph_to_text,
    hop_distance,
    measure_distance,
    mmtc_node,
    node_centrality,
)

from oracles import brute_additive, brute_bottleneck, bfs_hops


def switch(i):
    return Node(i, NodeKind.SWITCH)


def make(n, edges, unit="latency_us"):
    return build_graph([switch(i) for i in range(n)], [Edge(*e) for e in edges], unit)


def random_graph(rng, n, extra=3):
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v, int(rng.integers(1, 20))))
    seen = {(min(a, b), max(a, b)) for a, b, _ in edges}
    for _ in range(extra):
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        if a != b and (min(a, b), max(a, b)) not in seen:
            seen.add((min(a, b), max(a, b)))
            edges.append((a, b, int(rng.integers(1, 20))))
    return edges


class TestBuildGraph:
    def test_single_isolated_node(self):
        g = make(1, [])
        assert g.n == 1 and g.m == 0

    def test_two_nodes_single_edge(self):
        g = make(2, [(0, 1, 10)])
        assert measure_distance(g, 0, 1) == 10

    def test_dangling_endpoint(self):
        with pytest.raises(DanglingEndpoint):
            make(2, [(0, 99, 1)])

    def test_duplicate_edge_either_direction(self):
        with pytest.raises(DuplicateEdge):
            make(3, [(0, 1, 1), (1, 0, 2)])

    def test_negative_weight(self):
        with pytest.raises(NegativeWeight):
            make(2, [(0, 1, -5)])

    def test_self_loop_rejected(self):
        with pytest.raises(InvalidParams):
            make(2, [(1, 1, 3)])

    def test_ids_must_be_dense(self):
        with pytest.raises(InvalidParams):
            build_graph([switch(0), switch(2)], [], "latency_us")

    def test_node_invariants_enforced(self):
        bad = Node(0, NodeKind.PC, downlink_bw=100, uplink_bw=100)
        with pytest.raises(InvalidParams):
            build_graph([bad], [], "latency_us")

    def test_media_partition_is_80_percent(self):
        node = Node(3, NodeKind.SERVER, memory_total=1001)
        assert node.memory_media_partition == math.floor(0.8 * 1001)
        assert mmtc_node(1).memory_media_partition == 0

    def test_mmtc_ceilings(self):
        dev = mmtc_node(0)
        assert dev.compute < 50_000_000
        assert dev.memory_total < 50_000
        assert dev.storage < 300_000
        with pytest.raises(InvalidParams):
            build_graph(
                [Node(0, NodeKind.MMTC_DEVICE, memory_total=60_000,
                      downlink_bw=30_000, uplink_bw=10_000, compute=1_000_000)],
                [], "latency_us",
            )


class TestMeasureDistance:
    def test_additive_two_edge_path(self):
        g = make(3, [(0, 1, 2), (1, 2, 2)])
        assert measure_distance(g, 0, 2) == 4

    def test_bottleneck_single_path(self):
        g = make(3, [(0, 1, 5), (1, 2, 3)], "bandwidth_bps")
        assert measure_distance(g, 0, 2, "bottleneck") == 3

    def test_unreachable(self):
        g = make(4, [(0, 1, 1)])
        with pytest.raises(Unreachable):
            measure_distance(g, 0, 3)

    def test_self_distances(self):
        g = make(2, [(0, 1, 7)])
        assert measure_distance(g, 1, 1) == 0
        assert measure_distance(g, 1, 1, "bottleneck") == math.inf

    def test_matches_brute_force_enumeration(self):
        rng = np.random.default_rng(42)
        for trial in range(30):
            n = int(rng.integers(2, 9))
            edges = random_graph(rng, n)
            g = make(n, edges)
            for _ in range(6):
                a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
                if a == b:
                    continue
                assert measure_distance(g, a, b) == brute_additive(n, edges, a, b)
                assert measure_distance(g, a, b, "bottleneck") == brute_bottleneck(
                    n, edges, a, b
                )

    def test_triangle_inequality_and_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            n = int(rng.integers(3, 8))
            edges = random_graph(rng, n)
            g = make(n, edges)
            for _ in range(10):
                a, b, c = (int(x) for x in rng.integers(0, n, size=3))
                dab = measure_distance(g, a, b)
                dba = measure_distance(g, b, a)
                assert dab == dba
                assert measure_distance(g, a, c) <= dab + measure_distance(g, b, c)


class TestCentrality:
    def star(self):
        return make(5, [(0, i, 1) for i in range(1, 5)])

    def test_star_center(self):
        assert node_centrality(self.star(), 0) == 1.0

    def test_star_leaf(self):
        # direct evaluation: degree 1 over (5 - 1)
        assert node_centrality(self.star(), 3) == 0.25

    def test_isolated_node(self):
        g = make(3, [(0, 1, 1)])
        assert node_centrality(g, 2) == 0.0

    def test_single_node_graph(self):
        assert node_centrality(make(1, []), 0) == 1.0

    def test_centrality_sum_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(8):
            n = int(rng.integers(2, 9))
            edges = random_graph(rng, n)
            g = make(n, edges)
            total = sum(node_centrality(g, v) for v in range(n))
            assert total == pytest.approx(2 * g.m / (n - 1))


class TestGenerateTopology:
    def test_mmtc_density_gives_exact_device_count(self):
        params = ScenarioParams(scenario="mmtc", density_k_per_km2=63.0, area_km2=1.0)
        g = generate_topology(params, 7)
        assert len(g.nodes_of_kind(NodeKind.MMTC_DEVICE)) == 63_000

    def test_same_seed_same_graph(self):
        params = ScenarioParams(scenario="urllc", n_devices=40)
        a = generate_topology(params, 9)
        b = generate_topology(params, 9)
        assert graph_to_text(a) == graph_to_text(b)

    def test_different_seed_different_graph(self):
        params = ScenarioParams(scenario="embb", n_devices=40)
        a = generate_topology(params, 1)
        b = generate_topology(params, 2)
        assert graph_to_text(a) != graph_to_text(b)

    def test_zero_devices_rejected(self):
        with pytest.raises(InvalidParams):
            generate_topology(ScenarioParams(scenario="embb", n_devices=0), 1)

    def test_unknown_scenario_rejected(self):
        class P:
            scenario = "5g"

        with pytest.raises(InvalidParams):
            generate_topology(P(), 1)

    def test_tree_structure_and_local_latency(self):
        params = ScenarioParams(scenario="urllc", n_devices=64, latency_ms=4.0)
        g = generate_topology(params, 5)
        assert g.is_tree()
        # device attach links stay under the sub-millisecond tier target
        device_kinds = {NodeKind.PC, NodeKind.MOBILE_DEVICE, NodeKind.MMTC_DEVICE}
        for a, b, w in zip(g.ea.tolist(), g.eb.tolist(), g.ew.tolist()):
            if g.kind(a) in device_kinds or g.kind(b) in device_kinds:
                assert w < 1_000


class TestGraphFile:
    def test_round_trip_bit_exact(self):
        params = ScenarioParams(scenario="mmtc", density_k_per_km2=0.5)
        g = generate_topology(params, 11)
        text = graph_to_text(g)
        assert graph_to_text(graph_from_text(text)) == text

    def test_round_trip_preserves_distances(self):
        g = make(4, [(0, 1, 3), (1, 2, 4), (0, 3, 9)])
        g2 = graph_from_text(graph_to_text(g))
        assert measure_distance(g2, 0, 2) == 7

    def test_header_mismatch_rejected(self):
        with pytest.raises(InvalidParams):
            graph_from_text("graph latency_us 2\nnode 0 switch 1 1 3 1 1\n")


class TestHopDistance:
    def test_matches_bfs_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            edges = random_graph(rng, n)
            g = make(n, edges)
            a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
            assert hop_distance(g, a, b) == bfs_hops(n, edges, a, b)

    def test_tree_fast_path_agrees_with_bfs(self):
        params = ScenarioParams(scenario="embb", n_devices=48)
        g = generate_topology(params, 3)
        assert g.is_tree()
        edges = list(zip(g.ea.tolist(), g.eb.tolist(), g.ew.tolist()))
        rng = np.random.default_rng(0)
        for _ in range(15):
            a, b = (int(x) for x in rng.integers(0, g.n, size=2))
            assert hop_distance(g, a, b) == bfs_hops(g.n, edges, a, b)
