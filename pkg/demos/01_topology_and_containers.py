# Build a weighted topology, measure distances, and carve it into nested
# containers with per-tier latency targets.
from icnsim import (
    Edge, Node, NodeKind, ScenarioParams, Target,
    build_graph, containerize, generate_topology, measure_distance,
    node_centrality, validate_hierarchy,
)
from icnsim.containment import hierarchy_to_text

# A hand-built access branch: two PCs behind an access point, a switch,
# and a core server. Weights are microseconds of latency.
nodes = [
    Node(0, NodeKind.SERVER),
    Node(1, NodeKind.SWITCH),
    Node(2, NodeKind.ACCESS_POINT),
    Node(3, NodeKind.PC),
    Node(4, NodeKind.PC),
]
edges = [
    Edge(0, 1, 180_000),   # core link
    Edge(1, 2, 40_000),    # aggregation link
    Edge(2, 3, 400),       # local attach links, well under a millisecond
    Edge(2, 4, 700),
]
g = build_graph(nodes, edges, "latency_us")

print("latency PC3 -> server:", measure_distance(g, 3, 0), "us")
print("centrality of the access point:", node_centrality(g, 2))

# Three targets, one per tier: 1 ms, 150 ms, 500 ms.
targets = [Target(1, 1_000), Target(2, 150_000), Target(3, 500_000)]
hierarchy = containerize(g, targets)
print("\ncontainer dump:")
print(hierarchy_to_text(hierarchy))
print("hierarchy valid:", validate_hierarchy(hierarchy).ok)

# The same works at scale: a generated mMTC deployment with 2000 devices.
params = ScenarioParams(scenario="mmtc", density_k_per_km2=2.0, area_km2=1.0)
big = generate_topology(params, seed=7)
big_h = containerize(big, targets)
print(f"\ngenerated mMTC graph: {big.n} nodes, {big.m} links")
print("containers per level:", [len(level) for level in big_h.levels])
