"""Multi-level container hierarchies over weighted graphs.

A container groups nodes whose mutual distance satisfies a target: for
additive targets (latency, hops) every edge under the target is contracted to
zero cost and nodes are grouped while their accumulated contracted distance
stays under the target; for bottleneck targets (bandwidth) edges under the
target are removed and nodes are grouped along the surviving links. Levels
nest: each level above the first is built on the quotient graph of the level
below, which guarantees that a container is the exact union of its children.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InvalidParams, UnitMismatch
from .topology import WeightedGraph, WeightUnit


class TargetMode(str, Enum):
    ADDITIVE = "additive"
    BOTTLENECK = "bottleneck"
    EXACT_HIT = "exact_hit"


@dataclass(frozen=True)
class Target:
    level: int
    value: int
    mode: TargetMode = TargetMode.ADDITIVE

    def __post_init__(self):
        if self.level < 1:
            raise InvalidParams("target level must be >= 1")
        if self.value <= 0:
            raise InvalidParams("target value must be positive")


@dataclass(frozen=True)
class Container:
    level: int
    index: int
    members: frozenset
    children: tuple = ()


@dataclass
class ContainerHierarchy:
    levels: list          # levels[i] is the list of containers for targets[i]
    targets: list
    source_graph: WeightedGraph
    level_labels: list = field(default_factory=list)  # per level: node -> container position


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_unit(g: WeightedGraph, t: Target) -> None:
    if t.mode == TargetMode.BOTTLENECK:
        if g.unit != WeightUnit.BANDWIDTH_BPS:
            raise UnitMismatch(f"bottleneck target on {g.unit.value} graph")
    elif g.unit == WeightUnit.BANDWIDTH_BPS:
        raise UnitMismatch(f"{t.mode.value} target on bandwidth graph")


def _grouping_labels(g: WeightedGraph, t: Target) -> np.ndarray:
    """Component label per node after the contraction/removal step.

    Additive: edges under the target contract to zero, and since every
    surviving edge weighs at least the target, any path accumulating less
    than the target uses contracted edges only -- the reachable set from a
    seed is exactly its component over contracted edges. Bottleneck: edges
    under the target are removed, so reachability along the survivors means
    some path has every edge at or above the target.
    """
    if t.mode == TargetMode.BOTTLENECK:
        mask = g.ew >= t.value
    else:
        mask = g.ew < t.value
    n = g.n
    ea, eb = g.ea[mask], g.eb[mask]
    if len(ea) == 0:
        return np.arange(n, dtype=np.int64)
    data = np.ones(2 * len(ea), dtype=np.int8)
    adj = csr_matrix(
        (data, (np.concatenate([ea, eb]), np.concatenate([eb, ea]))), shape=(n, n)
    )
    _, labels = connected_components(adj, directed=False)
    return labels.astype(np.int64)


def _exact_hit_groups(g: WeightedGraph, t: Target, order) -> list:
    """Greedy grouping for the closed-bound mode: from each seed, collect the
    still-unassigned nodes whose contracted path distance is <= the target,
    searching only through unassigned nodes."""
    contracted = {}
    for a, b, w in zip(g.ea.tolist(), g.eb.tolist(), g.ew.tolist()):
        cw = 0 if w < t.value else w
        contracted[(a, b)] = cw
        contracted[(b, a)] = cw
    remaining = set(range(g.n))
    groups = []
    for seed in order:
        if seed not in remaining:
            continue
        dist = {seed: 0}
        heap = [(0, seed)]
        hit = set()
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist.get(u, math.inf):
                continue
            hit.add(u)
            nbrs, _ = g.neighbors(u)
            for v in nbrs.tolist():
                if v not in remaining:
                    continue
                nd = d + contracted[(u, v)]
                if nd <= t.value and nd < dist.get(v, math.inf):
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        groups.append(sorted(hit))
        remaining -= hit
        if not remaining:
            break
    return groups


def _level_groups(g: WeightedGraph, t: Target, order):
    """Node groups for one level, in container order (first seed wins)."""
    if t.mode == TargetMode.EXACT_HIT:
        return [np.asarray(grp, dtype=np.int64) for grp in _exact_hit_groups(g, t, order)]
    labels = _grouping_labels(g, t)
    n = g.n
    position = np.empty(n, dtype=np.int64)
    position[np.asarray(order, dtype=np.int64)] = np.arange(n)
    k = int(labels.max()) + 1
    first = np.full(k, n, dtype=np.int64)
    np.minimum.at(first, labels, position)
    label_rank = np.argsort(first, kind="stable")
    by_node = np.argsort(labels, kind="stable")  # grouped by label, ascending id
    counts = np.bincount(labels, minlength=k)
    splits = np.split(by_node, np.cumsum(counts)[:-1])
    return [splits[lab] for lab in label_rank]


def containerize_level(g: WeightedGraph, t: Target, seed_order=None) -> list:
    """One containerization level: a partition of the graph's nodes.

    seed_order fixes which unassigned node seeds the next container
    (default: ascending node id). Deterministic.
    """
    if g.n == 0:
        raise InvalidParams("cannot containerize an empty graph")
    _check_unit(g, t)
    order = list(seed_order) if seed_order is not None else list(range(g.n))
    if sorted(order) != list(range(g.n)):
        raise InvalidParams("seed_order must enumerate every node exactly once")
    groups = _level_groups(g, t, order)
    return [
        Container(level=t.level, index=k + 1, members=frozenset(members.tolist()))
        for k, members in enumerate(groups)
    ]


def _quotient(g: WeightedGraph, labels: np.ndarray, k: int, mode: TargetMode) -> WeightedGraph:
    """Collapse each container to a super-node; parallel inter-container edges
    aggregate to the minimum weight (additive) or the maximum (bottleneck)."""
    la = labels[g.ea]
    lb = labels[g.eb]
    mask = la != lb
    la, lb, w = la[mask], lb[mask], g.ew[mask]
    lo = np.minimum(la, lb)
    hi = np.maximum(la, lb)
    key = lo * k + hi
    uniq, inv = np.unique(key, return_inverse=True)
    if mode == TargetMode.BOTTLENECK:
        agg = np.full(len(uniq), np.iinfo(np.int64).min, dtype=np.int64)
        np.maximum.at(agg, inv, w)
    else:
        agg = np.full(len(uniq), np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(agg, inv, w)
    qa = (uniq // k).astype(np.int64)
    qb = (uniq % k).astype(np.int64)
    zero = np.zeros(k, dtype=np.int64)
    return WeightedGraph.from_arrays(
        np.full(k, 1, dtype=np.int8),  # switch placeholders; only weights matter here
        zero, zero, zero, zero, zero, qa, qb, agg, g.unit,
    )


def containerize(g: WeightedGraph, targets) -> ContainerHierarchy:
    """Build the full nested hierarchy, lowest target level first."""
    targets = sorted(targets, key=lambda t: t.level)
    if not targets:
        raise InvalidParams("need at least one target")
    levels_seen = [t.level for t in targets]
    if len(set(levels_seen)) != len(levels_seen):
        raise InvalidParams("target levels must be strictly increasing")
    values = [t.value for t in targets]
    if len(set(values)) != len(values):
        raise InvalidParams("repeated target values are not allowed")
    if len({t.mode for t in targets}) > 1:
        raise InvalidParams("targets in one sequence must share a distance mode")

    order = list(range(g.n))
    base_groups = _level_groups(g, targets[0], order)
    base = [
        Container(level=targets[0].level, index=k + 1, members=frozenset(grp.tolist()))
        for k, grp in enumerate(base_groups)
    ]
    levels = [base]
    labels = np.empty(g.n, dtype=np.int64)
    for pos, grp in enumerate(base_groups):
        labels[grp] = pos
    level_labels = [labels.copy()]

    current = g          # graph the newest level was built on
    q_labels = labels    # current-graph node -> newest-level container position
    for t in targets[1:]:
        k = len(levels[-1])
        quotient = _quotient(current, q_labels, k, t.mode)
        super_groups = _level_groups(quotient, t, list(range(k)))
        prev = levels[-1]
        built = []
        new_q = np.empty(k, dtype=np.int64)
        for pos, grp in enumerate(super_groups):
            new_q[grp] = pos
        labels = new_q[labels]
        # original-node membership per super container, computed in one pass
        by_node = np.argsort(labels, kind="stable")
        counts = np.bincount(labels, minlength=len(super_groups))
        member_splits = np.split(by_node, np.cumsum(counts)[:-1])
        for pos, grp in enumerate(super_groups):
            children = tuple(prev[i] for i in sorted(grp.tolist()))
            built.append(
                Container(
                    level=t.level,
                    index=pos + 1,
                    members=frozenset(member_splits[pos].tolist()),
                    children=children,
                )
            )
        levels.append(built)
        level_labels.append(labels.copy())
        current = quotient
        q_labels = new_q
    return ContainerHierarchy(
        levels=levels, targets=list(targets), source_graph=g, level_labels=level_labels
    )


def validate_hierarchy(h: ContainerHierarchy) -> ValidationReport:
    """Checks disjointness and coverage per level plus nesting between levels."""
    report = ValidationReport()
    n = h.source_graph.n
    all_nodes = frozenset(range(n))
    for li, containers in enumerate(h.levels):
        seen = set()
        for c in containers:
            overlap = seen & c.members
            if overlap:
                report.violations.append(
                    f"level {c.level}: container {c.index} overlaps siblings "
                    f"on {sorted(overlap)[:5]}"
                )
            seen |= c.members
        missing = all_nodes - seen
        if missing:
            level_no = containers[0].level if containers else li + 1
            report.violations.append(
                f"level {level_no}: nodes {sorted(missing)[:5]} uncovered"
            )
        if li > 0:
            for child in h.levels[li - 1]:
                owners = [c for c in containers if child.members <= c.members]
                if len(owners) != 1:
                    report.violations.append(
                        f"level {child.level} container {child.index} is not nested "
                        f"in exactly one parent ({len(owners)} candidates)"
                    )
    return report


# -- hierarchy dump format -----------------------------------------------------


def hierarchy_to_text(h: ContainerHierarchy) -> str:
    lines = []
    for containers in h.levels:
        for c in sorted(containers, key=lambda c: c.index):
            ids = ",".join(str(i) for i in sorted(c.members))
            lines.append(f"container {c.level} {c.index} {ids}")
    return "\n".join(lines) + "\n"


def hierarchy_from_text(text: str, graph: WeightedGraph = None) -> ContainerHierarchy:
    """Rebuild a hierarchy from its dump; children links are re-derived from
    membership (a container's children are the level-below containers it covers)."""
    by_level = {}
    for ln in text.splitlines():
        if not ln.strip():
            continue
        parts = ln.split()
        if parts[0] != "container":
            raise InvalidParams(f"unknown line {parts[0]!r}")
        level, index = int(parts[1]), int(parts[2])
        members = frozenset(int(x) for x in parts[3].split(","))
        by_level.setdefault(level, []).append((index, members))
    levels = []
    prev = None
    for level in sorted(by_level):
        row = []
        for index, members in sorted(by_level[level]):
            children = tuple(c for c in prev if c.members <= members) if prev else ()
            row.append(
                Container(level=level, index=index, members=members, children=children)
            )
        levels.append(row)
        prev = row
    return ContainerHierarchy(levels=levels, targets=[], source_graph=graph)


def save_hierarchy(h: ContainerHierarchy, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(hierarchy_to_text(h))


def load_hierarchy(path, graph: WeightedGraph = None) -> ContainerHierarchy:
    with open(path, "r", encoding="utf-8") as fh:
        return hierarchy_from_text(fh.read(), graph)
