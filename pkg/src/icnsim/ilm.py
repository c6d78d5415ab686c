"""Hierarchical identifier-locator mapping aligned with the container tree.

A nonlocal root resolver carries the naming service; one resolver per
container mirrors the hierarchy. Registrations propagate from a leaf up to
the root, so resolution succeeds from any position by walking the parent
chain. Records may bind an identifier indirectly to another identifier
(data id -> device id); resolution chases such bindings with loop detection.
Constrained local domains run an 8-bit short-name space behind a gateway.
"""

from __future__ import annotations

import hashlib
import heapq
import ipaddress
from dataclasses import dataclass, field

from .errors import (
    CollisionDetected,
    EmptyHrn,
    IndirectLoop,
    InvalidParams,
    LocatorLimitExceeded,
    NamespaceExhausted,
    NotFound,
)

GLOBAL_ID_BITS = 160
LOCATOR_LIMIT = 4          # "less than five" network addresses per identifier
LOCAL_NAMESPACE = 256      # 8-bit short names
SERVICE_META_BITS = 32


@dataclass(frozen=True, order=True)
class GlobalId:
    value: int

    def __post_init__(self):
        if not (0 <= self.value < 1 << GLOBAL_ID_BITS):
            raise InvalidParams("identifier must fit in 160 bits")

    @property
    def hex(self) -> str:
        return format(self.value, "040x")

    def __repr__(self):
        return f"GlobalId({self.hex[:8]}..)"


@dataclass(frozen=True, order=True)
class NetworkAddress:
    version: str
    value: int

    def __post_init__(self):
        if self.version == "v4":
            limit = 1 << 32
        elif self.version == "v6":
            limit = 1 << 128
        else:
            raise InvalidParams(f"unknown address version {self.version!r}")
        if not (0 <= self.value < limit):
            raise InvalidParams("address out of range for its version")

    def __str__(self):
        if self.version == "v4":
            return str(ipaddress.IPv4Address(self.value))
        return str(ipaddress.IPv6Address(self.value))

    @classmethod
    def parse(cls, text: str) -> "NetworkAddress":
        addr = ipaddress.ip_address(text)
        return cls("v4" if addr.version == 4 else "v6", int(addr))


@dataclass
class NameRecord:
    hrn: str
    id: GlobalId
    locators: set = field(default_factory=set)
    indirect_target: GlobalId = None
    service_meta: int = 0
    holders: list = field(default_factory=list)  # resolvers carrying this record

    def __post_init__(self):
        if not (0 <= self.service_meta < 1 << SERVICE_META_BITS):
            raise InvalidParams("service_meta must fit in 32 bits")


class NamingService:
    """Deterministic HRN -> 160-bit identifier digests with collision watch."""

    def __init__(self):
        self._hrn_of = {}

    def assign_id(self, hrn: str) -> GlobalId:
        if not hrn:
            raise EmptyHrn("HRN must be non-empty")
        gid = GlobalId(int.from_bytes(hashlib.sha1(hrn.encode("utf-8")).digest(), "big"))
        known = self._hrn_of.get(gid)
        if known is not None and known != hrn:
            raise CollisionDetected(f"digest collision between {known!r} and {hrn!r}")
        self._hrn_of[gid] = hrn
        return gid


class IlmNode:
    """One resolver; serves the container named by container_ref."""

    def __init__(self, container_ref=None, parent: "IlmNode" = None, naming: NamingService = None):
        self.container_ref = container_ref
        self.parent = parent
        self.naming = naming
        self.table = {}

    def root(self) -> "IlmNode":
        node = self
        while node.parent is not None:
            node = node.parent
        return node

    def chain(self):
        node = self
        while node is not None:
            yield node
            node = node.parent


def assign_id(ns: NamingService, hrn: str) -> GlobalId:
    return ns.assign_id(hrn)


def _lookup(ilm: IlmNode, gid: GlobalId):
    for node in ilm.chain():
        rec = node.table.get(gid)
        if rec is not None:
            return rec
    return None


def _store_up(ilm: IlmNode, rec: NameRecord) -> None:
    for node in ilm.chain():
        if node.table.get(rec.id) is not rec:
            node.table[rec.id] = rec
            rec.holders.append(node)


def register(ilm: IlmNode, hrn: str, na: NetworkAddress, service_meta: int = 0) -> GlobalId:
    """Create or extend a name record at a leaf resolver and propagate it up
    the parent chain to the nonlocal root."""
    naming = ilm.root().naming
    if naming is None:
        raise InvalidParams("resolver tree has no naming service at the root")
    gid = naming.assign_id(hrn)
    rec = _lookup(ilm, gid)
    if rec is None:
        rec = NameRecord(hrn=hrn, id=gid, service_meta=service_meta)
        rec.locators.add(na)
    else:
        if na not in rec.locators and len(rec.locators) >= LOCATOR_LIMIT:
            raise LocatorLimitExceeded(
                f"{hrn!r} already binds {LOCATOR_LIMIT} addresses"
            )
        rec.locators.add(na)
    _store_up(ilm, rec)
    return gid


def register_indirect(ilm: IlmNode, hrn: str, target: GlobalId, service_meta: int = 0) -> GlobalId:
    """Bind an identifier to another identifier (data id -> device id)."""
    naming = ilm.root().naming
    if naming is None:
        raise InvalidParams("resolver tree has no naming service at the root")
    gid = naming.assign_id(hrn)
    rec = _lookup(ilm, gid)
    if rec is None:
        rec = NameRecord(hrn=hrn, id=gid, service_meta=service_meta)
    rec.indirect_target = target
    _store_up(ilm, rec)
    return gid


def resolve(ilm: IlmNode, gid: GlobalId) -> frozenset:
    """Locators for an identifier, found locally or up the parent chain;
    indirect bindings are chased with cycle detection."""
    rec = _lookup(ilm, gid)
    if rec is None:
        raise NotFound(f"identifier {gid.hex[:12]}.. is not registered")
    result = set()
    visited = {gid}
    current = rec
    while True:
        result |= current.locators
        target = current.indirect_target
        if target is None:
            break
        if target in visited:
            raise IndirectLoop(f"indirect cycle at {target.hex[:12]}..")
        visited.add(target)
        current = _lookup(ilm, target)
        if current is None:
            raise NotFound(f"indirect target {target.hex[:12]}.. is not registered")
    if not result:
        raise NotFound(f"identifier {gid.hex[:12]}.. has no locators")
    return frozenset(result)


def update_binding(ilm: IlmNode, gid: GlobalId, action: str, na: NetworkAddress) -> frozenset:
    """Add or remove one locator; removing the last locator of a record with
    no indirect binding deletes the record everywhere."""
    rec = _lookup(ilm, gid)
    if rec is None:
        raise NotFound(f"identifier {gid.hex[:12]}.. is not registered")
    if action == "add":
        if na not in rec.locators and len(rec.locators) >= LOCATOR_LIMIT:
            raise LocatorLimitExceeded(
                f"{rec.hrn!r} already binds {LOCATOR_LIMIT} addresses"
            )
        rec.locators.add(na)
    elif action == "remove":
        rec.locators.discard(na)
        if not rec.locators and rec.indirect_target is None:
            for holder in rec.holders:
                holder.table.pop(gid, None)
            rec.holders.clear()
    else:
        raise InvalidParams(f"unknown binding action {action!r}")
    return frozenset(rec.locators)


# -- constrained local domains -------------------------------------------------


class Gateway:
    """One mMTC local domain: an 8-bit short-name space mapped to global ids."""

    def __init__(self, naming: NamingService, node_id: int = -1):
        self.naming = naming
        self.node_id = node_id
        self._lid_to_gid = {}
        self._gid_to_lid = {}
        self._freed = []
        self._next = 0

    def live_count(self) -> int:
        return len(self._lid_to_gid)

    def register_local(self, hrn: str) -> int:
        gid = self.naming.assign_id(hrn)
        existing = self._gid_to_lid.get(gid)
        if existing is not None:
            return existing
        if self._freed:
            lid = heapq.heappop(self._freed)
        elif self._next < LOCAL_NAMESPACE:
            lid = self._next
            self._next += 1
        else:
            raise NamespaceExhausted(
                f"local domain is full ({LOCAL_NAMESPACE} short names)"
            )
        self._lid_to_gid[lid] = gid
        self._gid_to_lid[gid] = lid
        return lid

    def deregister_local(self, lid: int) -> None:
        gid = self._lid_to_gid.pop(lid, None)
        if gid is None:
            raise NotFound(f"short name {lid} is not allocated")
        del self._gid_to_lid[gid]
        heapq.heappush(self._freed, lid)

    def translate(self, lid: int) -> GlobalId:
        gid = self._lid_to_gid.get(lid)
        if gid is None:
            raise NotFound(f"short name {lid} is not allocated")
        return gid

    def translate_back(self, gid: GlobalId) -> int:
        lid = self._gid_to_lid.get(gid)
        if lid is None:
            raise NotFound(f"identifier {gid.hex[:12]}.. has no short name here")
        return lid


def register_local(gw: Gateway, hrn: str) -> int:
    return gw.register_local(hrn)


def translate(gw: Gateway, lid: int) -> GlobalId:
    return gw.translate(lid)


def translate_back(gw: Gateway, gid: GlobalId) -> int:
    return gw.translate_back(gid)


# -- resolver tree construction -------------------------------------------------


@dataclass
class IlmTree:
    root: IlmNode
    levels: list                      # levels[i]: one resolver per container
    by_ref: dict                      # (level, index) -> IlmNode
    naming: NamingService

    def leaf_for_container(self, index_position: int) -> IlmNode:
        return self.levels[0][index_position]


def build_ilm_tree(hierarchy) -> IlmTree:
    """One resolver per container, parented by containment, plus the nonlocal
    root with the naming service above the top level."""
    naming = NamingService()
    root = IlmNode(container_ref=None, naming=naming)
    n_levels = len(hierarchy.levels)
    labels = getattr(hierarchy, "level_labels", None)
    levels = [None] * n_levels
    levels[-1] = [
        IlmNode(container_ref=(c.level, c.index), parent=root)
        for c in hierarchy.levels[-1]
    ]
    for li in range(n_levels - 2, -1, -1):
        upper = levels[li + 1]
        nodes = []
        for c in hierarchy.levels[li]:
            if labels:
                parent_pos = int(labels[li + 1][next(iter(c.members))])
            else:
                parent_pos = None
                for up_pos, up_c in enumerate(hierarchy.levels[li + 1]):
                    if c.members <= up_c.members:
                        parent_pos = up_pos
                        break
                if parent_pos is None:
                    raise InvalidParams(
                        f"container {c.level}/{c.index} has no covering parent"
                    )
            nodes.append(IlmNode(container_ref=(c.level, c.index), parent=upper[parent_pos]))
        levels[li] = nodes
    by_ref = {node.container_ref: node for row in levels for node in row}
    return IlmTree(root=root, levels=levels, by_ref=by_ref, naming=naming)


# -- table dump ------------------------------------------------------------------


def dump_table(ilm: IlmNode) -> str:
    lines = []
    for gid in sorted(ilm.table):
        rec = ilm.table[gid]
        indirect = rec.indirect_target.hex if rec.indirect_target else "-"
        nas = ",".join(str(na) for na in sorted(rec.locators)) if rec.locators else "-"
        lines.append(f"rec {gid.hex} {rec.hrn} {indirect} {nas}")
    return "\n".join(lines) + ("\n" if lines else "")
