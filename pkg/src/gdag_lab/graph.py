"""Directed acyclic graphs whose nodes carry an observed/unobserved tag.

Graphs are immutable after construction.  All structural queries are
precomputed as bitmasks over the node indices (declaration order), which
keeps the d-separation and census machinery fast without any compiled
dependencies.
"""

from __future__ import annotations

import json
from enum import Enum
from typing import Iterable, Iterator, Sequence


class GraphError(ValueError):
    """Raised for malformed graphs: cycles, dangling edges, duplicates."""


class NodeKind(Enum):
    OBSERVED = "observed"
    UNOBSERVED = "unobserved"


def _bits(mask: int) -> Iterator[int]:
    """Yield set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class GDag:
    """A DAG with observed/unobserved node kinds.

    ``nodes`` is an ordered sequence of ``(name, kind)`` pairs; ``edges``
    an ordered sequence of ``(parent, child)`` name pairs.  Declaration
    order is significant: it drives topological tie-breaking, canonical
    search seeds and serialization, so two equal graphs serialize to the
    same bytes.
    """

    __slots__ = (
        "nodes", "edges", "names", "kinds", "index",
        "parent_mask", "child_mask", "anc_mask", "desc_mask",
        "all_mask", "observed_mask", "_topo", "_hash",
    )

    def __init__(
        self,
        nodes: Sequence[tuple[str, NodeKind]],
        edges: Iterable[tuple[str, str]] = (),
    ):
        self.nodes: tuple[tuple[str, NodeKind], ...] = tuple(
            (str(n), NodeKind(k)) for n, k in nodes
        )
        self.edges: tuple[tuple[str, str], ...] = tuple(
            (str(a), str(b)) for a, b in edges
        )
        names = tuple(n for n, _ in self.nodes)
        if len(set(names)) != len(names):
            raise GraphError("duplicate node id")
        for n in names:
            if not n or any(c.isspace() for c in n):
                raise GraphError(f"bad node id {n!r}")
        self.names = names
        self.kinds = tuple(k for _, k in self.nodes)
        self.index = {n: i for i, n in enumerate(names)}

        n = len(names)
        self.all_mask = (1 << n) - 1
        self.observed_mask = 0
        for i, k in enumerate(self.kinds):
            if k is NodeKind.OBSERVED:
                self.observed_mask |= 1 << i

        parent_mask = [0] * n
        child_mask = [0] * n
        seen = set()
        for a, b in self.edges:
            if a not in self.index or b not in self.index:
                raise GraphError(f"edge ({a!r}, {b!r}) references unknown node")
            if a == b:
                raise GraphError(f"self-loop on {a!r}")
            if (a, b) in seen:
                raise GraphError(f"duplicate edge ({a!r}, {b!r})")
            seen.add((a, b))
            ia, ib = self.index[a], self.index[b]
            parent_mask[ib] |= 1 << ia
            child_mask[ia] |= 1 << ib
        self.parent_mask = tuple(parent_mask)
        self.child_mask = tuple(child_mask)

        self._topo = self._toposort()

        anc = [0] * n
        for i in self._topo:
            m = 1 << i
            for p in _bits(parent_mask[i]):
                m |= anc[p]
            anc[i] = m
        self.anc_mask = tuple(anc)
        desc = [0] * n
        for i in reversed(self._topo):
            m = 1 << i
            for c in _bits(child_mask[i]):
                m |= desc[c]
            desc[i] = m
        self.desc_mask = tuple(desc)
        self._hash = hash((self.nodes, frozenset(self.edges)))

    def _toposort(self) -> tuple[int, ...]:
        n = len(self.names)
        indeg = [bin(self.parent_mask[i]).count("1") for i in range(n)]
        order: list[int] = []
        ready = [i for i in range(n) if indeg[i] == 0]
        while ready:
            # lowest declaration index first
            i = min(ready)
            ready.remove(i)
            order.append(i)
            for c in _bits(self.child_mask[i]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(order) != n:
            raise GraphError("cycle detected")
        return tuple(order)

    # -- identity ------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GDag):
            return NotImplemented
        return self.nodes == other.nodes and frozenset(self.edges) == frozenset(
            other.edges
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"GDag(nodes={self.nodes!r}, edges={self.edges!r})"

    # -- mask helpers --------------------------------------------------

    def mask_of(self, names: Iterable[str]) -> int:
        m = 0
        for n in names:
            try:
                m |= 1 << self.index[n]
            except KeyError:
                raise GraphError(f"unknown node id {n!r}") from None
        return m

    def names_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.names[i] for i in _bits(mask))

    # -- structural queries --------------------------------------------

    def is_observed(self, name: str) -> bool:
        return self.kinds[self.index[name]] is NodeKind.OBSERVED

    def observed_nodes(self) -> tuple[str, ...]:
        return tuple(
            n for n, k in self.nodes if k is NodeKind.OBSERVED
        )

    def unobserved_nodes(self) -> tuple[str, ...]:
        return tuple(
            n for n, k in self.nodes if k is NodeKind.UNOBSERVED
        )

    def parents(self, name: str) -> frozenset[str]:
        return self.names_of(self.parent_mask[self.index[name]])

    def children(self, name: str) -> frozenset[str]:
        return self.names_of(self.child_mask[self.index[name]])

    def has_edge(self, a: str, b: str) -> bool:
        return (a, b) in self.edges

    def inclusive_ancestors(self, u: Iterable[str]) -> frozenset[str]:
        """An(u): u together with every ancestor of a member of u."""
        m = 0
        for i in _bits(self.mask_of(u)):
            m |= self.anc_mask[i]
        return self.names_of(m)

    def inclusive_children(self, u: Iterable[str]) -> frozenset[str]:
        """ch(u): u together with every child of a member of u."""
        um = self.mask_of(u)
        m = um
        for i in _bits(um):
            m |= self.child_mask[i]
        return self.names_of(m)

    def topological_order(self) -> tuple[str, ...]:
        return tuple(self.names[i] for i in self._topo)

    # -- derived graphs ------------------------------------------------

    def with_edge(self, a: str, b: str) -> "GDag":
        return GDag(self.nodes, self.edges + ((a, b),))

    def without_edge(self, a: str, b: str) -> "GDag":
        if (a, b) not in self.edges:
            raise GraphError(f"no edge ({a!r}, {b!r})")
        return GDag(self.nodes, tuple(e for e in self.edges if e != (a, b)))

    def without_nodes(self, drop: Iterable[str]) -> "GDag":
        gone = set(drop)
        return GDag(
            tuple(nk for nk in self.nodes if nk[0] not in gone),
            tuple(e for e in self.edges if e[0] not in gone and e[1] not in gone),
        )

    # -- serialization -------------------------------------------------

    def to_json(self) -> str:
        obj = {
            "nodes": [{"id": n, "kind": k.value} for n, k in self.nodes],
            "edges": [[a, b] for a, b in self.edges],
        }
        return json.dumps(obj, separators=(", ", ": "))


def parse_gdag(text: str) -> GDag:
    """Parse the JSON graph format; raises GraphError on invalid input."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphError(f"invalid JSON: {e}") from None
    if not isinstance(obj, dict) or "nodes" not in obj or "edges" not in obj:
        raise GraphError("expected object with 'nodes' and 'edges'")
    try:
        nodes = [(d["id"], NodeKind(d["kind"])) for d in obj["nodes"]]
        edges = [(a, b) for a, b in obj["edges"]]
    except (TypeError, KeyError, ValueError) as e:
        raise GraphError(f"malformed node or edge entry: {e}") from None
    return GDag(nodes, edges)


def serialize_gdag(g: GDag) -> str:
    return g.to_json()
