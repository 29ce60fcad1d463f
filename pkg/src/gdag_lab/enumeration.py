"""Enumeration of GDAGs up to kind-preserving isomorphism and the
classification census over all small GDAGs.

The census evaluates the C = I sufficient condition on every isomorphism
class.  Survivors are the condition-failing graphs from which no strictly
smaller condition-failing graph can be reached by reduction rules; the
one-outcome observed-node removal rule participates in that search
because restricting any observed variable to a single outcome never
enlarges the classical set.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterator, Optional

from .graph import GDag, NodeKind
from .classify import applicable_reductions, apply_reduction, sufficient_condition_holds

#: Node names used for generated graphs, shortest first.
_NAMES = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def canonical_key(g: GDag) -> tuple:
    """A total invariant of kind-preserving isomorphism.

    Minimizes, over all node permutations, the pair (kind vector,
    adjacency bits read row-major).  Kinds lead the encoding, so only
    kind-preserving permutations compete for the minimum.
    """
    n = len(g.names)
    kinds = tuple(0 if k is NodeKind.OBSERVED else 1 for k in g.kinds)
    adj = [g.child_mask[i] for i in range(n)]
    best: Optional[tuple] = None
    for perm in permutations(range(n)):
        kv = tuple(kinds[p] for p in perm)
        if best is not None and kv > best[0]:
            continue
        pos = [0] * n
        for new, old in enumerate(perm):
            pos[old] = new
        bits = tuple(
            (adj[perm[i]] >> perm[j]) & 1 for i in range(n) for j in range(n)
        )
        key = (kv, bits)
        if best is None or key < best:
            best = key
    return best


def canonical_form(g: GDag) -> GDag:
    """Canonical representative of the kind-preserving isomorphism class."""
    kv, bits = canonical_key(g)
    n = len(kv)
    nodes = [
        (_NAMES[i], NodeKind.OBSERVED if kv[i] == 0 else NodeKind.UNOBSERVED)
        for i in range(n)
    ]
    edges = [
        (_NAMES[i], _NAMES[j])
        for i in range(n)
        for j in range(n)
        if bits[i * n + j]
    ]
    return GDag(nodes, edges)


def isomorphic(g: GDag, h: GDag) -> bool:
    return len(g.names) == len(h.names) and canonical_key(g) == canonical_key(h)


def enumerate_gdags(n: int) -> Iterator[GDag]:
    """All GDAGs on n nodes, one per kind-preserving isomorphism class.

    Every DAG relabels to one with upper-triangular adjacency, so the
    enumeration ranges over edge subsets of the triangle crossed with all
    kind vectors, deduplicated by canonical key.
    """
    if n < 1:
        raise ValueError("n must be positive")
    pairs = list(combinations(range(n), 2))
    seen: set[tuple] = set()
    for edge_bits in range(1 << len(pairs)):
        edges = [
            (_NAMES[i], _NAMES[j])
            for k, (i, j) in enumerate(pairs)
            if (edge_bits >> k) & 1
        ]
        for kind_bits in range(1 << n):
            nodes = [
                (
                    _NAMES[i],
                    NodeKind.UNOBSERVED if (kind_bits >> i) & 1 else NodeKind.OBSERVED,
                )
                for i in range(n)
            ]
            g = GDag(nodes, edges)
            key = canonical_key(g)
            if key not in seen:
                seen.add(key)
                yield canonical_form(g)


class _ConditionCache:
    def __init__(self) -> None:
        self._cache: dict[tuple, bool] = {}

    def holds(self, g: GDag) -> bool:
        key = canonical_key(g)
        v = self._cache.get(key)
        if v is None:
            v = sufficient_condition_holds(g) is not None
            self._cache[key] = v
        return v


def _elimination_moves(g: GDag) -> Iterator[GDag]:
    """Successor graphs for the survivor search.

    Besides the reduction rules (with the one-outcome observed-node
    removal enabled), an edge into an observed node whose parents are
    all observed may be dropped unconditionally: any distribution
    satisfying the smaller graph's independences has X independent of
    the removed parent given the remaining ones, so a classical model
    using the edge converts to one without it.  Like the one-outcome
    rule this transfer runs in one direction only, which is all the
    elimination argument needs.
    """
    for rule in applicable_reductions(g, include_one_outcome=True):
        yield apply_reduction(g, rule)
    for x in g.observed_nodes():
        pa = g.parents(x)
        if pa and all(g.is_observed(p) for p in pa):
            for y in sorted(pa, key=g.index.__getitem__):
                yield g.without_edge(y, x)


def _reducible_to_smaller_failure(g: GDag, cond: _ConditionCache) -> bool:
    """Search reduction sequences from g for a strictly smaller
    condition-failing graph (fewer nodes, or equal nodes and fewer
    edges)."""
    start = (len(g.names), len(g.edges))
    seen = {canonical_key(g)}
    queue = [g]
    while queue:
        cur = queue.pop()
        for nxt in _elimination_moves(cur):
            if not nxt.names:
                continue
            key = canonical_key(nxt)
            if key in seen:
                continue
            seen.add(key)
            if (len(nxt.names), len(nxt.edges)) < start and not cond.holds(nxt):
                return True
            queue.append(nxt)
    return False


@dataclass(frozen=True)
class CensusReport:
    n: int
    total: int
    condition_holds: int
    survivors: tuple[GDag, ...]

    def csv_row(self) -> str:
        return f"{self.n},{self.total},{self.condition_holds},{len(self.survivors)}"


def classification_census(n: int, progress: bool = False) -> CensusReport:
    """Classify every n-node GDAG up to isomorphism.

    ``total`` counts isomorphism classes, ``condition_holds`` those
    passing the C = I sufficient condition, and ``survivors`` the failing
    graphs not reducible to a strictly smaller failing graph.
    """
    cond = _ConditionCache()
    total = 0
    holds = 0
    failures: list[GDag] = []
    for i, g in enumerate(enumerate_gdags(n)):
        if progress and i and i % 2000 == 0:
            print(f"  examined {i} classes", file=sys.stderr)
        total += 1
        if cond.holds(g):
            holds += 1
        else:
            failures.append(g)
    survivors = tuple(
        g for g in failures if not _reducible_to_smaller_failure(g, cond)
    )
    return CensusReport(n, total, holds, survivors)
