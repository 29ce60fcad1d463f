"""d-separation queries and observable conditional-independence sets.

Two equivalent formulations are provided: reachability in the
pseudo-adjacency relation (two nodes linked when adjacent or sharing a
child outside the exogenous remainder W), and the four-set partition
{U, V, Z, W} witness form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .graph import GDag, GraphError, _bits


@dataclass(frozen=True)
class CIStatement:
    """A conditional-independence triple (x independent of y given z).

    Stored in a canonical orientation: the lexicographically smaller of
    the two sides is ``x``, so the x/y symmetry collapses.
    """

    x: frozenset[str]
    y: frozenset[str]
    z: frozenset[str]

    def __post_init__(self):
        if not self.x or not self.y:
            raise ValueError("x and y must be nonempty")
        if self.x & self.y or self.x & self.z or self.y & self.z:
            raise ValueError("x, y, z must be pairwise disjoint")

    def canonical(self) -> "CIStatement":
        if sorted(self.y) < sorted(self.x):
            return CIStatement(self.y, self.x, self.z)
        return self

    def sort_key(self) -> tuple:
        return (sorted(self.x), sorted(self.y), sorted(self.z))


class CISet:
    """A set of CI statements, closed under the x/y symmetry."""

    def __init__(self, statements: Iterable[CIStatement] = ()):
        self._stmts = frozenset(s.canonical() for s in statements)

    def __contains__(self, s: CIStatement) -> bool:
        return s.canonical() in self._stmts

    def __iter__(self) -> Iterator[CIStatement]:
        return iter(sorted(self._stmts, key=CIStatement.sort_key))

    def __len__(self) -> int:
        return len(self._stmts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CISet):
            return NotImplemented
        return self._stmts == other._stmts

    def __hash__(self) -> int:
        return hash(self._stmts)

    def __le__(self, other: "CISet") -> bool:
        return self._stmts <= other._stmts

    def to_json(self) -> str:
        rows = [
            {"x": sorted(s.x), "y": sorted(s.y), "z": sorted(s.z)}
            for s in self
        ]
        return json.dumps(rows, separators=(", ", ": "))


@dataclass(frozen=True)
class DsepWitness:
    """A partition {u, v, z, w} of the nodes certifying d-separation."""

    u: frozenset[str]
    v: frozenset[str]
    z: frozenset[str]
    w: frozenset[str]


def _check_disjoint(g: GDag, x, y, z) -> tuple[int, int, int]:
    xm, ym, zm = g.mask_of(x), g.mask_of(y), g.mask_of(z)
    if xm & ym or xm & zm or ym & zm:
        raise GraphError("x, y, z must be pairwise disjoint")
    return xm, ym, zm


def _w_mask(g: GDag, xm: int, ym: int, zm: int) -> int:
    anc = 0
    for i in _bits(xm | ym | zm):
        anc |= g.anc_mask[i]
    return g.all_mask & ~anc


def _pseudo_closure(g: GDag, seed: int, w: int, blocked: int) -> int:
    """Nodes reachable from ``seed`` along pseudo-paths avoiding ``blocked``.

    Two live nodes are linked when they are joined by an edge in either
    direction or share a child outside W.
    """
    live = g.all_mask & ~w & ~blocked
    reach = seed & live
    frontier = reach
    ch = g.child_mask
    pa = g.parent_mask
    not_w = ~w
    while frontier:
        new = 0
        for i in _bits(frontier):
            new |= (ch[i] | pa[i]) & live
            ci = ch[i] & not_w
            if ci:
                for j in _bits(live & ~reach):
                    if ci & ch[j]:
                        new |= 1 << j
        frontier = new & live & ~reach
        reach |= frontier
    return reach


def _dsep_mask(g: GDag, xm: int, ym: int, zm: int) -> bool:
    w = _w_mask(g, xm, ym, zm)
    return not (_pseudo_closure(g, xm, w, zm) & ym)


def exogenous_remainder(g: GDag, x, y, z) -> frozenset[str]:
    """W: every node outside the inclusive ancestry of x, y and z."""
    xm, ym, zm = _check_disjoint(g, x, y, z)
    return g.names_of(_w_mask(g, xm, ym, zm))


def d_separated(g: GDag, x, y, z) -> bool:
    """True iff every pseudo-path from x to y passes through z."""
    xm, ym, zm = _check_disjoint(g, x, y, z)
    return _dsep_mask(g, xm, ym, zm)


def d_separated_via_partition(g: GDag, x, y, z) -> Optional[DsepWitness]:
    """Return a {U, V, Z, W} witness partition, or None if not separated.

    U is the pseudo-path closure of x avoiding z; V is everything else.
    """
    xm, ym, zm = _check_disjoint(g, x, y, z)
    w = _w_mask(g, xm, ym, zm)
    um = _pseudo_closure(g, xm, w, zm)
    if um & ym:
        return None
    vm = g.all_mask & ~(um | w | zm)
    return DsepWitness(
        u=g.names_of(um), v=g.names_of(vm), z=g.names_of(zm), w=g.names_of(w)
    )


def _observed_triples(g: GDag) -> Iterator[tuple[int, int, int]]:
    """All canonically-oriented disjoint (x, y, z) observed-subset triples.

    Canonical orientation: the lowest-index node of x | y lies in x.
    """
    obs = [i for i in range(len(g.names)) if (g.observed_mask >> i) & 1]
    n = len(obs)
    # assignment digit: 0 = outside, 1 = x, 2 = y, 3 = z
    for code in range(4 ** n):
        xm = ym = zm = 0
        c = code
        first_xy = -1
        for i in obs:
            d = c & 3
            c >>= 2
            if d == 1:
                xm |= 1 << i
                if first_xy < 0:
                    first_xy = 1
            elif d == 2:
                ym |= 1 << i
                if first_xy < 0:
                    first_xy = 2
            elif d == 3:
                zm |= 1 << i
        if not xm or not ym or first_xy != 1:
            continue
        yield xm, ym, zm


def observable_ci_set(g: GDag) -> CISet:
    """All d-separation statements over disjoint observed-node subsets."""
    stmts = []
    for xm, ym, zm in _observed_triples(g):
        if _dsep_mask(g, xm, ym, zm):
            stmts.append(
                CIStatement(g.names_of(xm), g.names_of(ym), g.names_of(zm))
            )
    return CISet(stmts)


def ci_subset(g_new: GDag, g_old: GDag) -> bool:
    """True iff every observable CI of ``g_new`` already holds in ``g_old``."""
    if set(g_new.observed_nodes()) != set(g_old.observed_nodes()):
        raise GraphError("observed node sets differ")
    remap = g_new.names != g_old.names or g_new.observed_mask != g_old.observed_mask
    for xm, ym, zm in _observed_triples(g_new):
        if _dsep_mask(g_new, xm, ym, zm):
            if remap:
                xo = g_old.mask_of(g_new.names_of(xm))
                yo = g_old.mask_of(g_new.names_of(ym))
                zo = g_old.mask_of(g_new.names_of(zm))
            else:
                xo, yo, zo = xm, ym, zm
            if not _dsep_mask(g_old, xo, yo, zo):
                return False
    return True
