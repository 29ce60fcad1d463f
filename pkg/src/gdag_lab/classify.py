"""Classification machinery: classicality-preserving transformations, the
search for the C = I sufficient condition, and reduction rules.

The sufficient condition holds for a GDAG when some sequence of the four
transformations reaches an all-observed DAG requiring no extra observable
conditional independences.  The search enumerates every ordering of the
"tricky" observed nodes (those with unobserved parents) paired with every
choice of root unobserved node feeding each, which is complete for the
condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterator, Optional, Union

from .graph import GDag, NodeKind, _bits
from .dsep import _dsep_mask, _observed_triples, ci_subset


class TransformError(ValueError):
    """A transformation or reduction precondition failed."""


# -- the four classicality-preserving transformations -------------------


@dataclass(frozen=True)
class RemoveEdge:
    a: str
    b: str


@dataclass(frozen=True)
class RemoveIsolatedUnobserved:
    n: str


@dataclass(frozen=True)
class AddEdgeUnobservedPath:
    """Add a -> b where a directed path a to b through unobserved
    intermediates already exists."""

    a: str
    b: str


@dataclass(frozen=True)
class AddEdgeParentSubset:
    """Add a -> b where Pa(a) is a subset of Pa(b) and contains an
    unobserved node."""

    a: str
    b: str


Transformation = Union[
    RemoveEdge, RemoveIsolatedUnobserved, AddEdgeUnobservedPath, AddEdgeParentSubset
]


def _unobs_reachable(g: GDag, a: int) -> int:
    """Nodes b with a directed path a -> ... -> b whose intermediate
    nodes are all unobserved (mask; direct children included)."""
    unobs = g.all_mask & ~g.observed_mask
    reach = g.child_mask[a]
    frontier = reach & unobs
    while frontier:
        new = 0
        for i in _bits(frontier):
            new |= g.child_mask[i]
        frontier = new & unobs & ~reach
        reach |= new
    return reach


def apply_transformation(g: GDag, t: Transformation) -> GDag:
    """Apply one transformation, checking its precondition."""
    if isinstance(t, RemoveEdge):
        if (t.a, t.b) not in g.edges:
            raise TransformError(f"no edge ({t.a!r}, {t.b!r}) to remove")
        return g.without_edge(t.a, t.b)

    if isinstance(t, RemoveIsolatedUnobserved):
        if t.n not in g.index:
            raise TransformError(f"unknown node {t.n!r}")
        if g.is_observed(t.n):
            raise TransformError(f"{t.n!r} is observed")
        if g.parents(t.n) or g.children(t.n):
            raise TransformError(f"{t.n!r} is not isolated")
        return g.without_nodes([t.n])

    if isinstance(t, AddEdgeUnobservedPath):
        ia, ib = g.index[t.a], g.index[t.b]
        if (t.a, t.b) in g.edges:
            raise TransformError(f"edge ({t.a!r}, {t.b!r}) already present")
        if not (_unobs_reachable(g, ia) >> ib) & 1:
            raise TransformError(
                f"no directed path {t.a!r} to {t.b!r} through unobserved nodes"
            )
        return g.with_edge(t.a, t.b)

    if isinstance(t, AddEdgeParentSubset):
        ia, ib = g.index[t.a], g.index[t.b]
        if (t.a, t.b) in g.edges:
            raise TransformError(f"edge ({t.a!r}, {t.b!r}) already present")
        pa, pb = g.parent_mask[ia], g.parent_mask[ib]
        if pa & ~pb:
            raise TransformError(f"Pa({t.a!r}) is not a subset of Pa({t.b!r})")
        if not pa & ~g.observed_mask:
            raise TransformError(f"Pa({t.a!r}) contains no unobserved node")
        if (g.desc_mask[ib] >> ia) & 1:
            raise TransformError(f"adding ({t.a!r}, {t.b!r}) would create a cycle")
        return g.with_edge(t.a, t.b)

    raise TransformError(f"unknown transformation {t!r}")


@dataclass(frozen=True)
class Certificate:
    """A replayable transformation sequence ending in an all-observed DAG
    that needs no extra observable independences; proves C = I."""

    source: GDag
    steps: tuple[Transformation, ...]
    final: GDag

    def replay(self) -> GDag:
        g = self.source
        for t in self.steps:
            g = apply_transformation(g, t)
        return g

    def verify(self) -> bool:
        if any(k is NodeKind.UNOBSERVED for k in self.final.kinds):
            return False
        return self.replay() == self.final and ci_subset(self.final, self.source)


# -- the certificate search over orderings and root assignments ---------


def _closure_step_list(g: GDag) -> tuple[GDag, list[Transformation]]:
    """Maximal application of the unobserved-path edge addition."""
    steps: list[Transformation] = []
    changed = True
    while changed:
        changed = False
        for a in g.names:
            reach = _unobs_reachable(g, g.index[a])
            for ib in _bits(reach & ~g.child_mask[g.index[a]]):
                b = g.names[ib]
                if a == b:
                    continue
                t = AddEdgeUnobservedPath(a, b)
                g = apply_transformation(g, t)
                steps.append(t)
                changed = True
    return g, steps


def _final_edges_for_branch(
    g1: GDag, order: tuple[int, ...], roots: tuple[int, ...]
) -> tuple[int, ...]:
    """Simulate one branch on parent bitmasks; return the final parent
    masks restricted to observed nodes (original index space)."""
    par = list(g1.parent_mask)
    unobs = g1.all_mask & ~g1.observed_mask
    for i, t in enumerate(order):
        later = 0
        for j in order[i + 1:]:
            later |= 1 << j
        par[t] &= ~(later | (unobs & ~(1 << roots[i])))
        for j in order[i + 1:]:
            if (par[j] >> t) & 1:
                continue
            if par[t] & ~par[j]:
                continue
            if not par[t] & unobs:
                continue
            # cycle check: t must not be a descendant of j under current edges
            seen = 1 << t
            frontier = par[t]
            hit = False
            while frontier:
                if (frontier >> j) & 1:
                    hit = True
                    break
                seen |= frontier
                new = 0
                for k in _bits(frontier):
                    new |= par[k]
                frontier = new & ~seen
            if hit:
                continue
            par[j] |= 1 << t
    obs_idx = [i for i in range(len(g1.names)) if (g1.observed_mask >> i) & 1]
    return tuple(par[i] & g1.observed_mask for i in obs_idx)


def _branch_transformations(
    g: GDag, g1: GDag, step1: list[Transformation],
    order: tuple[int, ...], roots: tuple[int, ...],
) -> list[Transformation]:
    """Materialize the full transformation list for one branch."""
    steps = list(step1)
    h = g1
    unobs = set(g1.unobserved_nodes())
    for i, ti in enumerate(order):
        t_name = g1.names[ti]
        later = {g1.names[j] for j in order[i + 1:]}
        root_name = g1.names[roots[i]]
        for p in list(h.parents(t_name)):
            if p in later or (p in unobs and p != root_name):
                tr = RemoveEdge(p, t_name)
                h = apply_transformation(h, tr)
                steps.append(tr)
        for j in order[i + 1:]:
            j_name = g1.names[j]
            try:
                tr2 = AddEdgeParentSubset(t_name, j_name)
                h = apply_transformation(h, tr2)
                steps.append(tr2)
            except TransformError:
                pass
    for a, b in list(h.edges):
        if a in unobs or b in unobs:
            tr = RemoveEdge(a, b)
            h = apply_transformation(h, tr)
            steps.append(tr)
    for n in g1.names:
        if n in unobs:
            tr = RemoveIsolatedUnobserved(n)
            h = apply_transformation(h, tr)
            steps.append(tr)
    return steps


def _ci_subset_masks(final_par: tuple[int, ...], g: GDag) -> bool:
    """ci_subset for a branch final given as observed parent masks."""
    obs_idx = [i for i in range(len(g.names)) if (g.observed_mask >> i) & 1]
    final = GDag(
        [(g.names[i], NodeKind.OBSERVED) for i in obs_idx],
        [
            (g.names[p], g.names[c])
            for c, pm in zip(obs_idx, final_par)
            for p in _bits(pm)
        ],
    )
    for xm, ym, zm in _observed_triples(final):
        if _dsep_mask(final, xm, ym, zm):
            xo = g.mask_of(final.names_of(xm))
            yo = g.mask_of(final.names_of(ym))
            zo = g.mask_of(final.names_of(zm))
            if not _dsep_mask(g, xo, yo, zo):
                return False
    return True


def sufficient_condition_holds(g: GDag) -> Optional[Certificate]:
    """Search every ordering/root-assignment branch; return the first
    certificate found (deterministic order) or None."""
    g1, step1 = _closure_step_list(g)
    unobs = g1.all_mask & ~g1.observed_mask
    tricky = [
        i
        for i in range(len(g1.names))
        if (g1.observed_mask >> i) & 1 and g1.parent_mask[i] & unobs
    ]
    root_set = [
        i
        for i in range(len(g1.names))
        if not (g1.observed_mask >> i) & 1 and not g1.parent_mask[i] & unobs
    ]
    candidates = {
        t: [r for r in root_set if (g1.child_mask[r] >> t) & 1] for t in tricky
    }

    tried: dict[tuple[int, ...], bool] = {}
    for order in permutations(tricky):
        pools = [candidates[t] for t in order]
        if any(not p for p in pools):
            continue
        for roots in product(*pools):
            final_par = _final_edges_for_branch(g1, order, roots)
            ok = tried.get(final_par)
            if ok is None:
                ok = _ci_subset_masks(final_par, g)
                tried[final_par] = ok
            if ok:
                steps = tuple(_branch_transformations(g, g1, step1, order, roots))
                final = g
                for t in steps:
                    final = apply_transformation(final, t)
                return Certificate(g, steps, final)
    return None


# -- reduction rules ----------------------------------------------------


@dataclass(frozen=True)
class DropDisconnectedComponent:
    node: str  # identifies the weakly connected component to remove


@dataclass(frozen=True)
class DropChildlessUnobserved:
    node: str


@dataclass(frozen=True)
class MergeUnobservedIntoUnobservedParent:
    node: str


@dataclass(frozen=True)
class DropOneOutcomeObserved:
    """Remove an observed node whose variable the caller asserts takes a
    single value; never applied automatically by reduce()."""

    node: str


@dataclass(frozen=True)
class DropRedundantObservedEdge:
    parent: str
    child: str


@dataclass(frozen=True)
class AbsorbDominatedUnobserved:
    node: str
    into: str


@dataclass(frozen=True)
class MergeUnobservedIntoSoleChild:
    node: str


@dataclass(frozen=True)
class MergeObservedIntoParentlessUnobservedParent:
    node: str  # the observed node being merged upward


ReductionRule = Union[
    DropDisconnectedComponent,
    DropChildlessUnobserved,
    MergeUnobservedIntoUnobservedParent,
    DropOneOutcomeObserved,
    DropRedundantObservedEdge,
    AbsorbDominatedUnobserved,
    MergeUnobservedIntoSoleChild,
    MergeObservedIntoParentlessUnobservedParent,
]

#: Rules valid only for theories able to transmit classical information
#: perfectly (includes the classical and quantum theories).
CARDINALITY_ASSUMING_RULES = (
    MergeUnobservedIntoSoleChild,
    MergeObservedIntoParentlessUnobservedParent,
)


def assumes_classical_encoding(r: ReductionRule) -> bool:
    return isinstance(r, CARDINALITY_ASSUMING_RULES)


def _component_of(g: GDag, n: str) -> frozenset[str]:
    i = g.index[n]
    seen = 1 << i
    frontier = seen
    while frontier:
        new = 0
        for k in _bits(frontier):
            new |= g.parent_mask[k] | g.child_mask[k]
        frontier = new & ~seen
        seen |= frontier
    return g.names_of(seen)


def apply_reduction(g: GDag, r: ReductionRule) -> GDag:
    """Apply one reduction rule, checking its precondition."""
    if isinstance(r, DropDisconnectedComponent):
        if r.node not in g.index:
            raise TransformError(f"unknown node {r.node!r}")
        comp = _component_of(g, r.node)
        if len(comp) == len(g.names):
            raise TransformError("graph is connected")
        return g.without_nodes(comp)

    if isinstance(r, DropChildlessUnobserved):
        if g.is_observed(r.node):
            raise TransformError(f"{r.node!r} is observed")
        if g.children(r.node):
            raise TransformError(f"{r.node!r} has children")
        return g.without_nodes([r.node])

    if isinstance(r, MergeUnobservedIntoUnobservedParent):
        n = r.node
        if g.is_observed(n):
            raise TransformError(f"{n!r} is observed")
        pa = g.parents(n)
        if len(pa) != 1:
            raise TransformError(f"{n!r} does not have exactly one parent")
        (p,) = pa
        if g.is_observed(p):
            raise TransformError(f"parent {p!r} is observed")
        h = g.without_nodes([n])
        for c in sorted(g.children(n), key=g.index.__getitem__):
            if not h.has_edge(p, c):
                h = h.with_edge(p, c)
        return h

    if isinstance(r, DropOneOutcomeObserved):
        if not g.is_observed(r.node):
            raise TransformError(f"{r.node!r} is not observed")
        return g.without_nodes([r.node])

    if isinstance(r, DropRedundantObservedEdge):
        y, x = r.parent, r.child
        if (y, x) not in g.edges:
            raise TransformError(f"no edge ({y!r}, {x!r})")
        if not g.is_observed(x):
            raise TransformError(f"{x!r} is not observed")
        if any(not g.is_observed(p) for p in g.parents(x)):
            raise TransformError(f"{x!r} has an unobserved parent")
        h = g.without_edge(y, x)
        if not ci_subset(h, g):
            raise TransformError(
                "edge removal would introduce new observable independences"
            )
        return h

    if isinstance(r, AbsorbDominatedUnobserved):
        n, m = r.node, r.into
        if n == m:
            raise TransformError("node cannot absorb itself")
        if g.is_observed(n) or g.is_observed(m):
            raise TransformError("both nodes must be unobserved")
        if not (g.parents(n) <= g.parents(m) and g.children(n) <= g.children(m)):
            raise TransformError(
                f"{n!r} is not dominated by {m!r}"
            )
        return g.without_nodes([n])

    if isinstance(r, MergeUnobservedIntoSoleChild):
        n = r.node
        if g.is_observed(n):
            raise TransformError(f"{n!r} is observed")
        ch = g.children(n)
        if len(ch) != 1:
            raise TransformError(f"{n!r} does not have exactly one child")
        (c,) = ch
        h = g.without_nodes([n])
        for p in sorted(g.parents(n), key=g.index.__getitem__):
            if not h.has_edge(p, c):
                h = h.with_edge(p, c)
        return h

    if isinstance(r, MergeObservedIntoParentlessUnobservedParent):
        y = r.node
        if not g.is_observed(y):
            raise TransformError(f"{y!r} is not observed")
        pa = g.parents(y)
        if len(pa) != 1:
            raise TransformError(f"{y!r} must have exactly one parent")
        (x,) = pa
        if g.is_observed(x):
            raise TransformError(f"parent {x!r} is observed")
        if g.parents(x):
            raise TransformError(f"parent {x!r} is not parentless")
        ch = g.children(x)
        if len(ch) != 2:
            raise TransformError(f"{x!r} must have exactly two children")
        (z,) = ch - {y}
        h = g.without_nodes([x])
        if not h.has_edge(y, z):
            h = h.with_edge(y, z)
        return h

    raise TransformError(f"unknown reduction {r!r}")


def applicable_reductions(
    g: GDag, include_one_outcome: bool = False
) -> Iterator[ReductionRule]:
    """Yield applicable rule instances in the fixed priority order.

    ``include_one_outcome`` additionally yields the observed-node removal
    rule for every observed node; that rule is only sound when the node
    is restricted to one outcome, so it is excluded by default.
    """
    comps: list[frozenset[str]] = []
    placed: set[str] = set()
    for n in g.names:
        if n not in placed:
            comp = _component_of(g, n)
            comps.append(comp)
            placed |= comp
    if len(comps) > 1:
        # remove the smallest component; keep the earliest-declared on ties
        drop = max(
            comps, key=lambda c: (-len(c), min(g.index[n] for n in c))
        )
        yield DropDisconnectedComponent(
            min(drop, key=g.index.__getitem__)
        )

    for n in g.unobserved_nodes():
        if not g.children(n):
            yield DropChildlessUnobserved(n)

    for n in g.unobserved_nodes():
        pa = g.parents(n)
        if len(pa) == 1 and not g.is_observed(next(iter(pa))):
            yield MergeUnobservedIntoUnobservedParent(n)

    if include_one_outcome:
        for n in g.observed_nodes():
            yield DropOneOutcomeObserved(n)

    for x in g.observed_nodes():
        pa = g.parents(x)
        if pa and all(g.is_observed(p) for p in pa):
            for y in sorted(pa, key=g.index.__getitem__):
                if ci_subset(g.without_edge(y, x), g):
                    yield DropRedundantObservedEdge(y, x)

    for n in g.unobserved_nodes():
        for m in g.unobserved_nodes():
            if n != m and g.parents(n) <= g.parents(m) and g.children(n) <= g.children(m):
                yield AbsorbDominatedUnobserved(n, m)

    for n in g.unobserved_nodes():
        if len(g.children(n)) == 1:
            yield MergeUnobservedIntoSoleChild(n)

    for y in g.observed_nodes():
        pa = g.parents(y)
        if len(pa) != 1:
            continue
        (x,) = pa
        if g.is_observed(x) or g.parents(x) or len(g.children(x)) != 2:
            continue
        yield MergeObservedIntoParentlessUnobservedParent(y)


def reduce(g: GDag) -> GDag:
    """Apply reduction rules to a fixed point in priority order.

    The observed-node-removal rule requires cardinality knowledge absent
    from a bare graph and is never applied here.
    """
    while True:
        rule = next(applicable_reductions(g), None)
        if rule is None:
            return g
        g = apply_reduction(g, rule)
