"""Exact-rational probability tables, classical network evaluation and
information quantities.

All probabilities are ``fractions.Fraction``; conditional-independence
checks are exact.  Entropies are the only floating-point quantities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .graph import GDag, NodeKind
from . import dsep


class ModelError(ValueError):
    """Raised for malformed tables or graph/table mismatches."""


def _parse_frac(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s)
    if isinstance(s, int):
        return Fraction(s)
    raise ModelError(f"expected rational string, got {s!r}")


@dataclass(frozen=True)
class Distribution:
    """Joint distribution over named finite variables, row-major order."""

    variables: tuple[tuple[str, int], ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        size = 1
        for name, card in self.variables:
            if card < 1:
                raise ModelError(f"cardinality of {name!r} must be >= 1")
            size *= card
        if len(self.probs) != size:
            raise ModelError(
                f"expected {size} entries, got {len(self.probs)}"
            )
        if any(p < 0 for p in self.probs):
            raise ModelError("negative probability")
        if sum(self.probs, Fraction(0)) != 1:
            raise ModelError("probabilities must sum to exactly 1")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.variables)

    def card(self, name: str) -> int:
        for n, c in self.variables:
            if n == name:
                return c
        raise ModelError(f"unknown variable {name!r}")

    def outcomes(self) -> Iterable[tuple[int, ...]]:
        return product(*(range(c) for _, c in self.variables))

    def prob(self, outcome: Sequence[int]) -> Fraction:
        idx = 0
        for (name, card), v in zip(self.variables, outcome):
            if not 0 <= v < card:
                raise ModelError(f"outcome {v} out of range for {name!r}")
            idx = idx * card + v
        return self.probs[idx]

    def marginal(self, names: Iterable[str]) -> "Distribution":
        keep = list(names)
        pos = {n: i for i, (n, _) in enumerate(self.variables)}
        for n in keep:
            if n not in pos:
                raise ModelError(f"unknown variable {n!r}")
        kept_vars = tuple((n, self.card(n)) for n in keep)
        table: dict[tuple[int, ...], Fraction] = {}
        for outcome, p in zip(self.outcomes(), self.probs):
            key = tuple(outcome[pos[n]] for n in keep)
            table[key] = table.get(key, Fraction(0)) + p
        probs = tuple(
            table.get(o, Fraction(0))
            for o in product(*(range(c) for _, c in kept_vars))
        )
        return Distribution(kept_vars, probs)

    def to_json(self) -> str:
        obj = {
            "variables": [{"id": n, "card": c} for n, c in self.variables],
            "probs": [str(p) for p in self.probs],
        }
        return json.dumps(obj, separators=(", ", ": "))

    @staticmethod
    def from_json(text: str) -> "Distribution":
        try:
            obj = json.loads(text)
            variables = tuple((d["id"], int(d["card"])) for d in obj["variables"])
            probs = tuple(_parse_frac(p) for p in obj["probs"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ModelError(f"bad distribution JSON: {e}") from None
        return Distribution(variables, probs)


@dataclass(frozen=True)
class ConditionalDistribution:
    """A family of joint distributions indexed by conditioning variables.

    ``probs`` is row-major over the ``given`` values (outer) followed by
    the ``variables`` values (inner); every conditioning slice sums to 1.
    """

    variables: tuple[tuple[str, int], ...]
    given: tuple[tuple[str, int], ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        inner = math.prod(c for _, c in self.variables)
        outer = math.prod(c for _, c in self.given)
        if len(self.probs) != inner * outer:
            raise ModelError("wrong table size")
        if any(p < 0 for p in self.probs):
            raise ModelError("negative probability")
        for k in range(outer):
            s = sum(self.probs[k * inner:(k + 1) * inner], Fraction(0))
            if s != 1:
                raise ModelError(f"conditioning slice {k} sums to {s}, not 1")

    def slice(self, given_values: Sequence[int]) -> Distribution:
        idx = 0
        for (name, card), v in zip(self.given, given_values):
            if not 0 <= v < card:
                raise ModelError(f"value {v} out of range for {name!r}")
            idx = idx * card + v
        inner = math.prod(c for _, c in self.variables)
        return Distribution(
            self.variables, self.probs[idx * inner:(idx + 1) * inner]
        )

    def to_json(self) -> str:
        obj = {
            "variables": [{"id": n, "card": c} for n, c in self.variables],
            "given": [{"id": n, "card": c} for n, c in self.given],
            "probs": [str(p) for p in self.probs],
        }
        return json.dumps(obj, separators=(", ", ": "))

    @staticmethod
    def from_json(text: str) -> "ConditionalDistribution":
        try:
            obj = json.loads(text)
            variables = tuple((d["id"], int(d["card"])) for d in obj["variables"])
            given = tuple((d["id"], int(d["card"])) for d in obj.get("given", []))
            probs = tuple(_parse_frac(p) for p in obj["probs"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ModelError(f"bad conditional distribution JSON: {e}") from None
        return ConditionalDistribution(variables, given, probs)


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table for one node given its parents.

    ``table`` maps each parent-outcome tuple (in ``given`` order) to a
    distribution over the node's outcomes.
    """

    node: str
    card: int
    given: tuple[tuple[str, int], ...]
    table: Mapping[tuple[int, ...], tuple[Fraction, ...]]

    def __post_init__(self):
        keys = set(product(*(range(c) for _, c in self.given)))
        if set(self.table) != keys:
            raise ModelError(f"CPT for {self.node!r} has wrong key set")
        for k, row in self.table.items():
            if len(row) != self.card:
                raise ModelError(f"CPT row {k} has wrong length")
            if any(p < 0 for p in row):
                raise ModelError("negative probability")
            if sum(row, Fraction(0)) != 1:
                raise ModelError(f"CPT row {k} does not sum to 1")


def joint_from_markov(dag: GDag, cpts: Sequence[Cpt]) -> Distribution:
    """Exact product-form joint of an all-observed Bayesian network."""
    if any(k is NodeKind.UNOBSERVED for k in dag.kinds):
        raise ModelError("graph has unobserved nodes")
    by_node = {c.node: c for c in cpts}
    if set(by_node) != set(dag.names):
        raise ModelError("need exactly one CPT per node")
    cards = {}
    for name in dag.names:
        cpt = by_node[name]
        if set(n for n, _ in cpt.given) != set(dag.parents(name)):
            raise ModelError(f"CPT parents for {name!r} do not match graph")
        cards[name] = cpt.card
    for name in dag.names:
        for pname, pcard in by_node[name].given:
            if cards[pname] != pcard:
                raise ModelError(f"inconsistent cardinality for {pname!r}")

    variables = tuple((n, cards[n]) for n in dag.names)
    pos = {n: i for i, n in enumerate(dag.names)}
    probs = []
    for outcome in product(*(range(c) for _, c in variables)):
        p = Fraction(1)
        for name in dag.names:
            cpt = by_node[name]
            key = tuple(outcome[pos[pn]] for pn, _ in cpt.given)
            p *= cpt.table[key][outcome[pos[name]]]
            if not p:
                break
        probs.append(p)
    return Distribution(variables, tuple(probs))


@dataclass(frozen=True)
class Kernel:
    """Classical test at one node of a GDAG.

    Conditioning is on the node's observed-parent values plus the latent
    messages on its incoming unobserved edges; the kernel emits the
    node's output together with messages on its outgoing unobserved
    edges (observed nodes emit none, unobserved nodes have a 1-valued
    output).  ``table`` maps each conditioning tuple (observed-parent
    values then in-edge messages) to a row-major row over
    (output, out-messages).
    """

    node: str
    out_card: int
    obs_parents: tuple[tuple[str, int], ...]
    in_edges: tuple[tuple[tuple[str, str], int], ...]
    out_edges: tuple[tuple[tuple[str, str], int], ...]
    table: Mapping[tuple[int, ...], tuple[Fraction, ...]]

    def __post_init__(self):
        cond_cards = [c for _, c in self.obs_parents] + [c for _, c in self.in_edges]
        keys = set(product(*(range(c) for c in cond_cards)))
        if set(self.table) != keys:
            raise ModelError(f"kernel for {self.node!r} has wrong key set")
        width = self.out_card * math.prod(c for _, c in self.out_edges)
        for k, row in self.table.items():
            if len(row) != width:
                raise ModelError(f"kernel row {k} has wrong length")
            if any(p < 0 for p in row):
                raise ModelError("negative probability")
            if sum(row, Fraction(0)) != 1:
                raise ModelError(f"kernel row {k} does not sum to 1")

    def prob(
        self,
        output: int,
        out_msgs: Sequence[int],
        cond: Sequence[int],
    ) -> Fraction:
        idx = output
        for (_, card), v in zip(self.out_edges, out_msgs):
            idx = idx * card + v
        return self.table[tuple(cond)][idx]


@dataclass(frozen=True)
class ClassicalGmcModel:
    """A classical realization of a GDAG: a kernel per node plus a finite
    message cardinality per unobserved edge."""

    gdag: GDag
    edge_cards: Mapping[tuple[str, str], int]
    kernels: Mapping[str, Kernel]

    def __post_init__(self):
        g = self.gdag
        latent_edges = [
            e for e in g.edges if not g.is_observed(e[0])
        ]
        if set(self.edge_cards) != set(latent_edges):
            raise ModelError("edge_cards must cover exactly the unobserved edges")
        if set(self.kernels) != set(g.names):
            raise ModelError("need exactly one kernel per node")
        for name in g.names:
            k = self.kernels[name]
            if k.node != name:
                raise ModelError(f"kernel node mismatch at {name!r}")
            obs_pa = tuple(
                p for p in g.names if p in g.parents(name) and g.is_observed(p)
            )
            if tuple(n for n, _ in k.obs_parents) != obs_pa:
                raise ModelError(f"kernel observed parents mismatch at {name!r}")
            in_e = tuple(
                (e, self.edge_cards[e])
                for e in g.edges
                if e[1] == name and not g.is_observed(e[0])
            )
            if k.in_edges != in_e:
                raise ModelError(f"kernel in-edges mismatch at {name!r}")
            if g.is_observed(name):
                if k.out_edges:
                    raise ModelError(
                        f"observed node {name!r} must not emit messages"
                    )
            else:
                if k.out_card != 1:
                    raise ModelError(
                        f"unobserved node {name!r} must have 1-valued output"
                    )
                out_e = tuple(
                    (e, self.edge_cards[e]) for e in g.edges if e[0] == name
                )
                if k.out_edges != out_e:
                    raise ModelError(f"kernel out-edges mismatch at {name!r}")


def observed_from_classical_gmc(model: ClassicalGmcModel) -> Distribution:
    """Sum the product of node kernels over all latent edge messages."""
    g = model.gdag
    obs = g.observed_nodes()
    variables = tuple((n, model.kernels[n].out_card) for n in obs)
    obs_pos = {n: i for i, n in enumerate(obs)}
    latent_edges = [e for e in g.edges if not g.is_observed(e[0])]
    edge_pos = {e: i for i, e in enumerate(latent_edges)}
    edge_ranges = [range(model.edge_cards[e]) for e in latent_edges]

    probs = []
    for outcome in product(*(range(c) for _, c in variables)):
        total = Fraction(0)
        for msgs in product(*edge_ranges):
            p = Fraction(1)
            for name in g.names:
                k = model.kernels[name]
                cond = tuple(
                    outcome[obs_pos[pn]] for pn, _ in k.obs_parents
                ) + tuple(msgs[edge_pos[e]] for e, _ in k.in_edges)
                if g.is_observed(name):
                    p *= k.prob(outcome[obs_pos[name]], (), cond)
                else:
                    p *= k.prob(
                        0, tuple(msgs[edge_pos[e]] for e, _ in k.out_edges), cond
                    )
                if not p:
                    break
            total += p
        probs.append(total)
    return Distribution(variables, tuple(probs))


# -- conditional independence and information quantities ----------------


def is_conditionally_independent(p: Distribution, x, y, z) -> bool:
    """Exact test of P(x,y|z) = P(x|z) P(y|z)."""
    x, y, z = frozenset(x), frozenset(y), frozenset(z)
    if x & y or x & z or y & z:
        raise ModelError("x, y, z must be pairwise disjoint")
    names = list(p.names)
    for n in x | y | z:
        if n not in names:
            raise ModelError(f"unknown variable {n!r}")
    xs = [n for n in names if n in x]
    ys = [n for n in names if n in y]
    zs = [n for n in names if n in z]
    pxyz = p.marginal(xs + ys + zs)
    pz = p.marginal(zs)
    pxz = p.marginal(xs + zs)
    pyz = p.marginal(ys + zs)
    for outcome in pxyz.outcomes():
        xv = outcome[: len(xs)]
        yv = outcome[len(xs): len(xs) + len(ys)]
        zv = outcome[len(xs) + len(ys):]
        if pxyz.prob(outcome) * pz.prob(zv) != pxz.prob(xv + zv) * pyz.prob(yv + zv):
            return False
    return True


@dataclass
class IndependenceReport:
    holds: bool
    violated: list[dsep.CIStatement] = field(default_factory=list)


def satisfies_I(g: GDag, p: Distribution) -> IndependenceReport:
    """Check every observable d-separation statement of ``g`` against ``p``."""
    if set(p.names) != set(g.observed_nodes()):
        raise ModelError("distribution variables must equal observed nodes")
    violated = [
        s
        for s in dsep.observable_ci_set(g)
        if not is_conditionally_independent(p, s.x, s.y, s.z)
    ]
    return IndependenceReport(holds=not violated, violated=violated)


def entropy(p: Distribution, s: Iterable[str]) -> float:
    """Shannon entropy of the variables ``s`` in bits, 0 log 0 = 0."""
    names = [n for n in p.names if n in frozenset(s)]
    m = p.marginal(names)
    h = 0.0
    for q in m.probs:
        if q:
            h -= float(q) * math.log2(float(q))
    return h


def mutual_information(p: Distribution, s, t) -> float:
    s, t = frozenset(s), frozenset(t)
    if s & t:
        raise ModelError("overlapping variable sets")
    return entropy(p, s) + entropy(p, t) - entropy(p, s | t)


def conditional_mutual_information(p: Distribution, s, t, u) -> float:
    s, t, u = frozenset(s), frozenset(t), frozenset(u)
    if s & t or s & u or t & u:
        raise ModelError("overlapping variable sets")
    return (
        entropy(p, s | u)
        + entropy(p, t | u)
        - entropy(p, s | t | u)
        - entropy(p, u)
    )


def information_quantity(p: Distribution, query: tuple) -> float:
    """Dispatch on ('H', S), ('I', S, T) or ('I', S, T, U)."""
    kind = query[0]
    if kind == "H" and len(query) == 2:
        return entropy(p, query[1])
    if kind == "I" and len(query) == 3:
        return mutual_information(p, query[1], query[2])
    if kind == "I" and len(query) == 4:
        return conditional_mutual_information(p, query[1], query[2], query[3])
    raise ModelError(f"unknown query {query!r}")
