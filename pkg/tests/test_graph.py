import pytest
from hypothesis import given, settings, strategies as st

from gdag_lab.graph import GDag, GraphError, NodeKind, parse_gdag, serialize_gdag
from gdag_lab.catalog import bell_gdag, triangle_gdag

from generators import random_gdag
from random import Random

OBS = NodeKind.OBSERVED
UNOBS = NodeKind.UNOBSERVED


def test_basic_construction():
    g = GDag([("A", OBS), ("B", UNOBS)], [("A", "B")])
    assert g.names == ("A", "B")
    assert g.observed_nodes() == ("A",)
    assert g.unobserved_nodes() == ("B",)
    assert g.parents("B") == frozenset({"A"})
    assert g.children("A") == frozenset({"B"})
    assert g.has_edge("A", "B")
    assert not g.has_edge("B", "A")


def test_rejects_cycle():
    with pytest.raises(GraphError):
        GDag([("A", OBS), ("B", OBS)], [("A", "B"), ("B", "A")])


def test_rejects_self_loop():
    with pytest.raises(GraphError):
        GDag([("A", OBS)], [("A", "A")])


def test_rejects_duplicate_node():
    with pytest.raises(GraphError):
        GDag([("A", OBS), ("A", OBS)])


def test_rejects_duplicate_edge():
    with pytest.raises(GraphError):
        GDag([("A", OBS), ("B", OBS)], [("A", "B"), ("A", "B")])


def test_rejects_unknown_edge_endpoint():
    with pytest.raises(GraphError):
        GDag([("A", OBS)], [("A", "B")])


def test_rejects_bad_node_id():
    with pytest.raises(GraphError):
        GDag([("a b", OBS)])
    with pytest.raises(GraphError):
        GDag([("", OBS)])


def test_masks_and_sets_agree():
    g = bell_gdag()
    for name in g.names:
        i = g.index[name]
        assert g.names_of(g.parent_mask[i]) == g.parents(name)
        assert g.names_of(g.child_mask[i]) == g.children(name)
        assert name in g.names_of(g.anc_mask[i])
        assert name in g.names_of(g.desc_mask[i])


def test_ancestors_of_bell():
    g = bell_gdag()
    assert g.inclusive_ancestors({"A"}) == frozenset({"A", "X", "L"})
    assert g.inclusive_ancestors({"A", "B"}) == frozenset(
        {"A", "B", "X", "Y", "L"}
    )
    assert g.inclusive_children({"L"}) == frozenset({"L", "A", "B"})


def test_topological_order_valid():
    g = triangle_gdag()
    order = g.topological_order()
    pos = {n: i for i, n in enumerate(order)}
    for a, b in g.edges:
        assert pos[a] < pos[b]


def test_equality_ignores_edge_order():
    a = GDag([("A", OBS), ("B", OBS), ("C", OBS)], [("A", "B"), ("A", "C")])
    b = GDag([("A", OBS), ("B", OBS), ("C", OBS)], [("A", "C"), ("A", "B")])
    assert a == b
    assert hash(a) == hash(b)


def test_equality_respects_kinds():
    a = GDag([("A", OBS), ("B", OBS)], [("A", "B")])
    b = GDag([("A", OBS), ("B", UNOBS)], [("A", "B")])
    assert a != b


def test_derived_graphs():
    g = bell_gdag()
    g2 = g.with_edge("X", "Y")
    assert g2.has_edge("X", "Y")
    assert g2.without_edge("X", "Y") == g
    with pytest.raises(GraphError):
        g.without_edge("A", "B")
    g3 = g.without_nodes({"L"})
    assert set(g3.names) == {"X", "Y", "A", "B"}
    assert g3.edges == (("X", "A"), ("Y", "B"))


def test_json_round_trip_fixed():
    g = bell_gdag()
    assert parse_gdag(serialize_gdag(g)) == g


def test_parse_rejects_garbage():
    for bad in ["not json", "[]", '{"nodes": []}', '{"nodes": [{"id": "A"}], "edges": []}']:
        with pytest.raises(GraphError):
            parse_gdag(bad)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_json_round_trip_random(seed):
    g = random_gdag(Random(seed))
    assert parse_gdag(serialize_gdag(g)) == g


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_ancestor_masks_random(seed):
    g = random_gdag(Random(seed))
    for name in g.names:
        anc = g.inclusive_ancestors({name})
        # fixed point: ancestors of ancestors add nothing
        assert g.inclusive_ancestors(anc) == anc
        for p in g.parents(name):
            assert p in anc
        desc = g.names_of(g.desc_mask[g.index[name]])
        for other in g.names:
            assert (name in g.inclusive_ancestors({other})) == (other in desc)
