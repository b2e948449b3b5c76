import random
from collections import Counter

import numpy as np
import pytest

from pathrank.errors import SchemaError
from pathrank.graph import Relation, Schema, build_graph


def test_empty_graph(bib):
    g = build_graph(bib)
    assert g.node_counts() == {"A": 0, "P": 0, "C": 0}
    assert g.edge_counts() == {"AP": 0, "PC": 0}


def test_direct_construction(two_authors):
    assert two_authors.n_nodes("A") == 2
    assert two_authors.n_nodes("P") == 1
    assert two_authors.edge_counts()["AP"] == 2


def test_duplicate_edge_records_accumulate(bib):
    edges = [("AP", "a1", "p1"), ("AP", "a1", "p1"), ("AP", "a2", "p1"), ("AP", "a1", "p2")]
    g = build_graph(bib, [("A", "a1"), ("A", "a2"), ("P", "p1"), ("P", "p2")], edges)
    tally = Counter((s, t) for _, s, t in edges)
    w = g.adjacency("AP").toarray()
    for (s, t), n in tally.items():
        assert w[g.index_of("A", s), g.index_of("P", t)] == n
    assert g.edge_counts()["AP"] == sum(tally.values())


def test_inverse_adjacency_is_transpose(two_authors, bib):
    rel = bib.relation("AP")
    np.testing.assert_array_equal(
        two_authors.adjacency(rel.inverse()).toarray(), two_authors.adjacency(rel).toarray().T
    )


@pytest.mark.parametrize(
    "nodes, edges, fragment",
    [
        ([("X", "x")], [], "unknown object type"),
        ([("A", "a"), ("A", "a")], [], "duplicate"),
        ([("A", "a")], [("AP", "a", "p9")], "dangling"),
        ([("A", "a")], [("ZZ", "a", "a")], "unknown relation"),
    ],
)
def test_build_errors(bib, nodes, edges, fragment):
    with pytest.raises(SchemaError, match=fragment) as info:
        build_graph(bib, nodes, edges)
    assert info.value.record[1] >= 1


def test_ids_are_case_sensitive(bib):
    g = build_graph(bib, [("A", "a"), ("A", "A")])
    assert g.n_nodes("A") == 2


def test_schema_validation():
    with pytest.raises(SchemaError):
        Schema(("A",), (Relation("R", "A", "B"),))
    with pytest.raises(SchemaError):
        Schema(("A",), (Relation("R", "A", "A"), Relation("R", "A", "A")))
    s = Schema.from_dict({"types": ["A", "B"], "relations": [{"name": "R", "source": "A", "target": "B"}]})
    assert s.relation("R").inverse() == Relation("R", "B", "A", True)
    assert Schema.from_dict(s.to_dict()) == s


def test_multi_valued_attributes(bib):
    g = build_graph(bib, [("P", "p", {"L": ["DM", "IR"]})])
    assert g.node_attrs["P"][0]["L"] == frozenset({"DM", "IR"})


def test_immutable(two_authors):
    src, _, _ = two_authors.edges["AP"]
    with pytest.raises(ValueError):
        src[0] = 5
    with pytest.raises(AttributeError):
        two_authors.schema = None


def test_order_independent(bib):
    nodes = [("A", f"a{i}") for i in range(5)] + [("P", f"p{i}", {"L": "DM"}) for i in range(4)]
    edges = [("AP", f"a{i % 5}", f"p{(i * 3) % 4}") for i in range(14)]
    g1 = build_graph(bib, nodes, edges)
    rng = random.Random(3)
    for _ in range(5):
        n2, e2 = nodes[:], edges[:]
        rng.shuffle(n2)
        rng.shuffle(e2)
        g2 = build_graph(bib, n2, e2)
        assert g2.node_counts() == g1.node_counts()
        pairs1 = Counter(
            (g1.node_ids["A"][s], g1.node_ids["P"][t], c) for s, t, c in zip(*g1.edges["AP"])
        )
        pairs2 = Counter(
            (g2.node_ids["A"][s], g2.node_ids["P"][t], c) for s, t, c in zip(*g2.edges["AP"])
        )
        assert pairs1 == pairs2
