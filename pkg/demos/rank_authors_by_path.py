"""
Ranking authors along a constrained meta path
=============================================

Build a small bibliographic network by hand, then rank authors by how
the walk along ``A-P-A`` restricted to data-mining papers spreads.
"""

from pathrank import build_graph, parse_path, rank_asymmetric, rank_symmetric
from pathrank.io import bibliographic_schema

schema = bibliographic_schema()
print(schema.object_types, [r.name for r in schema.relations])

# Three authors, four papers, two venues. Papers carry a topic label.
nodes = [
    ("A", "ana"), ("A", "bo"), ("A", "cy"),
    ("P", "p1", {"L": "DM"}), ("P", "p2", {"L": "DM"}),
    ("P", "p3", {"L": "IR"}), ("P", "p4", {"L": "DM"}),
    ("C", "kdd"), ("C", "sigir"),
]
edges = [
    ("AP", "ana", "p1"), ("AP", "bo", "p1"), ("AP", "ana", "p2"),
    ("AP", "bo", "p3"), ("AP", "cy", "p3"), ("AP", "cy", "p4"), ("AP", "ana", "p4"),
    ("PC", "p1", "kdd"), ("PC", "p2", "kdd"), ("PC", "p4", "kdd"), ("PC", "p3", "sigir"),
]
g = build_graph(schema, nodes, edges)

###############################################################################
# Co-authorship restricted to DM papers. The path is symmetric, so one
# vector ranks the authors.
dm = parse_path("A-P-A | P.L=DM", schema)
r = rank_symmetric(g, dm)
print(dm, "iterations:", r.iterations_used)
for oid, score in r.ranking():
    print(f"  {oid:5s} {score:.4f}")

###############################################################################
# Authors and venues ranked together along A-P-C: the two vectors
# reinforce each other.
apc = parse_path("A-P-C", schema)
authors, venues = rank_asymmetric(g, apc)
print(apc)
print("  authors:", authors.top(3))
print("  venues: ", venues.top(2))
