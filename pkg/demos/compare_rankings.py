"""
How far apart are two rankings?
===============================

The distance weighs each object of the reference top list by the
inverse of its reference position, so a swap at the head costs more
than the same swap further down. Values are scaled into [0, 1].
"""

from pathrank import parse_path, rank_symmetric
from pathrank.evaluation import distance, worst_case_distance
from pathrank.io import bibliographic_schema, generate_network
from pathrank.rank import degree_baseline, pagerank_baseline

truth = list("abcdefghij")
print("identical     ", distance(truth, truth, 10))
print("swap at head  ", round(distance(list("bacdefghij"), truth, 10), 4))
print("swap at tail  ", round(distance(list("abcdefghji"), truth, 10), 4))
print("worst case raw", round(worst_case_distance(10, 10), 4))

###############################################################################
# Path-based ranking against two structure-only baselines.
schema = bibliographic_schema()
g = generate_network(schema, 80, density=0.04, seed=5)
by_path = rank_symmetric(g, parse_path("A-P-A | P.L=DM", schema))
by_degree = degree_baseline(g, "A")
by_pagerank = pagerank_baseline(g)["A"]
for name, cand in (("degree", by_degree), ("pagerank", by_pagerank)):
    print(f"{name:8s} vs DM co-authorship: {distance(cand, by_path, 10):.3f}")
