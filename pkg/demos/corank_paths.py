"""
Ranking objects and meta paths together
=======================================

A set of paths sharing endpoint types becomes a three-way tensor
(source object, path, target object). Alternating tensor-vector
products give a distribution over each mode at once.
"""

import numpy as np

from pathrank import PathSet, build_relation_tensor, corank_paths, parse_path
from pathrank.io import bibliographic_schema, generate_network

schema = bibliographic_schema()
g = generate_network(schema, {"A": 60, "P": 120, "C": 6}, density=0.03, seed=3)
print({t: n for t, n in g.node_counts().items()})

paths = PathSet(tuple(parse_path(e, schema) for e in (
    "A-P-A | P.L=DM",
    "A-P-A | P.L=IR",
    "A-P-A | P.L=DB",
    "A-P-C-P-A",
)))
x = build_relation_tensor(g, paths, "path_count")
print("tensor", x.dims, "nonzeros", x.nnz)

###############################################################################
# Self pairs are removed, so the slices of symmetric paths have a zero
# diagonal and are symmetric in (source, target).
dense = x.to_dense()
print("zero diagonal:", np.all(np.einsum("iji->ij", dense) == 0))

res = corank_paths(g, paths)
print("converged in", res.iterations_used, "sweeps")
for label, w in res.y.ranking():
    print(f"  {w:.4f}  {label}")
print("top authors:", res.x.top(5))
