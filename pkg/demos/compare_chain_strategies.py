"""
Exact and approximate reachable matrices
========================================

The reachable matrix of a long path is a product of many sparse
transition matrices. Four ways to compute it are compared on repeated
``A-P-C-P-A``: plain left-to-right, optimal ordering, truncation of
small entries and Monte Carlo walkers.
"""

from pathrank import parse_path
from pathrank.evaluation import bench_strategies
from pathrank.io import bibliographic_schema, generate_network
from pathrank.linalg import MonCParams, TruncParams, chain_dims, dynp_order, path_factors
from pathrank.paths import repeat_path

schema = bibliographic_schema()
g = generate_network(schema, {"A": 300, "P": 600, "C": 20}, density=0.01, seed=11)
base = parse_path("A-P-C-P-A", schema)

###############################################################################
# The chain ordering only depends on the matrix shapes.
factors = path_factors(g, repeat_path(base, 2))
dims = chain_dims(factors)
tree, cost = dynp_order(dims)
print("dims", dims)
print("order", tree, "scalar multiplications", cost)

###############################################################################
# Frobenius error against the plain product, median time of three runs.
report = bench_strategies(
    g, base, 3,
    trunc=TruncParams(W=50, beta=0.5, gamma=0.05),
    monc=MonCParams(K=200),
)
print(f"{'strategy':8s} {'l':>2s} {'ms':>8s} {'error':>10s} {'density':>8s}")
for rec in report:
    print(f"{rec.strategy:8s} {rec.l:2d} {rec.time_ms:8.2f} {rec.fro_error:10.2e} {rec.density:8.3f}")
