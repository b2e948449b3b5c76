"""Ranking objects and meta paths in heterogeneous information networks."""

from .corank import CoRankResult, PathSet, build_relation_tensor, corank, corank_paths
from .errors import (
    NotSymmetricError,
    ParseError,
    PathError,
    PathRankError,
    PathSyntaxError,
    SchemaError,
)
from .evaluation import BenchRecord, BenchReport, bench_density, bench_strategies, distance
from .graph import Relation, Schema, TypedGraph, build_graph
from .linalg import MonCParams, SparseTensor3, TruncParams, reachable_matrix
from .paths import Constraint, ConstrainedMetaPath, parse_path, repeat_path, reverse_path
from .rank import (
    RankParams,
    RankVector,
    degree_baseline,
    pagerank_baseline,
    rank_asymmetric,
    rank_symmetric,
)

__version__ = "0.1.0"
