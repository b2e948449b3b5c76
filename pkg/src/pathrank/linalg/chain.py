"""Evaluating products of sparse matrix chains.

Three exact or approximate strategies are provided next to the plain
left-to-right product: cost-optimal parenthesization (``dynp``), per-step
truncation of small probabilities (``trunc``) and random-walk sampling
(``monc``, see :mod:`pathrank.linalg.montecarlo`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .sparse import canonical


def chain_dims(mats) -> list[int]:
    dims = [mats[0].shape[0]]
    for i, m in enumerate(mats):
        if m.shape[0] != dims[-1]:
            raise ValueError(
                f"chain dimension mismatch at factor {i}: {m.shape[0]} rows, expected {dims[-1]}"
            )
        dims.append(m.shape[1])
    return dims


def naive_product(mats) -> sp.csr_matrix:
    chain_dims(mats)
    return canonical(reduce(lambda a, b: a @ b, mats))


def dynp_order(dims) -> tuple[object, int]:
    """Cheapest parenthesization of a chain with the given dimensions.

    ``dims`` has one more entry than there are matrices; matrix ``i`` is
    ``dims[i] x dims[i+1]``. Cost counts scalar multiplications of dense
    operands. The tree uses leaf indices and nested pairs, e.g. ``((0, 1), 2)``.
    Ties go to the leftmost split.
    """
    n = len(dims) - 1
    if n < 1:
        raise ValueError("need at least one matrix")
    cost = [[0] * n for _ in range(n)]
    split = [[0] * n for _ in range(n)]
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            j = i + span - 1
            best = None
            for s in range(i, j):
                c = cost[i][s] + cost[s + 1][j] + dims[i] * dims[s + 1] * dims[j + 1]
                if best is None or c < best:
                    best, split[i][j] = c, s
            cost[i][j] = best

    def tree(i, j):
        if i == j:
            return i
        s = split[i][j]
        return (tree(i, s), tree(s + 1, j))

    return tree(0, n - 1), cost[0][n - 1]


def multiply_tree(mats, tree) -> sp.csr_matrix:
    if isinstance(tree, int):
        return mats[tree]
    left, right = tree
    return canonical(multiply_tree(mats, left) @ multiply_tree(mats, right))


def dynp_product(mats) -> sp.csr_matrix:
    tree, _ = dynp_order(chain_dims(mats))
    return canonical(multiply_tree(mats, tree))


@dataclass(frozen=True)
class TruncParams:
    """Truncation level: ``W`` top objects, exponent ``beta``, sample ratio ``gamma``."""

    W: int = 200
    beta: float = 0.5
    gamma: float = 0.02
    seed: int = 42

    def __post_init__(self):
        if int(self.W) != self.W or self.W < 1:
            raise ValueError(f"W must be a positive integer, got {self.W}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")


def truncation_k(L: int, params: TruncParams) -> int:
    """Number of entries to keep per row of length ``L``."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    if L <= params.W:
        return L
    return math.floor((L - params.W) ** params.beta) + params.W


def truncate(v, threshold: float):
    """Drop entries strictly below ``threshold``; survivors are not rescaled.

    Accepts a dense vector or a sparse matrix.
    """
    if sp.issparse(v):
        m = canonical(v)
        m.data[m.data < threshold] = 0.0
        m.eliminate_zeros()
        return m
    v = np.array(v, dtype=np.float64)
    v[v < threshold] = 0.0
    return v


def estimate_threshold(m: sp.csr_matrix, k: int, gamma: float, rng: np.random.Generator) -> float:
    """Approximate the ``k * n_rows``-th largest stored value of ``m``.

    A uniform sample of ``gamma`` of the nonzeros stands in for the whole
    matrix, with the rank scaled by the sampled fraction. Returns 0 when
    the matrix holds no more than ``k * n_rows`` nonzeros.
    """
    target = k * m.shape[0]
    nnz = m.nnz
    if target >= nnz or target == 0:
        return 0.0
    n_sample = max(1, int(round(gamma * nnz)))
    sample = m.data if n_sample >= nnz else rng.choice(m.data, size=n_sample, replace=False)
    rank = max(1, math.ceil(target * len(sample) / nnz))
    if rank > len(sample):
        return 0.0
    return float(np.partition(sample, len(sample) - rank)[len(sample) - rank])


def trunc_product(mats, params: TruncParams) -> sp.csr_matrix:
    """Left-to-right product with a truncation step after every multiplication."""
    chain_dims(mats)
    rng = np.random.default_rng(params.seed)
    acc = canonical(mats[0])
    for m in mats[1:]:
        acc = canonical(acc @ m)
        k = truncation_k(acc.shape[1], params)
        acc = truncate(acc, estimate_threshold(acc, k, params.gamma, rng))
    return acc
