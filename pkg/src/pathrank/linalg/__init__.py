"""Sparse matrices, tensors and reachable-probability computation."""

from __future__ import annotations

from ..graph import TypedGraph
from ..paths import ConstrainedMetaPath
from .chain import (
    TruncParams,
    chain_dims,
    dynp_order,
    dynp_product,
    estimate_threshold,
    multiply_tree,
    naive_product,
    trunc_product,
    truncate,
    truncation_k,
)
from .montecarlo import MonCParams, monc_product
from .sparse import (
    canonical,
    constrained_transition,
    constraint_mask,
    constraint_matrix,
    normalize_rows,
    path_count_factors,
    path_factors,
    read_matrix_tsv,
    write_matrix_tsv,
)
from .tensor import SparseTensor3, read_tensor_tsv, tensor_normalize, write_tensor_tsv

STRATEGIES = ("naive", "dynp", "trunc", "monc")


def chain_product(mats, strategy="naive", params=None):
    """Multiply a chain of sparse matrices with one of :data:`STRATEGIES`."""
    if strategy == "naive":
        return naive_product(mats)
    if strategy == "dynp":
        return dynp_product(mats)
    if strategy == "trunc":
        return trunc_product(mats, params or TruncParams())
    if strategy == "monc":
        return monc_product(mats, params or MonCParams())
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def reachable_matrix(g: TypedGraph, p: ConstrainedMetaPath, strategy="naive", params=None):
    """Reachable probability matrix of a constrained path.

    Entry ``(i, j)`` is the probability that a walker leaving source object
    ``i`` along ``p`` ends at target object ``j``.
    """
    return chain_product(path_factors(g, p), strategy, params)


def monc_reachable(g: TypedGraph, p: ConstrainedMetaPath, params: MonCParams | None = None):
    return monc_product(path_factors(g, p), params or MonCParams())


__all__ = [
    "STRATEGIES",
    "MonCParams",
    "SparseTensor3",
    "TruncParams",
    "canonical",
    "chain_dims",
    "chain_product",
    "constrained_transition",
    "constraint_mask",
    "constraint_matrix",
    "dynp_order",
    "dynp_product",
    "estimate_threshold",
    "monc_product",
    "monc_reachable",
    "multiply_tree",
    "naive_product",
    "normalize_rows",
    "path_count_factors",
    "path_factors",
    "reachable_matrix",
    "read_matrix_tsv",
    "read_tensor_tsv",
    "tensor_normalize",
    "trunc_product",
    "truncate",
    "truncation_k",
    "write_matrix_tsv",
    "write_tensor_tsv",
]
