"""Sparse nonnegative matrices: normalization, constraint masks, path factors.

Matrices are ``scipy.sparse.csr_matrix`` with float64 values, sorted column
indices and no explicit zeros.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np
import scipy.sparse as sp

from ..errors import SchemaError
from ..graph import Relation, TypedGraph
from ..paths import Constraint, ConstrainedMetaPath


def canonical(m) -> sp.csr_matrix:
    """CSR float64 copy with sorted indices and explicit zeros removed."""
    m = sp.csr_matrix(m, dtype=np.float64, copy=True)
    m.sum_duplicates()
    m.eliminate_zeros()
    m.sort_indices()
    return m


def normalize_rows(w) -> sp.csr_matrix:
    """Divide each row by its sum; all-zero rows stay zero."""
    w = canonical(w)
    sums = np.asarray(w.sum(axis=1)).ravel()
    inv = np.zeros_like(sums)
    nz = sums > 0
    inv[nz] = 1.0 / sums[nz]
    return canonical(sp.diags(inv) @ w)


def diag_mask(mask: np.ndarray) -> sp.csr_matrix:
    mask = np.asarray(mask, dtype=bool)
    return canonical(sp.diags(mask.astype(np.float64)))


def constraint_mask(g: TypedGraph, c: Constraint, object_type: str) -> np.ndarray:
    """Boolean vector over the nodes of ``object_type`` satisfying ``c``."""
    if c.subject != object_type:
        raise ValueError(f"constraint on {c.subject} applied to type {object_type}")
    n = g.n_nodes(object_type)
    if c.attr is None:
        mask = np.zeros(n, dtype=bool)
        idx = g._index[object_type].get(c.value)
        if idx is not None:
            mask[idx] = True
        return mask
    attrs = g.node_attrs[object_type]
    if n and not any(c.attr in a for a in attrs):
        raise SchemaError(f"no {object_type} node carries attribute {c.attr!r}")
    return np.fromiter((c.value in a.get(c.attr, ()) for a in attrs), dtype=bool, count=n)


def constraint_matrix(g: TypedGraph, c: Constraint, object_type: str) -> sp.csr_matrix:
    """Diagonal 0/1 matrix selecting the ``object_type`` nodes satisfying ``c``."""
    return diag_mask(constraint_mask(g, c, object_type))


def combined_mask(g: TypedGraph, constraints: Iterable[Constraint], object_type: str):
    """Conjunction of constraint masks, or None when nothing applies."""
    mask = None
    for c in constraints:
        m = constraint_mask(g, c, object_type)
        mask = m if mask is None else mask & m
    return mask


def _apply_masks(m: sp.csr_matrix, src_mask, tgt_mask) -> sp.csr_matrix:
    if src_mask is not None:
        m = diag_mask(src_mask) @ m
    if tgt_mask is not None:
        m = m @ diag_mask(tgt_mask)
    return canonical(m)


def constrained_transition(
    g: TypedGraph, rel: Relation, constraints: Iterable[Constraint] = ()
) -> sp.csr_matrix:
    """``M_src @ U @ M_tgt`` for one relation.

    A constraint constrains whichever endpoint of ``rel`` has its subject
    type (both endpoints for a relation from a type to itself).
    """
    constraints = list(constraints)
    for c in constraints:
        if c.subject not in (rel.source, rel.target):
            raise ValueError(f"constraint on {c.subject} does not touch relation {rel.label}")
    src = combined_mask(g, [c for c in constraints if c.subject == rel.source], rel.source)
    tgt = combined_mask(g, [c for c in constraints if c.subject == rel.target], rel.target)
    return _apply_masks(normalize_rows(g.adjacency(rel)), src, tgt)


def position_masks(g: TypedGraph, p: ConstrainedMetaPath) -> list:
    """Mask (or None) for every node position along the path."""
    return [
        combined_mask(g, p.constraints_at(pos), t) for pos, t in enumerate(p.node_types)
    ]


def path_factors(g: TypedGraph, p: ConstrainedMetaPath) -> list[sp.csr_matrix]:
    """Constrained transition matrices ``U'_1 .. U'_l`` of a path.

    A constraint at an inner position masks both adjacent factors, which is
    harmless since the masks are idempotent.
    """
    masks = position_masks(g, p)
    return [
        _apply_masks(normalize_rows(g.adjacency(r)), masks[i], masks[i + 1])
        for i, r in enumerate(p.relations)
    ]


def path_count_factors(g: TypedGraph, p: ConstrainedMetaPath) -> list[sp.csr_matrix]:
    """Constrained adjacency count matrices along a path.

    Their product counts the path instances between endpoint objects.
    """
    masks = position_masks(g, p)
    return [
        _apply_masks(canonical(g.adjacency(r)), masks[i], masks[i + 1])
        for i, r in enumerate(p.relations)
    ]


def write_matrix_tsv(m, fh) -> None:
    """Dump nonzeros as ``row<TAB>col<TAB>value`` lines, row-major."""
    m = canonical(m)
    coo = m.tocoo()
    for r, c, v in zip(coo.row, coo.col, coo.data):
        fh.write(f"{r}\t{c}\t{float(v)!r}\n")


def read_matrix_tsv(fh, shape) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for line in fh:
        if not line.strip():
            continue
        r, c, v = line.rstrip("\n").split("\t")
        rows.append(int(r))
        cols.append(int(c))
        vals.append(float(v))
    return canonical(sp.coo_matrix((vals, (rows, cols)), shape=shape))
