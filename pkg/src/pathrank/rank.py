"""Path-constrained random walk ranking and homogeneous baselines.

Iterates are row vectors. One step of the walk is

    r <- alpha * r @ M + (1 - alpha) * e

with ``M`` the reachable probability matrix of the path and ``e`` the
uniform restart distribution; ``alpha`` weights the walk term and
defaults to 0.15. The iterate is rescaled to sum 1 after every step, which
returns mass lost at dangling or constraint-filtered rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import NotSymmetricError, SchemaError
from .graph import TypedGraph
from .linalg import normalize_rows, reachable_matrix
from .paths import ConstrainedMetaPath, reverse_path


@dataclass(frozen=True)
class RankParams:
    alpha: float = 0.15
    tol: float = 1e-10
    max_iters: int = 100

    def __post_init__(self):
        # alpha == 1 drops the restart term; kept for restart-free comparisons
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")


@dataclass(frozen=True, eq=False)
class RankVector:
    """A distribution over the objects of one type (or over paths)."""

    object_type: str
    ids: tuple[str, ...]
    values: np.ndarray
    iterations_used: int = 0
    residual_trace: tuple[float, ...] = ()
    converged: bool = True

    def __len__(self):
        return len(self.values)

    def ranking(self) -> list[tuple[str, float]]:
        """``(id, score)`` by descending score, ties broken by ascending id."""
        order = sorted(range(len(self.ids)), key=lambda i: (-self.values[i], self.ids[i]))
        return [(self.ids[i], float(self.values[i])) for i in order]

    def top(self, k: int) -> list[str]:
        return [oid for oid, _ in self.ranking()[:k]]

    def write_tsv(self, fh) -> None:
        """``rank<TAB>object_id<TAB>score`` lines, best first."""
        for pos, (oid, score) in enumerate(self.ranking(), 1):
            fh.write(f"{pos}\t{oid}\t{score!r}\n")


def _normalized(v: np.ndarray) -> np.ndarray:
    s = v.sum()
    if s <= 0:
        return np.full(len(v), 1.0 / len(v)) if len(v) else v
    return v / s


def _uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n) if n else np.zeros(0)


def _left_operator(m):
    """Callable computing ``r @ m`` for a row vector ``r``."""
    mt = sp.csr_matrix(m.T) if sp.issparse(m) else np.asarray(m).T
    return lambda r: mt @ r


@dataclass
class _Solve:
    values: np.ndarray
    iterations: int = 0
    trace: list = field(default_factory=list)
    converged: bool = False


def iterate_symmetric(m, params: RankParams) -> _Solve:
    """Fixed point of ``r = norm(alpha * r @ m + (1 - alpha) * uniform)``."""
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {m.shape}")
    step = _left_operator(m)
    e = _uniform(n)
    out = _Solve(e.copy())
    for t in range(1, params.max_iters + 1):
        nxt = _normalized(params.alpha * step(out.values) + (1 - params.alpha) * e)
        res = float(np.abs(nxt - out.values).sum())
        out.values, out.iterations = nxt, t
        out.trace.append(res)
        if res < params.tol:
            out.converged = True
            break
    return out


def iterate_asymmetric(m, m_inv, params: RankParams) -> tuple[_Solve, _Solve]:
    """Coupled fixed point between the two endpoint types.

    Each sweep updates the target vector from the current source vector
    first, then the source vector from the fresh target vector.
    """
    n_src, n_tgt = m.shape
    if m_inv.shape != (n_tgt, n_src):
        raise ValueError(f"inverse matrix shape {m_inv.shape} does not mirror {m.shape}")
    fwd, back = _left_operator(m), _left_operator(m_inv)
    e_src, e_tgt = _uniform(n_src), _uniform(n_tgt)
    src, tgt = _Solve(e_src.copy()), _Solve(e_tgt.copy())
    a = params.alpha
    for t in range(1, params.max_iters + 1):
        new_tgt = _normalized(a * fwd(src.values) + (1 - a) * e_tgt)
        new_src = _normalized(a * back(new_tgt) + (1 - a) * e_src)
        for s, new in ((src, new_src), (tgt, new_tgt)):
            s.trace.append(float(np.abs(new - s.values).sum()))
            s.values, s.iterations = new, t
        if src.trace[-1] < params.tol and tgt.trace[-1] < params.tol:
            src.converged = tgt.converged = True
            break
    return src, tgt


def _vector(g: TypedGraph, object_type: str, solve: _Solve) -> RankVector:
    return RankVector(
        object_type,
        g.node_ids[object_type],
        solve.values,
        solve.iterations,
        tuple(solve.trace),
        solve.converged,
    )


def rank_symmetric(
    g: TypedGraph,
    p: ConstrainedMetaPath,
    params: RankParams | None = None,
    strategy: str = "naive",
    strategy_params=None,
) -> RankVector:
    """Rank the objects of a symmetric path's endpoint type.

    Raises :class:`NotSymmetricError` for paths that differ from their
    reverse; use :func:`rank_asymmetric` for those. Hitting ``max_iters``
    does not raise: the last iterate comes back with ``converged=False``.
    """
    params = params or RankParams()
    if not p.is_symmetric:
        raise NotSymmetricError(f"path {p} is not symmetric; use the asymmetric ranking")
    m = reachable_matrix(g, p, strategy, strategy_params)
    return _vector(g, p.source_type, iterate_symmetric(m, params))


def rank_asymmetric(
    g: TypedGraph,
    p: ConstrainedMetaPath,
    params: RankParams | None = None,
    strategy: str = "naive",
    strategy_params=None,
) -> tuple[RankVector, RankVector]:
    """Jointly rank both endpoint types of a path; returns (source, target)."""
    params = params or RankParams()
    m = reachable_matrix(g, p, strategy, strategy_params)
    m_inv = reachable_matrix(g, reverse_path(p), strategy, strategy_params)
    src, tgt = iterate_asymmetric(m, m_inv, params)
    return _vector(g, p.source_type, src), _vector(g, p.target_type, tgt)


def homogeneous_adjacency(g: TypedGraph) -> tuple[sp.csr_matrix, dict[str, slice]]:
    """All relations merged into one symmetric count matrix over every node."""
    offsets, start = {}, 0
    for t in g.schema.object_types:
        n = g.n_nodes(t)
        offsets[t] = slice(start, start + n)
        start += n
    rows, cols, vals = [], [], []
    for rel in g.schema.relations:
        src, tgt, cnt = g.edges[rel.name]
        s = src + offsets[rel.source].start
        d = tgt + offsets[rel.target].start
        rows += [s, d]
        cols += [d, s]
        vals += [cnt, cnt]
    if rows:
        a = sp.coo_matrix(
            (np.concatenate(vals).astype(float), (np.concatenate(rows), np.concatenate(cols))),
            shape=(start, start),
        )
    else:
        a = sp.coo_matrix((start, start))
    return sp.csr_matrix(a), offsets


def pagerank_baseline(g: TypedGraph, params: RankParams | None = None) -> dict[str, RankVector]:
    """PageRank over the whole network with types and directions ignored.

    Each edge links both ways. The global distribution is sliced per type
    and every slice rescaled to sum 1.
    """
    params = params or RankParams()
    a, offsets = homogeneous_adjacency(g)
    solve = iterate_symmetric(normalize_rows(a), params)
    out = {}
    for t, sl in offsets.items():
        part = _Solve(_normalized(solve.values[sl]), solve.iterations, solve.trace, solve.converged)
        out[t] = _vector(g, t, part)
    return out


def degree_baseline(g: TypedGraph, object_type: str) -> RankVector:
    """Share of incident edge multiplicity; all-zero degrees give a uniform vector."""
    if object_type not in g.schema.object_types:
        raise SchemaError(f"unknown object type {object_type!r}")
    deg = np.zeros(g.n_nodes(object_type))
    for rel in g.schema.relations:
        src, tgt, cnt = g.edges[rel.name]
        if rel.source == object_type:
            deg += np.bincount(src, weights=cnt, minlength=len(deg))
        if rel.target == object_type:
            deg += np.bincount(tgt, weights=cnt, minlength=len(deg))
    return RankVector(object_type, g.node_ids[object_type], _normalized(deg))
