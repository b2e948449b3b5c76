"""Co-ranking of objects and paths on a (source, path, target) tensor.

Entry ``x[i, j, k]`` relates source object ``i`` to target object ``k``
through path ``j``. The tensor is normalized along its three fiber
directions and the stationary distributions of sources, paths and targets
are found by alternating tensor-vector products (no restart term).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import PathError
from .graph import TypedGraph
from .linalg import SparseTensor3, naive_product, path_count_factors, reachable_matrix
from .linalg import tensor_normalize
from .paths import ConstrainedMetaPath
from .rank import RankVector

COUNT_MODES = ("path_count", "reachable_prob")


@dataclass(frozen=True)
class PathSet:
    paths: tuple[ConstrainedMetaPath, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        paths = tuple(self.paths)
        if not paths:
            raise PathError("a path set needs at least one path")
        src, tgt = paths[0].source_type, paths[0].target_type
        for p in paths[1:]:
            if (p.source_type, p.target_type) != (src, tgt):
                raise PathError(
                    f"path {p} joins {p.source_type}-{p.target_type}, expected {src}-{tgt}"
                )
        labels = tuple(self.labels) or tuple(str(p) for p in paths)
        if len(labels) != len(paths):
            raise ValueError("one label per path required")
        object.__setattr__(self, "paths", paths)
        object.__setattr__(self, "labels", labels)

    @property
    def source_type(self) -> str:
        return self.paths[0].source_type

    @property
    def target_type(self) -> str:
        return self.paths[0].target_type


def build_relation_tensor(
    g: TypedGraph,
    ps: PathSet,
    count_mode: str = "path_count",
    strategy: str = "naive",
    strategy_params=None,
) -> SparseTensor3:
    """Stack one relation matrix per path into a tensor.

    ``path_count`` slices hold the number of path instances joining two
    objects; ``reachable_prob`` slices hold the reachable probability
    matrix. When both endpoints share a type, self relations ``x[i, j, i]``
    are dropped.
    """
    if count_mode not in COUNT_MODES:
        raise ValueError(f"count_mode must be one of {COUNT_MODES}, got {count_mode!r}")
    m, n = g.n_nodes(ps.source_type), g.n_nodes(ps.target_type)
    same = ps.source_type == ps.target_type
    ii, jj, kk, vv = [], [], [], []
    for j, p in enumerate(ps.paths):
        if count_mode == "path_count":
            s = naive_product(path_count_factors(g, p))
        else:
            s = reachable_matrix(g, p, strategy, strategy_params)
        coo = sp.coo_matrix(s)
        keep = coo.row != coo.col if same else slice(None)
        ii.append(coo.row[keep])
        kk.append(coo.col[keep])
        vv.append(coo.data[keep])
        jj.append(np.full(len(vv[-1]), j))
    return SparseTensor3.from_coords(
        (m, len(ps.paths), n),
        np.concatenate(ii),
        np.concatenate(jj),
        np.concatenate(kk),
        np.concatenate(vv),
    )


@dataclass(frozen=True, eq=False)
class CoRankResult:
    x: RankVector
    y: RankVector
    z: RankVector
    iterations_used: int
    residual_trace: tuple[float, ...]
    converged: bool


def _simplex(v, n, name):
    if v is None:
        return np.full(n, 1.0 / n)
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,) or np.any(v < 0) or abs(v.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name} must be a length-{n} nonnegative vector summing to 1")
    return v.copy()


def _renorm(v, theta):
    s = v.sum()
    v = v / s if s > 0 else np.full(len(v), 1.0 / len(v))
    if theta:
        v = (1 - theta) * v + theta / len(v)
    return v


def corank(
    x_tensor: SparseTensor3,
    x0=None,
    y0=None,
    z0=None,
    tol: float = 1e-8,
    max_iters: int = 500,
    theta: float = 0.0,
    labels=None,
    types=("source", "target"),
) -> CoRankResult:
    """Stationary source, path and target distributions of a relation tensor.

    Each sweep computes ``x = F y z``, then ``y = R x z`` with the new ``x``,
    then ``z = T x y`` with the new ``x`` and ``y``, where ``F``, ``R`` and
    ``T`` are the column, tube and row normalizations. Every iterate is
    rescaled onto the simplex. Iteration stops once the summed L1 change of
    the three vectors drops below ``tol``.

    ``theta`` > 0 blends each iterate with the uniform distribution, a
    damping aid for tensors whose plain iteration oscillates. ``labels``
    optionally gives ``(source_ids, path_labels, target_ids)``.
    """
    if x_tensor.nnz == 0:
        raise ValueError("cannot co-rank an empty tensor")
    if not 0.0 <= theta < 1.0:
        raise ValueError("theta must lie in [0, 1)")
    m, l, n = x_tensor.dims
    x, y, z = _simplex(x0, m, "x0"), _simplex(y0, l, "y0"), _simplex(z0, n, "z0")
    f = tensor_normalize(x_tensor, "column").values
    r = tensor_normalize(x_tensor, "tube").values
    t = tensor_normalize(x_tensor, "row").values
    i, j, k = x_tensor.i, x_tensor.j, x_tensor.k

    trace = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        x_new = _renorm(np.bincount(i, weights=f * y[j] * z[k], minlength=m), theta)
        y_new = _renorm(np.bincount(j, weights=r * x_new[i] * z[k], minlength=l), theta)
        z_new = _renorm(np.bincount(k, weights=t * x_new[i] * y_new[j], minlength=n), theta)
        res = float(
            np.abs(x_new - x).sum() + np.abs(y_new - y).sum() + np.abs(z_new - z).sum()
        )
        trace.append(res)
        x, y, z = x_new, y_new, z_new
        if res < tol:
            converged = True
            break

    src_ids, path_labels, tgt_ids = labels or (
        tuple(str(a) for a in range(m)),
        tuple(str(a) for a in range(l)),
        tuple(str(a) for a in range(n)),
    )
    common = dict(iterations_used=it, residual_trace=tuple(trace), converged=converged)
    return CoRankResult(
        RankVector(types[0], tuple(src_ids), x, **common),
        RankVector("path", tuple(path_labels), y, **common),
        RankVector(types[1], tuple(tgt_ids), z, **common),
        **common,
    )


def corank_paths(
    g: TypedGraph,
    ps: PathSet,
    count_mode: str = "path_count",
    tol: float = 1e-8,
    max_iters: int = 500,
    **kwargs,
) -> CoRankResult:
    """Build the relation tensor of ``ps`` on ``g`` and co-rank it."""
    tensor = build_relation_tensor(g, ps, count_mode)
    labels = (g.node_ids[ps.source_type], ps.labels, g.node_ids[ps.target_type])
    return corank(
        tensor,
        tol=tol,
        max_iters=max_iters,
        labels=labels,
        types=(ps.source_type, ps.target_type),
        **kwargs,
    )
