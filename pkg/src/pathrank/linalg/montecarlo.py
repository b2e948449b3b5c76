"""Monte Carlo estimate of a reachable probability matrix.

``K`` walkers leave every source object and take one step per factor. At a
node ``u`` a walker moves to ``v`` with probability ``U'[u, v]`` and dies with
the remaining probability ``1 - sum_v U'[u, v]`` (a constraint filtered the
row). Entry ``(a, b)`` of the estimate is the fraction of walkers from ``a``
that finish at ``b``.

Walker ``w`` from source ``a`` reads its uniforms from positions
``w*l .. w*l + l - 1`` of a Philox stream keyed by ``(seed, a)``, so the
result for a given walker never depends on ``K``, batching or thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .chain import chain_dims
from .sparse import canonical

# uniforms held in memory per batch of sources
_BATCH_DRAWS = 4_000_000


@dataclass(frozen=True)
class MonCParams:
    K: int = 500
    seed: int = 42

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K}")


def walker_uniforms(seed: int, source: int, n_walkers: int, n_steps: int) -> np.ndarray:
    bitgen = np.random.Philox(np.random.SeedSequence([int(seed), int(source)]))
    return np.random.Generator(bitgen).random((n_walkers, n_steps))


class _Sampler:
    """Inverse-CDF sampling of one step for many walkers at once."""

    def __init__(self, m: sp.csr_matrix):
        m = canonical(m)
        self.indices = m.indices
        counts = np.diff(m.indptr)
        rows = np.repeat(np.arange(m.shape[0]), counts)
        cs = np.cumsum(m.data)
        before = np.zeros(m.shape[0])
        nonempty = counts > 0
        before[nonempty] = cs[m.indptr[:-1][nonempty]] - m.data[m.indptr[:-1][nonempty]]
        within = cs - before[rows]
        self.row_total = np.zeros(m.shape[0])
        self.row_total[nonempty] = within[m.indptr[1:][nonempty] - 1]
        # entries of row u occupy (u, u + row_total[u]]
        self.keys = rows + within

    def step(self, cur: np.ndarray, u: np.ndarray):
        alive = u < self.row_total[cur]
        cur, u = cur[alive], u[alive]
        pos = np.searchsorted(self.keys, cur + u, side="right")
        pos = np.minimum(pos, len(self.keys) - 1)
        return self.indices[pos], alive


def monc_product(mats, params: MonCParams, sources=None) -> sp.csr_matrix:
    """Sampled estimate of ``mats[0] @ ... @ mats[-1]`` for row-substochastic factors."""
    dims = chain_dims(mats)
    n_src, n_tgt = dims[0], dims[-1]
    sources = np.arange(n_src) if sources is None else np.asarray(sources, dtype=np.int64)
    samplers = [_Sampler(m) for m in mats]
    n_steps = len(mats)
    K = int(params.K)
    batch = max(1, _BATCH_DRAWS // (K * n_steps))

    rows_out, cols_out = [], []
    for start in range(0, len(sources), batch):
        chunk = sources[start : start + batch]
        draws = np.stack([walker_uniforms(params.seed, a, K, n_steps) for a in chunk])
        draws = draws.reshape(len(chunk) * K, n_steps)
        origin = np.repeat(chunk, K)
        cur = origin.copy()
        for s, sampler in enumerate(samplers):
            cur, alive = sampler.step(cur, draws[:, s])
            origin, draws = origin[alive], draws[alive]
        rows_out.append(origin)
        cols_out.append(cur)
    rows = np.concatenate(rows_out) if rows_out else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols_out) if cols_out else np.zeros(0, dtype=np.int64)
    visits = canonical(sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n_src, n_tgt)))
    visits.data /= K
    return visits
