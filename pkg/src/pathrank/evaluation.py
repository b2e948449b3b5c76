"""Ranking comparison and timing harnesses."""

from __future__ import annotations

import csv
import statistics
import time
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache

import numpy as np
import scipy.sparse.linalg as spla
from scipy.optimize import linear_sum_assignment

from .corank import corank
from .graph import TypedGraph
from .linalg import (
    STRATEGIES,
    MonCParams,
    SparseTensor3,
    TruncParams,
    chain_product,
    naive_product,
    path_factors,
)
from .paths import ConstrainedMetaPath, repeat_path
from .rank import RankVector

CSV_FIELDS = ("strategy", "path", "l", "time_ms", "fro_error", "iterations", "density")


def _ids(ranked) -> list[str]:
    if isinstance(ranked, RankVector):
        return [oid for oid, _ in ranked.ranking()]
    ids = list(ranked)
    if len(set(ids)) != len(ids):
        raise ValueError("ranked list contains duplicate ids")
    return ids


def _displacement(p: int, q: int) -> float:
    return abs(q - p) / p


@lru_cache(maxsize=256)
def worst_case_distance(n_truth: int, top_k: int) -> float:
    """Largest weighted displacement any candidate list can reach.

    Truth objects at positions ``1..n_truth`` are assigned to distinct
    candidate positions ``1..top_k`` or to "absent" (position ``top_k + 1``,
    unlimited capacity); the maximum is an assignment problem.
    """
    absent = [[_displacement(p, top_k + 1)] * n_truth for p in range(1, n_truth + 1)]
    present = [[_displacement(p, q) for q in range(1, top_k + 1)] for p in range(1, n_truth + 1)]
    gain = np.hstack([np.array(present), np.array(absent)])
    rows, cols = linear_sum_assignment(gain, maximize=True)
    return float(gain[rows, cols].sum())


def distance(candidate, truth, top_k: int) -> float:
    """Position-weighted disagreement between two ranked lists, in [0, 1].

    Each object in the top ``top_k`` of ``truth`` contributes
    ``|pos_candidate - pos_truth| / pos_truth``, where an object missing
    from the candidate's top ``top_k`` sits at ``top_k + 1``. The sum is
    divided by its worst case. 0 means the top lists agree; mistakes near
    the head of ``truth`` weigh most.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    cand, tru = _ids(candidate), _ids(truth)
    if not cand or not tru:
        raise ValueError("ranked lists must be nonempty")
    tru = tru[:top_k]
    where = {oid: q for q, oid in enumerate(cand[:top_k], 1)}
    raw = sum(_displacement(p, where.get(oid, top_k + 1)) for p, oid in enumerate(tru, 1))
    return raw / worst_case_distance(len(tru), top_k)


@dataclass
class BenchRecord:
    strategy: str
    path: str
    l: int
    time_ms: float
    fro_error: float | None = None
    iterations: int | None = None
    density: float | None = None


@dataclass
class BenchReport:
    records: list[BenchRecord] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for rec in self.records:
            row = asdict(rec)
            w.writerow(["" if row[k] is None else row[k] for k in CSV_FIELDS])

    @classmethod
    def read_csv(cls, fh) -> BenchReport:
        types = {f.name: f.type for f in fields(BenchRecord)}
        out = cls()
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        for row in reader:
            vals = {}
            for k, v in row.items():
                if v == "":
                    vals[k] = None
                elif "int" in types[k]:
                    vals[k] = int(v)
                elif "float" in types[k]:
                    vals[k] = float(v)
                else:
                    vals[k] = v
            out.records.append(BenchRecord(**vals))
        return out


def _timed(fn, repeats: int):
    times, result = [], None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return result, statistics.median(times)


def bench_strategies(
    g: TypedGraph,
    base_path: ConstrainedMetaPath,
    max_repetitions: int,
    strategies: Sequence[str] = STRATEGIES,
    trunc: TruncParams | None = None,
    monc: MonCParams | None = None,
    repeats: int = 3,
) -> BenchReport:
    """Time each chain strategy on ``base_path`` repeated 1..max_repetitions times.

    Accuracy is the Frobenius norm of the difference to the plain product;
    timings cover the multiplication only and are medians over ``repeats``.
    """
    trunc = trunc or TruncParams(W=200, beta=0.5, gamma=0.02)
    monc = monc or MonCParams(K=500)
    params = {"trunc": trunc, "monc": monc}
    for s in strategies:
        if s not in STRATEGIES:
            raise ValueError(f"unknown strategy {s!r}")
    report = BenchReport()
    for l in range(1, max_repetitions + 1):
        path = repeat_path(base_path, l)
        factors = path_factors(g, path)
        reference = naive_product(factors)
        for s in strategies:
            result, ms = _timed(lambda: chain_product(factors, s, params.get(s)), repeats)
            err = float(spla.norm(result - reference)) if (result - reference).nnz else 0.0
            m, n = result.shape
            report.records.append(
                BenchRecord(s, str(base_path), l, ms, err, None, result.nnz / (m * n) if m * n else 0.0)
            )
    return report


def random_tensor(m: int, r: int, n: int, density: float, rng: np.random.Generator) -> SparseTensor3:
    """Tensor with ``round(density * m * r * n)`` distinct nonzeros valued 1..3."""
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    size = m * r * n
    nnz = max(1, int(round(density * size)))
    flat = np.sort(rng.choice(size, size=nnz, replace=False))
    i, j, k = np.unravel_index(flat, (m, r, n))
    return SparseTensor3.from_coords((m, r, n), i, j, k, rng.integers(1, 4, size=nnz))


def bench_density(
    m: int,
    r: int,
    n: int,
    densities: Sequence[float],
    tol: float = 1e-8,
    max_iters: int = 500,
    seed: int = 42,
    repeats: int = 3,
) -> BenchReport:
    """Co-ranking wall time on random ``m x r x n`` tensors of growing density."""
    report = BenchReport()
    for idx, d in enumerate(densities):
        tensor = random_tensor(m, r, n, d, np.random.default_rng([seed, idx]))
        res, ms = _timed(lambda: corank(tensor, tol=tol, max_iters=max_iters), repeats)
        report.records.append(
            BenchRecord("corank", f"{m}x{r}x{n}", r, ms, None, res.iterations_used, d)
        )
    return report
