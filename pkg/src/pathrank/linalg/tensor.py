"""Third-order sparse nonnegative tensors in coordinate form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MODES = ("column", "tube", "row")
# axis summed over by each normalization
_MODE_AXIS = {"column": 0, "tube": 1, "row": 2}


@dataclass(frozen=True, eq=False)
class SparseTensor3:
    """Coordinates ``(i, j, k)`` sorted lexicographically, values > 0.

    Axis 0 indexes source objects, axis 1 paths, axis 2 target objects.
    """

    dims: tuple[int, int, int]
    i: np.ndarray
    j: np.ndarray
    k: np.ndarray
    values: np.ndarray

    @classmethod
    def from_coords(cls, dims, i, j, k, values) -> SparseTensor3:
        """Build from unsorted coordinates; duplicates add up, zeros are dropped."""
        dims = tuple(int(d) for d in dims)
        i, j, k = (np.asarray(a, dtype=np.int64).ravel() for a in (i, j, k))
        values = np.asarray(values, dtype=np.float64).ravel()
        if not len(i) == len(j) == len(k) == len(values):
            raise ValueError("coordinate arrays differ in length")
        if np.any(values < 0):
            raise ValueError("tensor values must be nonnegative")
        for a, d, name in zip((i, j, k), dims, "ijk"):
            if len(a) and (a.min() < 0 or a.max() >= d):
                raise ValueError(f"index {name} out of range for dimension {d}")
        flat = np.ravel_multi_index((i, j, k), dims) if len(i) else np.zeros(0, np.int64)
        uniq, inv = np.unique(flat, return_inverse=True)
        summed = np.bincount(inv.ravel(), weights=values, minlength=len(uniq))
        keep = summed > 0
        ii, jj, kk = np.unravel_index(uniq[keep], dims) if len(uniq) else (flat, flat, flat)
        return cls(dims, *(np.asarray(a, dtype=np.int64) for a in (ii, jj, kk)), summed[keep])

    @classmethod
    def from_dense(cls, a) -> SparseTensor3:
        a = np.asarray(a, dtype=np.float64)
        i, j, k = np.nonzero(a)
        return cls.from_coords(a.shape, i, j, k, a[i, j, k])

    @property
    def nnz(self) -> int:
        return len(self.values)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dims)
        out[self.i, self.j, self.k] = self.values
        return out

    def with_values(self, values) -> SparseTensor3:
        return SparseTensor3(self.dims, self.i, self.j, self.k, np.asarray(values, np.float64))

    def fiber_keys(self, axis: int) -> np.ndarray:
        """Flat id of the fiber along ``axis`` that each entry lies on."""
        coords = [self.i, self.j, self.k]
        dims = list(self.dims)
        del coords[axis], dims[axis]
        return coords[0] * dims[1] + coords[1]


def tensor_normalize(x: SparseTensor3, mode: str) -> SparseTensor3:
    """Divide each fiber by its sum.

    ``column`` sums over sources (axis 0), ``tube`` over paths (axis 1) and
    ``row`` over targets (axis 2). Empty fibers stay empty.
    """
    if mode not in _MODE_AXIS:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if x.nnz == 0:
        return x
    _, inv = np.unique(x.fiber_keys(_MODE_AXIS[mode]), return_inverse=True)
    inv = inv.ravel()
    sums = np.bincount(inv, weights=x.values)
    return x.with_values(x.values / sums[inv])


def write_tensor_tsv(x: SparseTensor3, fh) -> None:
    for a, b, c, v in zip(x.i, x.j, x.k, x.values):
        fh.write(f"{a}\t{b}\t{c}\t{float(v)!r}\n")


def read_tensor_tsv(fh, dims) -> SparseTensor3:
    cols = [[], [], [], []]
    for line in fh:
        if not line.strip():
            continue
        parts = line.rstrip("\n").split("\t")
        for store, value, conv in zip(cols, parts, (int, int, int, float)):
            store.append(conv(value))
    return SparseTensor3.from_coords(dims, *cols)
