"""Domain types and the k-means cost functionals.

Distances are stored condensed: the value for the unordered pair ``(i, l)``
with ``i < l`` sits at flat index ``n*i - i*(i+1)//2 + (l - i - 1)``, the same
layout as :func:`scipy.spatial.distance.pdist`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import (
    AsymmetricInput,
    DuplicatePoint,
    InvalidClustering,
    NegativeDistance,
    TooSmall,
    WideGapsError,
)

REL_TOL = 1e-9
ABS_TOL = 1e-12


def tolerance(x: float) -> float:
    """Comparison slack for a quantity of magnitude ``x``."""
    return max(REL_TOL * abs(x), ABS_TOL)


def strictly_greater(a: float, b: float) -> bool:
    """``a > b`` with the tolerance applied against ``a``."""
    return a > b + tolerance(b)


def condensed_index(n: int, i: int, l: int) -> int:
    if i == l:
        raise IndexError("diagonal entries are not stored")
    if i > l:
        i, l = l, i
    return n * i - i * (i + 1) // 2 + (l - i - 1)


@lru_cache(maxsize=64)
def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column arrays matching condensed order."""
    rows, cols = np.triu_indices(n, 1)
    rows.flags.writeable = False
    cols.flags.writeable = False
    return rows, cols


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PseudoDistanceMatrix:
    """Symmetric, zero-diagonal, positive off-diagonal dissimilarities."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if self.n < 2:
            raise TooSmall(f"need at least 2 points, got {self.n}")
        if values.shape[0] != self.n * (self.n - 1) // 2:
            raise WideGapsError(
                f"condensed storage for n={self.n} needs {self.n * (self.n - 1) // 2} values, "
                f"got {values.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise WideGapsError("distances must be finite")
        if np.any(values < 0):
            raise NegativeDistance("negative distance in input")
        if np.any(values == 0):
            r, c = pair_indices(self.n)
            j = int(np.flatnonzero(values == 0)[0])
            raise DuplicatePoint(f"points {r[j]} and {c[j]} are at distance 0")
        object.__setattr__(self, "values", _readonly(values))

    @classmethod
    def from_square(cls, matrix) -> "PseudoDistanceMatrix":
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise AsymmetricInput(f"distance matrix must be square, got shape {m.shape}")
        n = m.shape[0]
        if n < 2:
            raise TooSmall(f"need at least 2 points, got {n}")
        if not np.all(np.isfinite(m)):
            raise WideGapsError("distances must be finite")
        if np.any(m < 0):
            raise NegativeDistance("negative distance in input")
        if np.any(np.diag(m) != 0):
            raise WideGapsError("distance matrix must have a zero diagonal")
        slack = np.maximum(REL_TOL * np.maximum(np.abs(m), np.abs(m.T)), ABS_TOL)
        if np.any(np.abs(m - m.T) > slack):
            raise AsymmetricInput("distance matrix is not symmetric")
        r, c = pair_indices(n)
        return cls(n, m[r, c])

    def square(self) -> np.ndarray:
        return squareform(self.values)

    def __getitem__(self, ij) -> float:
        i, l = ij
        if i == l:
            return 0.0
        return float(self.values[condensed_index(self.n, i, l)])


@dataclass(frozen=True, eq=False)
class Dataset:
    """A finite point set with its pseudo-distance matrix and, optionally, a
    Euclidean embedding that generated it."""

    distances: PseudoDistanceMatrix
    embedding: Optional[np.ndarray] = None
    point_ids: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.distances.n
        if self.embedding is not None:
            emb = np.array(self.embedding, dtype=float)
            if emb.ndim != 2 or emb.shape[0] != n or emb.shape[1] < 1:
                raise WideGapsError(f"embedding must be an {n} x dim array, got {emb.shape}")
            ref = pdist(emb)
            slack = np.maximum(REL_TOL * np.abs(ref), ABS_TOL)
            if np.any(np.abs(ref - self.distances.values) > slack):
                raise WideGapsError("distances disagree with the embedding")
            object.__setattr__(self, "embedding", _readonly(emb))
        object.__setattr__(self, "point_ids", _readonly(np.arange(n)))

    @property
    def n(self) -> int:
        return self.distances.n

    @property
    def dim(self) -> Optional[int]:
        return None if self.embedding is None else self.embedding.shape[1]

    @cached_property
    def d2(self) -> np.ndarray:
        """Square matrix of squared distances."""
        return _readonly(squareform(self.distances.values**2))

    @cached_property
    def sigma(self) -> float:
        return float(self.distances.values.min())

    @classmethod
    def from_points(cls, points) -> "Dataset":
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise WideGapsError(f"points must be a 2-D table, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise TooSmall(f"need at least 2 points, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise WideGapsError("coordinates must be finite")
        return cls(PseudoDistanceMatrix(pts.shape[0], pdist(pts)), pts)

    @classmethod
    def from_distances(cls, matrix) -> "Dataset":
        return cls(PseudoDistanceMatrix.from_square(matrix))

    @classmethod
    def from_condensed(cls, values) -> "Dataset":
        values = np.asarray(values, dtype=float).ravel()
        n = int(round((1 + math.sqrt(1 + 8 * len(values))) / 2))
        return cls(PseudoDistanceMatrix(n, values))

    def subset(self, idx: Sequence[int]) -> "Dataset":
        """Sub-dataset on ``idx``, re-indexed 0..len(idx)-1."""
        idx = np.asarray(idx, dtype=np.int64)
        sq = self.distances.square()[np.ix_(idx, idx)]
        r, c = pair_indices(len(idx))
        emb = None if self.embedding is None else self.embedding[idx]
        return Dataset(PseudoDistanceMatrix(len(idx), sq[r, c]), emb)


def validate_dataset(raw, kind: Optional[str] = None) -> Dataset:
    """Build a :class:`Dataset` from coordinates or a square distance matrix.

    ``kind`` is ``"points"``, ``"distances"`` or ``None`` to guess: a square
    array with an all-zero diagonal is read as a distance matrix.
    """
    arr = np.asarray(raw, dtype=float)
    if kind is None:
        kind = (
            "distances"
            if arr.ndim == 2 and arr.shape[0] == arr.shape[1] and arr.shape[0] > 1 and not np.any(np.diag(arr))
            else "points"
        )
    if kind == "points":
        return Dataset.from_points(arr)
    if kind == "distances":
        return Dataset.from_distances(arr)
    raise WideGapsError(f"unknown input kind {kind!r}")


class Clustering:
    """Partition into ``k`` blocks stored as labels; every block has >= 2
    members. Instances are immutable."""

    __slots__ = ("labels", "k")

    def __init__(self, labels, k: Optional[int] = None):
        lab = np.array(labels)
        if lab.ndim != 1 or lab.size == 0:
            raise InvalidClustering("labels must be a non-empty 1-D sequence")
        if not np.issubdtype(lab.dtype, np.integer):
            if not np.all(np.mod(lab, 1) == 0):
                raise InvalidClustering("labels must be integers")
        lab = lab.astype(np.int64)
        if k is None:
            k = int(lab.max()) + 1
        if k < 1:
            raise InvalidClustering("k must be at least 1")
        if lab.min() < 0 or lab.max() >= k:
            raise InvalidClustering(f"labels must lie in 0..{k - 1}")
        counts = np.bincount(lab, minlength=k)
        small = np.flatnonzero(counts < 2)
        if small.size:
            raise InvalidClustering(
                f"block {int(small[0])} has {int(counts[small[0]])} member(s); blocks need at least 2"
            )
        lab.flags.writeable = False
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "k", int(k))

    def __setattr__(self, name, value):
        raise AttributeError("Clustering is immutable")

    def __repr__(self):
        return f"Clustering(k={self.k}, labels={self.labels.tolist()})"

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @classmethod
    def single_block(cls, n: int) -> "Clustering":
        return cls(np.zeros(n, np.int64), 1)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]]) -> "Clustering":
        n = sum(len(b) for b in blocks)
        lab = np.full(n, -1, np.int64)
        for c, b in enumerate(blocks):
            lab[list(b)] = c
        if np.any(lab < 0):
            raise InvalidClustering("blocks must cover 0..n-1 exactly once")
        return cls(lab, len(blocks))

    def blocks(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.labels == c) for c in range(self.k)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def canonical(self) -> np.ndarray:
        """Labels renumbered in order of first appearance."""
        _, first, inv = np.unique(self.labels, return_index=True, return_inverse=True)
        rank = np.argsort(np.argsort(first))
        return rank[inv].astype(np.int64)

    def same_partition(self, other: "Clustering") -> bool:
        return self.n == other.n and bool(np.array_equal(self.canonical(), other.canonical()))

    def check_for(self, dataset: Dataset) -> "Clustering":
        if self.n != dataset.n:
            raise InvalidClustering(f"clustering has {self.n} labels but dataset has {dataset.n} points")
        return self


def as_clustering(labels_or_clustering, dataset: Optional[Dataset] = None) -> Clustering:
    c = labels_or_clustering
    if not isinstance(c, Clustering):
        c = Clustering(c)
    if dataset is not None:
        c.check_for(dataset)
    return c


def cost_q(dataset: Dataset, clustering) -> float:
    """k-means cost in pairwise form: sum over blocks of the squared pairwise
    distances inside the block, divided by twice the block size."""
    clustering = as_clustering(clustering, dataset)
    d2 = dataset.d2
    q = 0.0
    for idx in clustering.blocks():
        q += d2[np.ix_(idx, idx)].sum() / (2.0 * idx.size)
    return float(q)


def cost_q_centroid(embedding, clustering) -> float:
    """Classic centroid form of the same cost; needs coordinates."""
    x = np.asarray(embedding, dtype=float)
    clustering = as_clustering(clustering)
    q = 0.0
    for idx in clustering.blocks():
        pts = x[idx]
        q += ((pts - pts.mean(axis=0)) ** 2).sum()
    return float(q)


def sigma(dataset: Dataset) -> float:
    return dataset.sigma


def beta(dataset: Dataset, clustering) -> float:
    clustering = as_clustering(clustering, dataset)
    s = dataset.sigma
    return 2.0 * (cost_q(dataset, clustering) - (dataset.n - clustering.k - 1) * s * s / 2.0)


def min_inter(dataset: Dataset, clustering) -> tuple[float, Optional[tuple[int, int]]]:
    """Smallest distance between points of different blocks and the pair
    realising it (first in condensed order). ``(inf, None)`` when k = 1."""
    clustering = as_clustering(clustering, dataset)
    r, c = pair_indices(dataset.n)
    lab = clustering.labels
    mask = lab[r] != lab[c]
    if not mask.any():
        return math.inf, None
    vals = np.where(mask, dataset.distances.values, np.inf)
    j = int(np.argmin(vals))
    return float(vals[j]), (int(r[j]), int(c[j]))


@dataclass(frozen=True)
class CostReport:
    q: float
    sigma: float
    beta: float
    variational_threshold: float
    residual_threshold: Optional[float]
    min_inter: float
    n: int
    k: int


def cost_report(dataset: Dataset, clustering) -> CostReport:
    clustering = as_clustering(clustering, dataset)
    q = cost_q(dataset, clustering)
    s = dataset.sigma
    b = 2.0 * (q - (dataset.n - clustering.k - 1) * s * s / 2.0)
    mi, _ = min_inter(dataset, clustering)
    return CostReport(
        q=q,
        sigma=s,
        beta=b,
        variational_threshold=math.sqrt(2.0) * math.sqrt(q),
        residual_threshold=math.sqrt(b) if b >= 0 else None,
        min_inter=mi,
        n=dataset.n,
        k=clustering.k,
    )
