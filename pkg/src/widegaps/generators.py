"""Datasets with planted clusterings that are provably the global k-means
optimum, and constructive richness witnesses."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import helmert
from scipy.spatial.distance import pdist

from .clusterers import derive_seed
from .core import Clustering, Dataset
from .errors import ConfigInvalid, InvariantBreach, RangePlantFailed, ResidualUndefined, WideGapsError
from .separability import KINDS, check, check_range

MAX_ATTEMPTS = 100
MODES = ("gaussian", "fixed_pair")


@dataclass(frozen=True)
class GeneratorConfig:
    k: int
    sizes: tuple
    dim: int = 2
    intra_spread: float = 1.0
    gap_margin: float = 2.0
    kind: str = "variational"
    rng_seed: int = 0
    mode: str = "gaussian"
    # fixed intra-block geometries; replaces sampling when given
    blocks: Optional[tuple] = None

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if self.k < 2:
            raise ConfigInvalid(f"need k >= 2 planted blocks, got {self.k}")
        if len(sizes) != self.k:
            raise ConfigInvalid(f"got {len(sizes)} sizes for k={self.k}")
        if min(sizes) < 2:
            raise ConfigInvalid(f"block sizes must be >= 2, got {list(sizes)}")
        if self.dim < 1:
            raise ConfigInvalid("dim must be >= 1")
        if not self.intra_spread > 0:
            raise ConfigInvalid("intra_spread must be positive")
        if not self.gap_margin > 1:
            raise ConfigInvalid("gap_margin must be > 1")
        if self.kind not in KINDS:
            raise ConfigInvalid(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.mode not in MODES:
            raise ConfigInvalid(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "fixed_pair" and any(s != 2 for s in sizes):
            raise ConfigInvalid("fixed_pair mode needs every block of size 2")
        if self.blocks is not None:
            blocks = tuple(np.atleast_2d(np.asarray(b, dtype=float)) for b in self.blocks)
            if [b.shape[0] for b in blocks] != list(sizes):
                raise ConfigInvalid("explicit blocks do not match sizes")
            object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return sum(self.sizes)


def _simplex(k: int, edge: float, dim: int) -> np.ndarray:
    """k points in ``dim`` >= k-1 dimensions with all mutual distances ``edge``."""
    v = helmert(k).T * (edge / math.sqrt(2.0))
    out = np.zeros((k, dim))
    out[:, : k - 1] = v
    return out


def _sample_blocks(config: GeneratorConfig, rng, dim: int) -> list[np.ndarray]:
    if config.blocks is not None:
        out = []
        for b in config.blocks:
            pad = np.zeros((b.shape[0], dim))
            pad[:, : b.shape[1]] = b
            out.append(pad)
        return out
    if config.mode == "fixed_pair":
        # along the last axis, orthogonal to the simplex when dim >= k
        half = np.zeros(dim)
        half[-1] = config.intra_spread / 2.0
        return [np.stack([-half, half]) for _ in config.sizes]
    return [rng.normal(0.0, config.intra_spread, size=(m, dim)) for m in config.sizes]


def _block_stats(blocks: Sequence[np.ndarray]) -> tuple[float, float]:
    q = 0.0
    s = math.inf
    for b in blocks:
        d = pdist(b)
        q += float(np.sum(d * d)) / b.shape[0]
        s = min(s, float(d.min()))
    return q, s


def generate_clusterable(config: GeneratorConfig) -> tuple[Dataset, Clustering]:
    """Sample the blocks, then translate them apart on a regular simplex so
    that every between-block distance exceeds ``gap_margin`` times the
    separability threshold. Translation leaves Q untouched."""
    k = config.k
    dim = max(config.dim, k - 1)
    if config.mode == "fixed_pair":
        dim = max(config.dim, k)
    n = config.n
    for attempt in range(MAX_ATTEMPTS):
        rng = np.random.default_rng(derive_seed(config.rng_seed, attempt))
        blocks = _sample_blocks(config, rng, dim)
        blocks = [b - b.mean(axis=0) for b in blocks]
        q, s = _block_stats(blocks)
        if s <= 0:
            if config.blocks is not None:
                raise ConfigInvalid("explicit block contains duplicate points")
            continue
        if config.kind == "variational":
            threshold = math.sqrt(2.0) * math.sqrt(q)
        else:
            slack = 2.0 * (q - (n - k - 1) * s * s / 2.0)
            if slack < 0:
                if config.blocks is not None:
                    break
                continue
            threshold = math.sqrt(slack)
        radius = max(float(np.sqrt((blk * blk).sum(axis=1)).max()) for blk in blocks)
        centers = _simplex(k, config.gap_margin * threshold + 2.0 * radius, dim)
        points = np.concatenate([b + c for b, c in zip(blocks, centers)])
        labels = np.repeat(np.arange(k), config.sizes)
        dataset = Dataset.from_points(points)
        clustering = Clustering(labels, k)
        if not check(dataset, clustering, config.kind).separable:
            raise InvariantBreach("generated dataset failed its own separability check")
        return dataset, clustering
    raise ResidualUndefined(f"beta < 0 in every one of {MAX_ATTEMPTS} sampled intra structures")


def generate_range_clusterable(config: GeneratorConfig, K: int) -> tuple[Dataset, Clustering]:
    """As :func:`generate_clusterable`, resampling until no block is itself
    k'-separable for k' in 2..K+1."""
    if K < 2:
        raise ConfigInvalid(f"range planting needs K >= 2, got {K}")
    for attempt in range(MAX_ATTEMPTS):
        cfg = config if attempt == 0 else replace(config, rng_seed=derive_seed(config.rng_seed, 7919, attempt))
        dataset, clustering = generate_clusterable(cfg)
        if check_range(dataset, clustering, config.kind, K).separable:
            return dataset, clustering
        if config.blocks is not None or config.mode == "fixed_pair":
            # deterministic geometry: resampling cannot change the verdict
            break
    raise RangePlantFailed(f"no block layout free of sub-separations found for K={K}")


def gaussian_blob(n: int, dim: int = 2, spread: float = 1.0, rng_seed: int = 0) -> Dataset:
    """Single isotropic Gaussian cloud; carries no cluster structure."""
    if n < 2:
        raise ConfigInvalid("a blob needs at least 2 points")
    rng = np.random.default_rng(rng_seed)
    return Dataset.from_points(rng.normal(0.0, spread, size=(n, dim)))


def richness_witness(
    target,
    kind: str = "variational",
    rng_seed: int = 0,
    dim: int = 2,
    intra_spread: float = 1.0,
    gap_margin: float = 2.0,
) -> Dataset:
    """Euclidean dataset on which the range algorithm with ``k_x = target.k``
    recovers exactly ``target``."""
    if not isinstance(target, Clustering):
        try:
            target = Clustering(target)
        except WideGapsError as exc:
            raise ConfigInvalid(str(exc)) from exc
    if kind not in KINDS:
        raise ConfigInvalid(f"kind must be one of {KINDS}, got {kind!r}")
    if target.k == 1:
        return gaussian_blob(target.n, dim, intra_spread, rng_seed)
    sizes = tuple(int(s) for s in target.sizes())
    cfg = GeneratorConfig(
        k=target.k,
        sizes=sizes,
        dim=dim,
        intra_spread=intra_spread,
        gap_margin=gap_margin,
        kind=kind,
        rng_seed=rng_seed,
    )
    dataset, planted = generate_range_clusterable(cfg, 2)
    points = np.empty_like(dataset.embedding)
    for src, dst in zip(planted.blocks(), target.blocks()):
        points[dst] = dataset.embedding[src]
    return Dataset.from_points(points)
