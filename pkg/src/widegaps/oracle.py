"""Ground truth by brute force: exhaustive partition scans and Monte Carlo
estimates of seeding success."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import norm

from . import _kernels
from .clusterers import seed_kmeanspp, seed_res_kmeanspp
from .core import REL_TOL, Clustering, Dataset, as_clustering
from .errors import InvalidArgs, KOutOfRange, TooLarge

MAX_ENUMERATION_N = 14
MIN_TRIALS = 1000


@dataclass(frozen=True, eq=False)
class OracleResult:
    best_q: float
    best_clustering: Clustering
    num_partitions_scanned: int
    ties: tuple
    ties_overflow: bool = False


def count_partitions(n: int, k: int, min_size: int = 2) -> int:
    """Number of partitions of n labelled points into k blocks of size >=
    ``min_size`` (associated Stirling numbers of the second kind)."""

    @lru_cache(maxsize=None)
    def rec(m, j):
        # point m-1 either joins one of j blocks or starts a block with
        # min_size - 1 companions chosen among the other m - 1 points
        if m == 0:
            return 1 if j == 0 else 0
        if j == 0 or m < j * min_size:
            return 0
        return j * rec(m - 1, j) + math.comb(m - 1, min_size - 1) * rec(m - min_size, j - 1)

    return rec(n, k)


def exhaustive_optimum(dataset: Dataset, k: int) -> OracleResult:
    """Global Q-minimiser over every partition into exactly k blocks of size
    >= 2, with all co-optimal partitions within 1e-9 relative."""
    n = dataset.n
    if n > MAX_ENUMERATION_N:
        raise TooLarge(f"exhaustive scan is capped at n={MAX_ENUMERATION_N}, got n={n}")
    if k < 1 or 2 * k > n:
        raise KOutOfRange(f"need 1 <= k <= n/2 = {n // 2}, got k={k}")
    d2 = np.ascontiguousarray(dataset.d2)
    best_q, best_labels, count, cand_labels, _, best_idx, overflow = _kernels.enumerate_optimum(
        d2, k, REL_TOL, _kernels.MAX_STORED_TIES
    )
    ties = tuple(Clustering(cand_labels[j], k) for j in range(len(cand_labels)) if j != best_idx)
    return OracleResult(float(best_q), Clustering(best_labels, k), int(count), ties, bool(overflow))


def all_hit_bound(m: int, k: int) -> float:
    """Lower bound on the probability that k seeds land in k distinct
    blocks of size >= m: prod_{i=1}^{k-1} (1 - 1/(m(k-i)+1))."""
    if m < 1 or k < 1:
        raise InvalidArgs(f"need m >= 1 and k >= 1, got m={m}, k={k}")
    p = 1.0
    for i in range(1, k):
        p *= 1.0 - 1.0 / (m * (k - i) + 1)
    return p


eq6_bound = all_hit_bound


def wilson_interval(hits: int, trials: int, confidence: float = 0.99) -> tuple[float, float]:
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = hits / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class HitEstimate:
    fraction: float
    hits: int
    trials: int
    lower: float
    upper: float
    bound: float
    min_block: int
    k: int


def montecarlo_hit_probability(
    dataset: Dataset, planted, variant: str = "classic", trials: int = 10_000, rng_seed: int = 0
) -> HitEstimate:
    """Fraction of seedings whose k seeds fall into k distinct planted blocks,
    with a Wilson 99% interval and the analytic lower bound."""
    planted = as_clustering(planted, dataset)
    if variant not in ("classic", "residual"):
        raise InvalidArgs(f"variant must be 'classic' or 'residual', got {variant!r}")
    if trials < MIN_TRIALS:
        raise InvalidArgs(f"need at least {MIN_TRIALS} trials, got {trials}")
    k = planted.k
    m = int(planted.sizes().min())
    bound = all_hit_bound(m, k)
    if k == 1:
        hits = trials
    else:
        seeder = seed_kmeanspp if variant == "classic" else seed_res_kmeanspp
        trial_seeds = np.random.SeedSequence(rng_seed).generate_state(trials, np.uint64)
        lab = planted.labels
        hits = 0
        for s in trial_seeds:
            trace = seeder(dataset, k, int(s))
            if len(set(lab[list(trace.seeds)].tolist())) == k:
                hits += 1
    lo, hi = wilson_interval(hits, trials)
    return HitEstimate(hits / trials, hits, trials, lo, hi, bound, m, k)
