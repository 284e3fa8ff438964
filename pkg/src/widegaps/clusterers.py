"""k-means++ / res-k-means++ seeding, pairwise refinement and the recursive
range-clustering master algorithm with automatic choice of k."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .core import Clustering, Dataset, as_clustering, cost_q, tolerance
from .errors import InvalidArgs, InvariantBreach, KOutOfRange
from .separability import KINDS, check

MAX_SWEEPS = 500
DEFAULT_RESTARTS = 8


def derive_seed(*parts: int) -> int:
    """Deterministic 64-bit seed from a tuple of non-negative integers."""
    ss = np.random.SeedSequence([int(p) for p in parts])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True, eq=False)
class SeedingTrace:
    seeds: tuple
    step_weights: tuple
    rng_seed: int
    variant: str
    clusters_hit: Optional[tuple] = None
    fallback_steps: tuple = ()

    @property
    def k(self) -> int:
        return len(self.seeds)


def _seed(dataset: Dataset, k: int, rng_seed: int, residual: bool, planted=None) -> SeedingTrace:
    n = dataset.n
    if k < 2 or 2 * k > n:
        raise KOutOfRange(f"seeding needs 2 <= k <= n/2 = {n // 2}, got k={k}")
    if planted is not None:
        planted = as_clustering(planted, dataset)
    rng = np.random.default_rng(rng_seed)
    d2 = dataset.d2
    s2 = dataset.sigma**2

    first = int(rng.integers(n))
    seeds = [first]
    weights = [np.ones(n)]
    fallback = []
    closest = d2[first].copy()
    for step in range(1, k):
        if residual:
            w = np.maximum(closest - s2, 0.0)
            w[seeds] = 0.0
        else:
            w = closest.copy()
        cum = np.cumsum(w)
        if cum[-1] > 0:
            j = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            if j >= n:
                j = int(np.flatnonzero(w > 0)[-1])
        else:
            free = np.setdiff1d(np.arange(n), seeds)
            j = int(free[rng.integers(free.size)])
            fallback.append(step)
        seeds.append(j)
        weights.append(w)
        np.minimum(closest, d2[j], out=closest)

    hit = None
    if planted is not None:
        hit = tuple(tuple(sorted({int(planted.labels[s]) for s in seeds[: i + 1]})) for i in range(k))
    for w in weights:
        w.flags.writeable = False
    return SeedingTrace(
        seeds=tuple(seeds),
        step_weights=tuple(weights),
        rng_seed=int(rng_seed),
        variant="residual" if residual else "classic",
        clusters_hit=hit,
        fallback_steps=tuple(fallback),
    )


def seed_kmeanspp(dataset: Dataset, k: int, rng_seed: int, planted=None) -> SeedingTrace:
    """First seed uniform, then proportional to squared distance to the
    nearest chosen seed. Only the distance matrix is used."""
    return _seed(dataset, k, rng_seed, False, planted)


def seed_res_kmeanspp(dataset: Dataset, k: int, rng_seed: int, planted=None) -> SeedingTrace:
    """As :func:`seed_kmeanspp` with weights reduced by sigma^2 (floored at 0).
    When every remaining weight is zero the next seed is drawn uniformly
    from the non-seeds and the step is listed in ``fallback_steps``."""
    return _seed(dataset, k, rng_seed, True, planted)


@dataclass(frozen=True, eq=False)
class RefineResult:
    clustering: Clustering
    q: float
    sweeps: int
    converged: bool
    rejected_moves: int
    repaired_seeds: int
    q_history: tuple = field(default=())


def _initial_labels(d2: np.ndarray, seeds) -> tuple[np.ndarray, int]:
    seeds = np.asarray(seeds, dtype=np.int64)
    k = seeds.size
    labels = np.argmin(d2[:, seeds], axis=1).astype(np.int64)
    repaired = 0
    while True:
        sizes = np.bincount(labels, minlength=k)
        short = np.flatnonzero(sizes < 2)
        if not short.size:
            return labels, repaired
        c = int(short[0])
        donors = np.flatnonzero(sizes[labels] > 2)
        j = int(donors[np.argmin(d2[seeds[c], donors])])
        labels[j] = c
        repaired += 1


def refine_pairwise_detailed(dataset: Dataset, trace, max_sweeps: int = MAX_SWEEPS) -> RefineResult:
    seeds = trace.seeds if isinstance(trace, SeedingTrace) else tuple(trace)
    if len(set(seeds)) != len(seeds):
        raise InvalidArgs("seeds must be distinct")
    d2 = np.ascontiguousarray(dataset.d2)
    labels, repaired = _initial_labels(d2, seeds)
    k = len(seeds)
    sizes = np.bincount(labels, minlength=k).astype(np.int64)
    R = np.empty((dataset.n, k))
    T = np.empty(k)
    for c in range(k):
        members = np.flatnonzero(labels == c)
        R[:, c] = d2[:, members].sum(axis=1)
        T[c] = R[members, c].sum()

    q_prev = cost_q(dataset, Clustering(labels, k))
    history = [q_prev]
    rejected = 0
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        moved, rej = _kernels.refine_sweep(d2, labels, sizes, R, T, 1e-12 * q_prev)
        sweeps += 1
        rejected += rej
        q = cost_q(dataset, Clustering(labels, k))
        if q > q_prev + tolerance(q_prev):
            raise InvariantBreach(f"refinement increased Q from {q_prev!r} to {q!r}")
        history.append(q)
        q_prev = q
        if moved == 0:
            converged = True
            break
    return RefineResult(
        clustering=Clustering(labels.copy(), k),
        q=q_prev,
        sweeps=sweeps,
        converged=converged,
        rejected_moves=rejected,
        repaired_seeds=repaired,
        q_history=tuple(history),
    )


def refine_pairwise(dataset: Dataset, trace, max_sweeps: int = MAX_SWEEPS) -> Clustering:
    """Nearest-seed start followed by single-point moves that strictly lower
    Q, computed from pairwise squared distances only. Moves that would
    leave a block with one member are rejected."""
    return refine_pairwise_detailed(dataset, trace, max_sweeps).clustering


def _seeder(kind: str):
    if kind == "variational":
        return seed_kmeanspp
    if kind == "residual":
        return seed_res_kmeanspp
    raise InvalidArgs(f"kind must be one of {KINDS}, got {kind!r}")


def best_of_restarts(dataset: Dataset, k: int, kind: str, rng_seed: int, restarts: int = DEFAULT_RESTARTS):
    """Best-Q clustering over ``restarts`` independent seedings; ties go to
    the lowest restart index."""
    if restarts < 1:
        raise InvalidArgs("restarts must be >= 1")
    seeder = _seeder(kind)
    best, best_q = None, math.inf
    for r in range(restarts):
        trace = seeder(dataset, k, derive_seed(rng_seed, k, r))
        res = refine_pairwise_detailed(dataset, trace)
        if res.q < best_q:
            best, best_q = res.clustering, res.q
    return best, best_q


@dataclass(frozen=True, eq=False)
class RangeResult:
    k: int
    clustering: Clustering
    kind: str
    k_x: int
    per_k_log: tuple
    restarts: int
    q: float

    @property
    def level(self) -> Optional[int]:
        return self.k if self.k >= 2 else None


def discover_range(
    dataset: Dataset,
    k_x: int,
    kind: str = "variational",
    rng_seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
) -> RangeResult:
    """Try k = k_x down to 2; accept the first k whose clustering is a
    separation of the given kind and none of whose blocks yields k' >= 2
    under the same procedure with ceiling k_x - k + 1. Otherwise k = 1."""
    _seeder(kind)
    n = dataset.n
    log = []

    def single():
        whole = Clustering.single_block(n)
        return RangeResult(1, whole, kind, k_x, tuple(log), restarts, cost_q(dataset, whole))

    if k_x < 2:
        return single()
    for k in range(k_x, 1, -1):
        if 2 * k > n:
            log.append({"k": k, "feasible": False, "separable": False, "sub_ok": None})
            continue
        clustering, q = best_of_restarts(dataset, k, kind, rng_seed, restarts)
        report = check(dataset, clustering, kind)
        entry = {"k": k, "feasible": True, "separable": report.separable, "sub_ok": None, "q": q}
        log.append(entry)
        if not report.separable:
            continue
        ok = True
        for b, idx in enumerate(clustering.blocks()):
            sub = discover_range(dataset.subset(idx), k_x - k + 1, kind, derive_seed(rng_seed, k, b, 1 << 20), restarts)
            if sub.k >= 2:
                ok = False
                break
        entry["sub_ok"] = ok
        if ok:
            return RangeResult(k, clustering, kind, k_x, tuple(log), restarts, q)
    return single()
