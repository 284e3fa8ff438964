"""Variational and residual k-separability, plus the range variants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

from .core import Clustering, Dataset, as_clustering, cost_q, min_inter, strictly_greater
from .errors import InvalidArgs, KTooSmall, NegativeBeta

Kind = Literal["variational", "residual"]
KINDS = ("variational", "residual")

# blocks up to this size are searched exhaustively for sub-separations
EXHAUSTIVE_BLOCK_LIMIT = 12


@dataclass(frozen=True)
class SeparabilityReport:
    kind: str
    separable: bool
    threshold: float
    min_inter: float
    witness_pair: Optional[tuple[int, int]] = None
    level: Optional[int] = None
    # how sub-blocks were searched by a range check
    search: Optional[str] = None


def _check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise InvalidArgs(f"kind must be one of {KINDS}, got {kind!r}")
    return kind


def _verdict(kind, threshold, dataset, clustering) -> SeparabilityReport:
    mi, pair = min_inter(dataset, clustering)
    ok = strictly_greater(mi, threshold)
    return SeparabilityReport(kind, ok, threshold, mi, None if ok else pair)


def check_variational(dataset: Dataset, clustering) -> SeparabilityReport:
    """Every inter-block distance must exceed sqrt(2) * sqrt(Q)."""
    clustering = as_clustering(clustering, dataset)
    if clustering.k < 2:
        raise KTooSmall("separability needs at least 2 blocks")
    threshold = math.sqrt(2.0) * math.sqrt(cost_q(dataset, clustering))
    return _verdict("variational", threshold, dataset, clustering)


def residual_beta(dataset: Dataset, clustering: Clustering) -> float:
    s = dataset.sigma
    return 2.0 * (cost_q(dataset, clustering) - (dataset.n - clustering.k - 1) * s * s / 2.0)


def check_residual(dataset: Dataset, clustering) -> SeparabilityReport:
    """Every inter-block distance must exceed sqrt(beta)."""
    clustering = as_clustering(clustering, dataset)
    if clustering.k < 2:
        raise KTooSmall("separability needs at least 2 blocks")
    b = residual_beta(dataset, clustering)
    if b < 0:
        raise NegativeBeta(f"beta = {b!r} < 0, residual threshold undefined")
    return _verdict("residual", math.sqrt(b), dataset, clustering)


def check(dataset: Dataset, clustering, kind: str) -> SeparabilityReport:
    if _check_kind(kind) == "variational":
        return check_variational(dataset, clustering)
    return check_residual(dataset, clustering)


def block_admits_separation(block: Dataset, kind: str, k_max: int, rng_seed: int = 0) -> tuple[bool, str]:
    """Does ``block`` admit a ``kind`` k'-separation for some k' in 2..k_max?

    Returns ``(found, strategy)``. Small blocks are decided exactly: a
    separation of either kind is the unique strict Q-minimiser, so only the
    exhaustive optimum and its near ties need testing.
    """
    from .clusterers import best_of_restarts
    from .oracle import exhaustive_optimum

    n = block.n
    if n < 4:
        return False, "vacuous"
    top = min(k_max, n // 2)
    if n <= EXHAUSTIVE_BLOCK_LIMIT:
        for kp in range(2, top + 1):
            res = exhaustive_optimum(block, kp)
            for cand in [res.best_clustering, *res.ties]:
                if check(block, cand, kind).separable:
                    return True, "exhaustive"
        return False, "exhaustive"
    for kp in range(2, top + 1):
        cand, _ = best_of_restarts(block, kp, kind, rng_seed, restarts=8)
        if check(block, cand, kind).separable:
            return True, "heuristic"
    return False, "heuristic"


def check_range(dataset: Dataset, clustering, kind: str, K: int, rng_seed: int = 0) -> SeparabilityReport:
    """k+K-range separation: the clustering separates the data and no block
    is itself k'-separable for any k' in 2..K+1."""
    _check_kind(kind)
    if K < 2:
        raise InvalidArgs(f"range check needs K >= 2, got {K}")
    clustering = as_clustering(clustering, dataset)
    base = check(dataset, clustering, kind)
    if not base.separable:
        return base
    strategies = set()
    for idx in clustering.blocks():
        found, how = block_admits_separation(dataset.subset(idx), kind, K + 1, rng_seed)
        strategies.add(how)
        if found:
            return SeparabilityReport(kind, False, base.threshold, base.min_inter, None, None, _summarise(strategies))
    return SeparabilityReport(
        kind, True, base.threshold, base.min_inter, None, clustering.k, _summarise(strategies)
    )


def _summarise(strategies: set) -> str:
    real = strategies - {"vacuous"}
    if not real:
        return "vacuous"
    if len(real) == 1:
        return real.pop()
    return "mixed"
