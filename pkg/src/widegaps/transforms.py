"""Axiom-related distance transforms, their verification, and the additive
constant that makes squared dissimilarities Euclidean."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .core import (
    ABS_TOL,
    REL_TOL,
    Clustering,
    Dataset,
    PseudoDistanceMatrix,
    as_clustering,
    pair_indices,
)
from .errors import InvalidSpec, SizeMismatch

KINDS = (
    "scale",
    "consistency",
    "lower_bounded_consistency",
    "relative_consistency",
    "lower_bounded_relative_consistency",
    "delta_shift",
)
_RELATIVE_TO_CLUSTERING = KINDS[1:5]
_LOWER_BOUNDED = ("lower_bounded_consistency", "lower_bounded_relative_consistency")
_RELATIVE = ("relative_consistency", "lower_bounded_relative_consistency")

JACOBI_REL_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class TransformSpec:
    """Declarative distance transform.

    ``intra_factor`` is the lower end of the shrink factors drawn for
    within-block distances, ``inter_growth`` the upper end of the
    multiplicative growth factors for between-block distances.
    """

    kind: str
    alpha: Optional[float] = None
    intra_factor: Optional[float] = None
    inter_growth: Optional[float] = None
    delta: Optional[float] = None
    clustering: Optional[Clustering] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown transform kind {self.kind!r}; expected one of {KINDS}")
        need = {
            "alpha": self.kind == "scale",
            "delta": self.kind == "delta_shift",
            "intra_factor": self.kind in _RELATIVE_TO_CLUSTERING,
            "inter_growth": self.kind in _RELATIVE_TO_CLUSTERING,
            "clustering": self.kind in _RELATIVE_TO_CLUSTERING,
        }
        for name, required in need.items():
            present = getattr(self, name) is not None
            if required and not present:
                raise InvalidSpec(f"{self.kind} transform requires {name}")
            if present and not required:
                raise InvalidSpec(f"{self.kind} transform does not take {name}")
        if self.alpha is not None and not self.alpha > 0:
            raise InvalidSpec("alpha must be positive")
        if self.delta is not None and not self.delta >= 0:
            raise InvalidSpec("delta must be non-negative")
        if self.intra_factor is not None and not 0 < self.intra_factor <= 1:
            raise InvalidSpec("intra_factor must lie in (0, 1]")
        if self.inter_growth is not None and not self.inter_growth >= 1:
            raise InvalidSpec("inter_growth must be >= 1")
        if self.clustering is not None and not isinstance(self.clustering, Clustering):
            object.__setattr__(self, "clustering", Clustering(self.clustering))


def _with_values(dataset: Dataset, values: np.ndarray, embedding=None) -> Dataset:
    return Dataset(PseudoDistanceMatrix(dataset.n, values), embedding)


def apply_transform(dataset: Dataset, spec: TransformSpec, rng_seed: int = 0) -> Dataset:
    d = dataset.distances.values
    if spec.kind == "scale":
        emb = None if dataset.embedding is None else dataset.embedding * spec.alpha
        return _with_values(dataset, d * spec.alpha, emb)
    if spec.kind == "delta_shift":
        return _with_values(dataset, np.sqrt(d * d + spec.delta))

    clustering = as_clustering(spec.clustering, dataset)
    rng = np.random.default_rng(rng_seed)
    r, c = pair_indices(dataset.n)
    lab = clustering.labels
    intra = lab[r] == lab[c]
    npairs = d.shape[0]
    if spec.kind in _RELATIVE:
        per_block = rng.uniform(spec.intra_factor, 1.0, size=clustering.k)
        shrink = per_block[lab[r]]
    else:
        shrink = rng.uniform(spec.intra_factor, 1.0, size=npairs)
    grow = rng.uniform(1.0, spec.inter_growth, size=npairs)
    out = np.where(intra, d * shrink, d * grow)
    if spec.kind in _LOWER_BOUNDED:
        out = np.where(intra, np.maximum(out, dataset.sigma), out)
    return _with_values(dataset, out)


@dataclass(frozen=True)
class Violation:
    clause: str
    where: tuple
    before: tuple
    after: tuple


def _slack(x):
    return np.maximum(REL_TOL * np.abs(x), ABS_TOL)


def verify_transform(before: Dataset, after: Dataset, spec: TransformSpec, max_report: int = 1000):
    """Check every clause of ``spec.kind`` on all pairs (and, for relative
    kinds, all within-block triples). Returns ``(ok, violations)``."""
    if before.n != after.n:
        raise SizeMismatch(f"datasets have {before.n} and {after.n} points")
    d = before.distances.values
    e = after.distances.values
    r, c = pair_indices(before.n)
    found: list[Violation] = []

    def record(clause, mask, vals_before, vals_after):
        for j in np.flatnonzero(mask)[: max(0, max_report - len(found))]:
            found.append(Violation(clause, (int(r[j]), int(c[j])), (float(vals_before[j]),), (float(vals_after[j]),)))

    if spec.kind == "scale":
        target = spec.alpha * d
        record("d'=alpha*d", np.abs(e - target) > _slack(target), d, e)
        return not found, found
    if spec.kind == "delta_shift":
        target = d * d + spec.delta
        record("d'^2=d^2+delta", np.abs(e * e - target) > _slack(target), d, e)
        return not found, found

    clustering = as_clustering(spec.clustering, before)
    lab = clustering.labels
    intra = lab[r] == lab[c]
    record("intra d'<=d", intra & (e > d + _slack(d)), d, e)
    record("inter d'>=d", ~intra & (e < d - _slack(d)), d, e)
    if spec.kind in _LOWER_BOUNDED:
        floor = before.sigma
        record("d'>=sigma(d)", e < floor - _slack(floor), d, e)
    if spec.kind in _RELATIVE:
        _check_triples(before, after, clustering, found, max_report)
    return not found, found


def _check_triples(before, after, clustering, found, max_report):
    D = before.distances.square()
    E = after.distances.square()
    for idx in clustering.blocks():
        if idx.size < 3:
            continue
        for i in idx:
            others = idx[idx != i]
            di, ei = D[i, others], E[i, others]
            # premise d(i,j) <= d(i,l) for the ordered pair (j, l)
            prem = di[:, None] <= di[None, :]
            np.fill_diagonal(prem, False)
            order_bad = prem & (ei[:, None] > ei[None, :] + _slack(ei)[None, :])
            ratio_d = di[None, :] / di[:, None]
            ratio_e = ei[None, :] / ei[:, None]
            ratio_bad = prem & (ratio_e > ratio_d + _slack(ratio_d))
            for clause, bad in (("order preserved", order_bad), ("ratio non-increasing", ratio_bad)):
                for a, b in zip(*np.nonzero(bad)):
                    if len(found) >= max_report:
                        return
                    j, l = int(others[a]), int(others[b])
                    found.append(
                        Violation(clause, (int(i), j, l), (float(di[a]), float(di[b])), (float(ei[a]), float(ei[b])))
                    )


def centered_gram(dataset: Dataset) -> np.ndarray:
    """B = -1/2 J D^2 J with J the centering projector."""
    d2 = dataset.d2
    row = d2.mean(axis=1)
    return -0.5 * (d2 - row[:, None] - row[None, :] + d2.mean())


def gram_eigenvalues(dataset: Dataset) -> np.ndarray:
    """Eigenvalues of the centered Gram matrix by cyclic Jacobi, ascending."""
    vals, _, _ = _kernels.jacobi_eigenvalues(np.ascontiguousarray(centered_gram(dataset)), JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    return np.sort(vals)


def euclidization_delta(dataset: Dataset) -> float:
    """Smallest constant that, added to every off-diagonal squared distance,
    makes the dissimilarities Euclidean-embeddable: max(0, -2 lambda_min)."""
    lam = gram_eigenvalues(dataset)[0]
    return max(0.0, -2.0 * float(lam))


def is_embeddable(dataset: Dataset, rel_tol: float = 1e-9) -> bool:
    B = centered_gram(dataset)
    lam = gram_eigenvalues(dataset)[0]
    return bool(lam >= -rel_tol * math.sqrt(float(np.sum(B * B))))
