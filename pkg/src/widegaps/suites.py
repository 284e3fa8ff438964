"""End-to-end property suites: generate -> transform -> recluster -> compare.

Each runner returns a :class:`PropertyResult`; failures carry enough of a
manifest (seeds and configuration) to replay the trial.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .clusterers import derive_seed, discover_range
from .core import Clustering
from .generators import GeneratorConfig, gaussian_blob, generate_range_clusterable, richness_witness
from .transforms import TransformSpec, apply_transform, verify_transform

SCALE_FACTORS = (0.5, 2.0, 10.0)
DEFAULT_KX = 4

# which clustering criterion each transform is expected to preserve
TRANSFORM_TARGETS = {
    "consistency": ("variational",),
    "relative_consistency": ("variational",),
    "lower_bounded_consistency": ("residual",),
    "lower_bounded_relative_consistency": ("variational", "residual"),
}
# per-pair shrinking can open sub-gaps inside a block, so the lower-bounded
# non-relative kind keeps the residual verdict but not necessarily the range result
RANGE_PRESERVING = ("consistency", "relative_consistency", "lower_bounded_relative_consistency")


@dataclass
class PropertyResult:
    name: str
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def add(self, success: bool, manifest: dict):
        self.total += 1
        if success:
            self.passed += 1
        else:
            self.failures.append(manifest)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "total": self.total, "failures": self.failures}


def random_config(seed: int, kind: str) -> GeneratorConfig:
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 4))
    return GeneratorConfig(
        k=k,
        sizes=tuple(int(s) for s in rng.integers(3, 8, size=k)),
        dim=2,
        intra_spread=float(rng.uniform(0.5, 2.0)),
        gap_margin=float(rng.uniform(1.5, 3.0)),
        kind=kind,
        rng_seed=seed,
    )


def _same(a, b) -> bool:
    return a.k == b.k and a.clustering.same_partition(b.clustering)


def scale_suite(trials: int, seed: int, k_x: int = DEFAULT_KX) -> PropertyResult:
    """Scaling all distances leaves the range clustering unchanged."""
    result = PropertyResult("scale_invariance")
    for t in range(trials):
        s = derive_seed(seed, 1, t)
        kind = ("variational", "residual")[t % 2]
        cfg = random_config(s, kind)
        ds, _ = generate_range_clusterable(cfg, 2)
        base = discover_range(ds, k_x, kind, s)
        for alpha in SCALE_FACTORS:
            scaled = apply_transform(ds, TransformSpec("scale", alpha=alpha))
            other = discover_range(scaled, k_x, kind, s)
            result.add(_same(base, other), {"trial": t, "seed": s, "alpha": alpha, "config": asdict(cfg)})
    return result


def consistency_suite(
    trials: int,
    seed: int,
    transform: str = "lower_bounded_relative_consistency",
    kinds=None,
    k_x: int = DEFAULT_KX,
) -> PropertyResult:
    """Random ``transform`` relative to the discovered clustering leaves the
    range result (k and partition) unchanged."""
    kinds = kinds or TRANSFORM_TARGETS[transform]
    result = PropertyResult(f"{transform}_preserves_range_result")
    for t in range(trials):
        s = derive_seed(seed, 2, t)
        kind = kinds[t % len(kinds)]
        cfg = random_config(s, kind)
        ds, _ = generate_range_clusterable(cfg, 2)
        base = discover_range(ds, k_x, kind, s)
        rng = np.random.default_rng(s)
        spec = TransformSpec(
            transform,
            intra_factor=float(rng.uniform(0.3, 1.0)),
            inter_growth=float(rng.uniform(1.0, 3.0)),
            clustering=base.clustering,
        )
        after = apply_transform(ds, spec, s)
        verified, _ = verify_transform(ds, after, spec)
        other = discover_range(after, k_x, kind, s)
        manifest = {
            "trial": t,
            "seed": s,
            "kind": kind,
            "intra_factor": spec.intra_factor,
            "inter_growth": spec.inter_growth,
            "config": asdict(cfg),
        }
        result.add(verified and base.k >= 2 and _same(base, other), manifest)
    return result


def random_target(seed: int, max_k: int = 5) -> Clustering:
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, max_k + 1))
    sizes = rng.integers(2, 6, size=k)
    labels = np.repeat(np.arange(k), sizes)
    return Clustering(rng.permutation(labels), k)


def richness_suite(trials: int, seed: int) -> PropertyResult:
    """Every target partition is returned on its constructed witness."""
    result = PropertyResult("range_richness")
    for t in range(trials):
        s = derive_seed(seed, 3, t)
        kind = ("variational", "residual")[t % 2]
        target = random_target(s)
        witness = richness_witness(target, kind, s)
        got = discover_range(witness, target.k, kind, derive_seed(s, 1))
        result.add(
            got.clustering.same_partition(target),
            {"trial": t, "seed": s, "kind": kind, "target": target.labels.tolist()},
        )
    return result


def null_suite(trials: int, seed: int, k_x: int = 5, kinds=("variational", "residual")) -> PropertyResult:
    """Single Gaussian clouds yield k = 1."""
    result = PropertyResult("no_structure_null")
    for t in range(trials):
        s = derive_seed(seed, 4, t)
        n = int(np.random.default_rng(s).integers(12, 41))
        ds = gaussian_blob(n, 2, 1.0, s)
        ok = all(discover_range(ds, k_x, kind, s).k == 1 for kind in kinds)
        result.add(ok, {"trial": t, "seed": s, "n": n})
    return result


SUITES = {
    "scale": lambda trials, seed: [scale_suite(trials, seed)],
    "consistency": lambda trials, seed: [consistency_suite(trials, seed)],
    "richness": lambda trials, seed: [richness_suite(trials, seed)],
}


def run_suite(name: str, trials: int, seed: int) -> list[PropertyResult]:
    if name == "all":
        return [r for key in ("scale", "consistency", "richness") for r in SUITES[key](trials, seed)]
    return SUITES[name](trials, seed)
