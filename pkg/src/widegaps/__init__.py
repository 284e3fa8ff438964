"""Clusterability criteria, k-means++ variants and axiom transforms for
k-means with wide inter-cluster gaps."""
from ._accel import backend
from .clusterers import (
    RangeResult,
    SeedingTrace,
    discover_range,
    refine_pairwise,
    seed_kmeanspp,
    seed_res_kmeanspp,
)
from .core import (
    Clustering,
    CostReport,
    Dataset,
    PseudoDistanceMatrix,
    beta,
    cost_q,
    cost_q_centroid,
    cost_report,
    sigma,
    validate_dataset,
)
from .generators import GeneratorConfig, generate_clusterable, generate_range_clusterable, richness_witness
from .oracle import OracleResult, all_hit_bound, eq6_bound, exhaustive_optimum, montecarlo_hit_probability
from .separability import SeparabilityReport, check_range, check_residual, check_variational
from .transforms import TransformSpec, apply_transform, euclidization_delta, verify_transform

__version__ = "0.1.0"

__all__ = [
    "Clustering", "CostReport", "Dataset", "GeneratorConfig", "OracleResult", "PseudoDistanceMatrix",
    "RangeResult", "SeedingTrace", "SeparabilityReport", "TransformSpec", "all_hit_bound", "apply_transform",
    "backend", "beta", "check_range", "check_residual", "check_variational", "cost_q", "cost_q_centroid",
    "cost_report", "discover_range", "eq6_bound", "euclidization_delta", "exhaustive_optimum",
    "generate_clusterable", "generate_range_clusterable", "montecarlo_hit_probability", "refine_pairwise",
    "richness_witness", "seed_kmeanspp", "seed_res_kmeanspp", "sigma", "validate_dataset", "verify_transform",
]
