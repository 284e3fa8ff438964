import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import four_points, triangle_violator
from widegaps import (
    Clustering,
    Dataset,
    GeneratorConfig,
    TransformSpec,
    apply_transform,
    beta,
    check_residual,
    euclidization_delta,
    generate_clusterable,
    verify_transform,
)
from widegaps.core import PseudoDistanceMatrix
from widegaps.errors import InvalidSpec, SizeMismatch
from widegaps.transforms import KINDS, centered_gram, gram_eigenvalues, is_embeddable

RELATIVE_KINDS = [k for k in KINDS if k not in ("scale", "delta_shift")]


def spec_for(kind, cl, c=0.5, g=2.0):
    if kind == "scale":
        return TransformSpec(kind, alpha=1.0)
    if kind == "delta_shift":
        return TransformSpec(kind, delta=0.0)
    return TransformSpec(kind, intra_factor=c, inter_growth=g, clustering=cl)


def test_scale_identity_and_doubling():
    ds, _ = four_points()
    same = apply_transform(ds, TransformSpec("scale", alpha=1.0))
    assert np.array_equal(same.distances.values, ds.distances.values)
    doubled = apply_transform(ds, TransformSpec("scale", alpha=2.0))
    assert np.array_equal(doubled.distances.values, 2 * ds.distances.values)


def test_delta_shift_moves_beta():
    ds, cl = four_points()
    shifted = apply_transform(ds, TransformSpec("delta_shift", delta=5.0))
    assert beta(shifted, cl) == pytest.approx(6.0, rel=1e-12)
    assert shifted.embedding is None


def test_lower_bounded_relative_clamps_at_sigma():
    ds, cl = four_points()
    spec = TransformSpec("lower_bounded_relative_consistency", intra_factor=0.5, inter_growth=1.0, clustering=cl)
    for seed in range(20):
        after = apply_transform(ds, spec, seed)
        assert after.distances[0, 1] == 1.0 and after.distances[2, 3] == 1.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="scale"),
        dict(kind="scale", alpha=1.0, delta=1.0),
        dict(kind="delta_shift", delta=-1.0),
        dict(kind="relative_consistency", intra_factor=0.5, inter_growth=2.0),
        dict(kind="consistency", intra_factor=0.0, inter_growth=2.0, clustering=[0, 0, 1, 1]),
        dict(kind="consistency", intra_factor=0.5, inter_growth=0.5, clustering=[0, 0, 1, 1]),
        dict(kind="shuffle"),
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(InvalidSpec):
        TransformSpec(**kwargs)


@pytest.mark.parametrize("kind", KINDS)
def test_identity_verifies(kind):
    ds, cl = generate_clusterable(GeneratorConfig(k=2, sizes=(4, 5)))
    spec = spec_for(kind, cl)
    ok, violations = verify_transform(ds, ds, spec)
    assert ok and violations == []


def test_grown_intra_pair_flagged():
    ds, cl = four_points()
    vals = ds.distances.values.copy()
    vals[0] *= 1.01  # pair (0, 1)
    after = Dataset(PseudoDistanceMatrix(4, vals))
    ok, violations = verify_transform(ds, after, spec_for("consistency", cl))
    assert not ok and len(violations) == 1
    assert violations[0].clause == "intra d'<=d" and violations[0].where == (0, 1)


def test_order_and_ratio_clauses():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [30.0, 0.0], [31.0, 0.0]])
    ds = Dataset.from_points(pts)
    cl = Clustering([0, 0, 0, 1, 1])
    D = ds.distances.square()
    D[0, 2] = D[2, 0] = 0.5  # was 2 > d(0,1) = 1, now shorter: breaks order
    after = Dataset.from_distances(D)
    ok, violations = verify_transform(ds, after, spec_for("relative_consistency", cl))
    clauses = {v.clause for v in violations}
    assert not ok and {"order preserved", "ratio non-increasing"} <= clauses


def test_lower_bound_clause():
    ds, cl = four_points()
    D = ds.distances.square()
    D[0, 1] = D[1, 0] = 0.5
    ok, violations = verify_transform(ds, Dataset.from_distances(D), spec_for("lower_bounded_consistency", cl))
    assert not ok and violations[0].clause == "d'>=sigma(d)"


def test_size_mismatch():
    ds, cl = four_points()
    with pytest.raises(SizeMismatch):
        verify_transform(ds, ds.subset([0, 1, 2]), spec_for("consistency", cl))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(RELATIVE_KINDS), st.floats(0.05, 1.0), st.floats(1.0, 5.0))
def test_random_transforms_verify(seed, kind, c, g):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 4))
    ds, cl = generate_clusterable(GeneratorConfig(k=k, sizes=tuple(rng.integers(2, 7, size=k)), rng_seed=seed))
    spec = TransformSpec(kind, intra_factor=c, inter_growth=g, clustering=cl)
    after = apply_transform(ds, spec, seed)
    ok, violations = verify_transform(ds, after, spec)
    assert ok, violations[:3]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0), st.floats(1.0, 5.0))
def test_lower_bounded_consistency_keeps_residual_verdict(seed, c, g):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 4))
    cfg = GeneratorConfig(k=k, sizes=tuple(rng.integers(2, 7, size=k)), kind="residual", rng_seed=seed)
    ds, cl = generate_clusterable(cfg)
    spec = TransformSpec("lower_bounded_consistency", intra_factor=c, inter_growth=g, clustering=cl)
    assert check_residual(apply_transform(ds, spec, seed), cl).separable


def test_euclidean_input_needs_no_shift():
    ds = Dataset.from_points(np.random.default_rng(0).normal(size=(20, 3)))
    B = centered_gram(ds)
    assert euclidization_delta(ds) <= 1e-9 * np.linalg.norm(B)
    assert is_embeddable(ds)


def test_triangle_violator_shift():
    ds = triangle_violator()
    assert not is_embeddable(ds)
    delta = euclidization_delta(ds)
    assert delta > 0
    lam = np.linalg.eigvalsh(centered_gram(ds))[0]
    assert delta == pytest.approx(-2 * lam, rel=1e-10)
    for extra in (0.0, 0.1, 1.0, 10.0, 100.0):
        shifted = apply_transform(ds, TransformSpec("delta_shift", delta=delta + extra))
        assert is_embeddable(shifted)


def test_gram_eigenvalues_match_lapack():
    ds = Dataset.from_condensed(np.random.default_rng(8).uniform(0.1, 1, 66))
    ref = np.linalg.eigvalsh(centered_gram(ds))
    assert np.allclose(gram_eigenvalues(ds), ref, atol=1e-12 * np.abs(ref).max())
