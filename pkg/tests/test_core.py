import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import four_points
from widegaps import Clustering, Dataset, beta, cost_q, cost_q_centroid, cost_report, sigma, validate_dataset
from widegaps.core import PseudoDistanceMatrix, condensed_index, min_inter, strictly_greater
from widegaps.errors import (
    AsymmetricInput,
    DuplicatePoint,
    InvalidClustering,
    NegativeDistance,
    TooSmall,
    WideGapsError,
)


def test_two_points_on_a_line():
    ds = validate_dataset(np.array([[0.0], [3.0]]))
    assert ds.n == 2
    assert ds.distances[0, 1] == 3.0
    assert ds.embedding is not None


def test_zero_off_diagonal_is_duplicate():
    with pytest.raises(DuplicatePoint):
        validate_dataset([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
    with pytest.raises(DuplicatePoint):
        Dataset.from_points([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]])


def test_triangle_inequality_not_required():
    ds = validate_dataset([[0, 1, 1], [1, 0, 3], [1, 3, 0]])
    assert ds.distances[1, 2] == 3.0
    assert ds.embedding is None


@pytest.mark.parametrize(
    "matrix, err",
    [
        ([[0, 1], [2, 0]], AsymmetricInput),
        ([[0, -1], [-1, 0]], NegativeDistance),
        ([[0.0]], TooSmall),
        ([[0, 1, 2], [1, 0, 1]], AsymmetricInput),
        ([[0, np.nan], [np.nan, 0]], WideGapsError),
        ([[1, 1], [1, 0]], WideGapsError),
    ],
)
def test_invalid_matrices(matrix, err):
    with pytest.raises(err):
        Dataset.from_distances(matrix)


def test_embedding_must_match_distances():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    good = Dataset.from_points(pts)
    with pytest.raises(WideGapsError):
        Dataset(good.distances, pts * 1.01)


def test_condensed_index_matches_square():
    rng = np.random.default_rng(0)
    ds = Dataset.from_points(rng.normal(size=(7, 2)))
    sq = ds.distances.square()
    for i in range(7):
        for l in range(7):
            if i != l:
                assert ds.distances[i, l] == sq[i, l]
                assert ds.distances.values[condensed_index(7, i, l)] == sq[i, l]


def test_distance_storage_is_read_only():
    ds, _ = four_points()
    with pytest.raises(ValueError):
        ds.distances.values[0] = 5.0


def test_clustering_rules():
    with pytest.raises(InvalidClustering):
        Clustering([0, 0, 1])
    with pytest.raises(InvalidClustering):
        Clustering([0, 0, 2, 2])
    with pytest.raises(InvalidClustering):
        Clustering([0.5, 0.5])
    c = Clustering([1, 1, 0, 0])
    assert c.same_partition(Clustering([0, 0, 1, 1]))
    assert not c.same_partition(Clustering([0, 1, 0, 1]))
    assert c.canonical().tolist() == [0, 0, 1, 1]
    with pytest.raises(AttributeError):
        c.k = 3
    assert Clustering.from_blocks([[0, 3], [1, 2]]).labels.tolist() == [0, 1, 1, 0]


def test_pair_cost():
    ds = Dataset.from_points([[0.0], [2.5]])
    assert cost_q(ds, Clustering.single_block(2)) == pytest.approx(2.5**2 / 2)


def test_four_point_report():
    ds, cl = four_points()
    rep = cost_report(ds, cl)
    assert (rep.q, rep.sigma, rep.beta) == (1.0, 1.0, 1.0)
    assert min_inter(ds, cl)[0] == 3.0


def test_sigma_examples():
    assert sigma(Dataset.from_distances([[0, 1, 3], [1, 0, 3], [3, 3, 0]])) == 1.0
    assert sigma(Dataset.from_condensed(np.full(10, 2.5))) == 2.5


def test_beta_all_pairs_at_sigma():
    n, s = 8, 0.7
    D = np.full((n, n), 50.0)
    for b in range(0, n, 2):
        D[b, b + 1] = D[b + 1, b] = s
    np.fill_diagonal(D, 0)
    ds = Dataset.from_distances(D)
    cl = Clustering(np.repeat(np.arange(n // 2), 2))
    assert beta(ds, cl) == pytest.approx(s * s, rel=1e-12)


def test_min_inter_single_block():
    ds, _ = four_points()
    assert min_inter(ds, Clustering.single_block(4)) == (math.inf, None)


def test_strict_comparison_tolerance():
    assert not strictly_greater(1.0, 1.0)
    assert not strictly_greater(1.0 + 1e-12, 1.0)
    assert strictly_greater(1.0 + 1e-6, 1.0)


@st.composite
def embedded_clustering(draw):
    n = draw(st.integers(2, 14))
    k = draw(st.integers(1, n // 2))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, draw(st.integers(1, 4)))) * draw(st.floats(0.01, 1e3))
    labels = rng.permutation(np.concatenate([np.arange(k), np.arange(k), rng.integers(0, k, n - 2 * k)]))
    return Dataset.from_points(pts), Clustering(labels, k)


@settings(max_examples=150, deadline=None)
@given(embedded_clustering())
def test_pairwise_and_centroid_cost_agree(case):
    ds, cl = case
    a, b = cost_q(ds, cl), cost_q_centroid(ds.embedding, cl)
    assert abs(a - b) <= 1e-9 * max(1.0, b)


@settings(max_examples=150, deadline=None)
@given(embedded_clustering())
def test_cost_lower_bound_and_beta_identity(case):
    ds, cl = case
    rep = cost_report(ds, cl)
    s2 = rep.sigma**2
    assert rep.q >= (ds.n - cl.k) * s2 / 2 * (1 - 1e-12)
    assert rep.beta == pytest.approx(2 * (rep.q - (ds.n - cl.k - 1) * s2 / 2), rel=1e-12)
    assert rep.beta > 0


@settings(max_examples=60, deadline=None)
@given(embedded_clustering(), st.floats(0.01, 100))
def test_sigma_scales(case, alpha):
    ds, _ = case
    scaled = Dataset(PseudoDistanceMatrix(ds.n, ds.distances.values * alpha))
    assert scaled.sigma == pytest.approx(alpha * ds.sigma, rel=1e-12)
