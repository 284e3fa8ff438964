"""Numba and numpy kernels against each other and against independent references."""
import os
import subprocess
import sys

import numpy as np
import pytest

from widegaps import _kernels
from widegaps._accel import HAS_NUMBA
from widegaps.core import Dataset
from widegaps.transforms import centered_gram

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


def random_d2(n, seed):
    rng = np.random.default_rng(seed)
    return np.ascontiguousarray(Dataset.from_condensed(rng.uniform(0.1, 1.0, n * (n - 1) // 2)).d2)


def set_partitions(items, k):
    """All partitions of ``items`` into exactly k non-empty blocks (recursive, no RGS)."""
    if not items:
        if k == 0:
            yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest, k - 1):
        yield [[first]] + part
    for part in set_partitions(rest, k):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def brute_force(d2, k):
    best, count = np.inf, 0
    for part in set_partitions(list(range(d2.shape[0])), k):
        if min(len(b) for b in part) < 2:
            continue
        count += 1
        q = sum(d2[np.ix_(b, b)].sum() / (2 * len(b)) for b in part)
        best = min(best, q)
    return best, count


@pytest.mark.parametrize("n, k", [(4, 2), (6, 2), (6, 3), (8, 3), (9, 4), (10, 2)])
def test_enumeration_matches_brute_force(n, k):
    d2 = random_d2(n, n * 10 + k)
    q_ref, count_ref = brute_force(d2, k)
    for fn in (_kernels.enumerate_optimum_numpy, _kernels.enumerate_optimum_numba):
        best_q, labels, count, *_ = fn(d2, k, 1e-9, 64)
        assert count == count_ref
        assert best_q == pytest.approx(q_ref, rel=1e-12)
        assert np.bincount(labels, minlength=k).min() >= 2


@needs_numba
@pytest.mark.parametrize("n, k", [(8, 2), (10, 3), (11, 4), (12, 4)])
def test_enumeration_flavours_identical(n, k):
    d2 = random_d2(n, 7 * n + k)
    a = _kernels.enumerate_optimum_numba(d2, k, 1e-9, 64)
    b = _kernels.enumerate_optimum_numpy(d2, k, 1e-9, 64)
    assert a[0] == b[0]
    assert np.array_equal(a[1], b[1])
    assert a[2] == b[2]
    assert a[6] == b[6]


def test_enumeration_reports_all_ties():
    # four mutually equidistant points: all three pairings are co-optimal
    d2 = np.ones((4, 4)) - np.eye(4)
    best_q, labels, count, cand, cand_q, best_idx, overflow = _kernels.enumerate_optimum(d2, 2, 1e-9, 64)
    assert count == 3 and len(cand) == 3 and not overflow
    assert labels.tolist() == [0, 0, 1, 1]


def test_enumeration_overflow_flag():
    d2 = np.ones((8, 8)) - np.eye(8)
    *_, overflow = _kernels.enumerate_optimum(d2, 2, 1e-9, 5)
    assert overflow


def _refine_state(d2, labels, k):
    sizes = np.bincount(labels, minlength=k).astype(np.int64)
    R = np.stack([d2[:, labels == c].sum(axis=1) for c in range(k)], axis=1)
    T = np.array([R[labels == c, c].sum() for c in range(k)])
    return labels.copy(), sizes, np.ascontiguousarray(R), T


@needs_numba
@pytest.mark.parametrize("seed", range(6))
def test_refine_sweep_flavours_identical(seed):
    rng = np.random.default_rng(seed)
    n, k = 30, 4
    d2 = random_d2(n, seed)
    labels = rng.permutation(np.arange(n) % k).astype(np.int64)
    a = _refine_state(d2, labels, k)
    b = _refine_state(d2, labels, k)
    for _ in range(5):
        ra = _kernels.refine_sweep_numba(d2, *a, 1e-12)
        rb = _kernels.refine_sweep_numpy(d2, *b, 1e-12)
        assert ra == rb
        for x, y in zip(a, b):
            assert np.array_equal(x, y)


def test_refine_sweep_keeps_running_sums_exact():
    rng = np.random.default_rng(3)
    n, k = 25, 3
    d2 = random_d2(n, 3)
    labels, sizes, R, T = _refine_state(d2, rng.permutation(np.arange(n) % k).astype(np.int64), k)
    _kernels.refine_sweep(d2, labels, sizes, R, T, 1e-12)
    _, sizes2, R2, T2 = _refine_state(d2, labels, k)
    assert np.array_equal(sizes, sizes2)
    assert np.allclose(R, R2, rtol=1e-12) and np.allclose(T, T2, rtol=1e-12)
    assert sizes.min() >= 2


@pytest.mark.parametrize("n", [2, 3, 7, 20, 45])
def test_jacobi_matches_lapack(n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=(n, n))
    a = np.ascontiguousarray(a + a.T)
    ref = np.linalg.eigvalsh(a)
    for fn in (_kernels.jacobi_eigenvalues_numpy, _kernels.jacobi_eigenvalues_numba):
        vals, sweeps, off = fn(a.copy(), 1e-12, 100)
        assert np.allclose(np.sort(vals), ref, atol=1e-10 * np.abs(ref).max())
        assert off <= 1e-12


def test_jacobi_on_centered_gram_of_pseudo_distances():
    ds = Dataset.from_condensed(np.random.default_rng(5).uniform(0.1, 1, 15 * 14 // 2))
    B = np.ascontiguousarray(centered_gram(ds))
    vals, _, _ = _kernels.jacobi_eigenvalues(B.copy(), 1e-12, 100)
    assert np.sort(vals)[0] == pytest.approx(np.linalg.eigvalsh(B)[0], abs=1e-12 * np.linalg.norm(B))


def test_fallback_flag_selects_numpy():
    code = "import widegaps; print(widegaps.backend())"
    env = dict(os.environ, WIDEGAPS_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_fallback_path_gives_same_results():
    code = (
        "import numpy as np, widegaps as w\n"
        "ds = w.Dataset.from_points(np.random.default_rng(4).normal(size=(11, 2)))\n"
        "r = w.exhaustive_optimum(ds, 3)\n"
        "g = w.discover_range(ds, 3, 'residual', 1)\n"
        "print(repr(r.best_q), r.best_clustering.labels.tolist(), g.k, g.clustering.labels.tolist())\n"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, WIDEGAPS_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        outs.append(res.stdout)
    assert outs[0] == outs[1]
