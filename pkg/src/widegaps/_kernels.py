"""Hot inner loops, each in a numba flavour and a pure-numpy flavour.

The public dispatchers at the bottom pick one flavour according to
:data:`widegaps._accel.USE_NUMBA`. Both flavours perform the same floating
point operations in the same order, so partition scans and refinement
sweeps agree bit for bit; the Jacobi solvers agree to rounding.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

# stored co-optimal candidates per scan; overflow is flagged, never silent
MAX_STORED_TIES = 4096
ABS_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# exhaustive partition scan


@njit
def _tie_tol_nb(q, rel_tol):
    t = rel_tol * abs(q)
    return t if t > ABS_FLOOR else ABS_FLOOR


@njit
def enumerate_optimum_numba(d2, k, rel_tol, max_store):
    """Scan restricted growth strings of n points into exactly ``k`` blocks,
    each of size >= 2, keeping the Q-minimiser and all near ties."""
    n = d2.shape[0]
    labels = np.full(n, -1, np.int64)
    sizes = np.zeros(k, np.int64)
    # prefix block sums: row i holds unordered-pair sums after points 0..i
    pref = np.zeros((n, k))
    cand_labels = np.empty((max_store, n), np.int64)
    cand_q = np.empty(max_store)
    ncand = 0
    best_idx = -1
    overflow = False
    best_q = np.inf
    best_labels = np.zeros(n, np.int64)
    count = 0

    labels[0] = 0
    sizes[0] = 1
    used = 1
    ones = 1
    i = 1
    labels[1] = -1
    while i >= 1:
        b = labels[i]
        if b >= 0:
            sizes[b] -= 1
            if sizes[b] == 0:
                used -= 1
                ones -= 1
            elif sizes[b] == 1:
                ones += 1
        b += 1
        maxb = used if used < k - 1 else k - 1
        remaining = n - i - 1
        chosen = -1
        while b <= maxb:
            if b == used:
                nu = used + 1
                no = ones + 1
            elif sizes[b] == 1:
                nu = used
                no = ones - 1
            else:
                nu = used
                no = ones
            if remaining >= no + 2 * (k - nu):
                chosen = b
                break
            b += 1
        if chosen < 0:
            labels[i] = -1
            i -= 1
            continue

        acc = 0.0
        for l in range(i):
            if labels[l] == b:
                acc += d2[i, l]
        for c in range(k):
            pref[i, c] = pref[i - 1, c]
        pref[i, b] += acc
        if sizes[b] == 0:
            used += 1
            ones += 1
        elif sizes[b] == 1:
            ones -= 1
        sizes[b] += 1
        labels[i] = b

        if i < n - 1:
            i += 1
            labels[i] = -1
            continue

        count += 1
        q = 0.0
        for c in range(k):
            q += pref[i, c] / sizes[c]
        if q <= best_q + _tie_tol_nb(best_q, rel_tol):
            if q < best_q:
                best_q = q
                best_labels[:] = labels
                lim = best_q + _tie_tol_nb(best_q, rel_tol)
                keep = 0
                for j in range(ncand):
                    if cand_q[j] <= lim:
                        cand_q[keep] = cand_q[j]
                        cand_labels[keep, :] = cand_labels[j, :]
                        keep += 1
                ncand = keep
                best_idx = -1
            if ncand < max_store:
                cand_q[ncand] = q
                cand_labels[ncand, :] = labels
                if best_idx < 0 and q == best_q:
                    best_idx = ncand
                ncand += 1
            else:
                overflow = True
    return best_q, best_labels, count, cand_labels[:ncand].copy(), cand_q[:ncand].copy(), best_idx, overflow


def _tie_tol(q, rel_tol):
    return max(rel_tol * abs(q), ABS_FLOOR)


class _ScanState:
    def __init__(self, k, rel_tol, max_store):
        self.k = k
        self.rel_tol = rel_tol
        self.max_store = max_store
        self.best_q = math.inf
        self.best_labels = None
        self.count = 0
        self.cand_labels = []
        self.cand_q = []
        self.best_idx = -1
        self.overflow = False

    def merge(self, labels, q):
        self.count += len(q)
        if not len(q):
            return
        j = int(np.argmin(q))
        if q[j] < self.best_q:
            self.best_q = float(q[j])
            self.best_labels = labels[j].copy()
            lim = self.best_q + _tie_tol(self.best_q, self.rel_tol)
            kept = [(cq, cl) for cq, cl in zip(self.cand_q, self.cand_labels) if cq <= lim]
            self.cand_q = [c[0] for c in kept]
            self.cand_labels = [c[1] for c in kept]
            self.best_idx = -1
        lim = self.best_q + _tie_tol(self.best_q, self.rel_tol)
        for r in np.flatnonzero(q <= lim):
            if len(self.cand_q) >= self.max_store:
                self.overflow = True
                break
            if self.best_idx < 0 and q[r] == self.best_q:
                self.best_idx = len(self.cand_q)
            self.cand_q.append(float(q[r]))
            self.cand_labels.append(labels[r].copy())


def _expand(d2, k, labels, sizes, used, ones, pref, state, chunk):
    n = d2.shape[0]
    depth = labels.shape[1]
    if depth == n:
        q = np.zeros(labels.shape[0])
        for c in range(k):
            q += pref[:, c] / sizes[:, c]
        state.merge(labels, q)
        return
    if labels.shape[0] > chunk:
        for lo in range(0, labels.shape[0], chunk):
            sl = slice(lo, lo + chunk)
            _expand(d2, k, labels[sl], sizes[sl], used[sl], ones[sl], pref[sl], state, chunk)
        return

    i = depth
    remaining = n - i - 1
    bs = np.arange(k)
    maxb = np.minimum(used, k - 1)
    is_new = bs[None, :] == used[:, None]
    nu = used[:, None] + is_new
    no = ones[:, None] + is_new - ((~is_new) & (sizes == 1))
    ok = (bs[None, :] <= maxb[:, None]) & (remaining >= no + 2 * (k - nu))
    r_idx, b_idx = np.nonzero(ok)
    if not len(r_idx):
        return
    new_labels = np.empty((len(r_idx), i + 1), np.int64)
    new_labels[:, :i] = labels[r_idx]
    new_labels[:, i] = b_idx
    acc = np.zeros(len(r_idx))
    for l in range(i):
        acc += np.where(new_labels[:, l] == b_idx, d2[i, l], 0.0)
    new_pref = pref[r_idx].copy()
    new_pref[np.arange(len(r_idx)), b_idx] += acc
    new_sizes = sizes[r_idx].copy()
    new_sizes[np.arange(len(r_idx)), b_idx] += 1
    _expand(
        d2,
        k,
        new_labels,
        new_sizes,
        nu[r_idx, b_idx],
        no[r_idx, b_idx],
        new_pref,
        state,
        chunk,
    )


def enumerate_optimum_numpy(d2, k, rel_tol, max_store, chunk=50_000):
    n = d2.shape[0]
    state = _ScanState(k, rel_tol, max_store)
    labels = np.zeros((1, 1), np.int64)
    sizes = np.zeros((1, k), np.int64)
    sizes[0, 0] = 1
    _expand(
        d2,
        k,
        labels,
        sizes,
        np.ones(1, np.int64),
        np.ones(1, np.int64),
        np.zeros((1, k)),
        state,
        chunk,
    )
    if state.cand_labels:
        cand_labels = np.array(state.cand_labels, np.int64)
    else:
        cand_labels = np.empty((0, n), np.int64)
    best = state.best_labels if state.best_labels is not None else np.zeros(n, np.int64)
    return (
        state.best_q,
        best,
        state.count,
        cand_labels,
        np.array(state.cand_q),
        state.best_idx,
        state.overflow,
    )


# ---------------------------------------------------------------------------
# single-point-move refinement sweep


@njit
def refine_sweep_numba(d2, labels, sizes, R, T, tol):
    """One pass over all points. ``R[i, c]`` is the sum of squared distances
    from i to block c, ``T[c]`` the ordered-pair sum inside c. All arrays
    are updated in place."""
    n = d2.shape[0]
    k = sizes.shape[0]
    moved = 0
    rejected = 0
    for i in range(n):
        a = labels[i]
        sa = sizes[a]
        ta = T[a]
        ta_new = ta - 2.0 * R[i, a]
        leave = ta_new / (2.0 * (sa - 1)) - ta / (2.0 * sa)
        best_b = -1
        best_dq = 0.0
        for b in range(k):
            if b == a:
                continue
            tb_new = T[b] + 2.0 * R[i, b]
            dq = tb_new / (2.0 * (sizes[b] + 1)) - T[b] / (2.0 * sizes[b]) + leave
            if best_b < 0 or dq < best_dq:
                best_b = b
                best_dq = dq
        if best_b < 0 or not (best_dq < -tol):
            continue
        if sa <= 2:
            rejected += 1
            continue
        b = best_b
        T[a] = ta_new
        T[b] = T[b] + 2.0 * R[i, b]
        sizes[a] -= 1
        sizes[b] += 1
        labels[i] = b
        for l in range(n):
            R[l, a] -= d2[i, l]
            R[l, b] += d2[i, l]
        moved += 1
    return moved, rejected


def refine_sweep_numpy(d2, labels, sizes, R, T, tol):
    n = d2.shape[0]
    moved = 0
    rejected = 0
    for i in range(n):
        a = labels[i]
        sa = sizes[a]
        ta = T[a]
        ta_new = ta - 2.0 * R[i, a]
        leave = ta_new / (2.0 * (sa - 1)) - ta / (2.0 * sa)
        dq = (T + 2.0 * R[i]) / (2.0 * (sizes + 1)) - T / (2.0 * sizes) + leave
        dq[a] = np.inf
        b = int(np.argmin(dq))
        if not (dq[b] < -tol):
            continue
        if sa <= 2:
            rejected += 1
            continue
        T[b] = T[b] + 2.0 * R[i, b]
        T[a] = ta_new
        sizes[a] -= 1
        sizes[b] += 1
        labels[i] = b
        R[:, a] -= d2[i]
        R[:, b] += d2[i]
        moved += 1
    return moved, rejected


# ---------------------------------------------------------------------------
# cyclic Jacobi eigenvalues of a symmetric matrix


@njit
def _rotation(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


@njit
def jacobi_eigenvalues_numba(a, rel_tol, max_sweeps):
    A = a.copy()
    n = A.shape[0]
    norm = math.sqrt(np.sum(A * A))
    off = 0.0
    sweeps = 0
    while True:
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += A[p, q] * A[p, q]
        off = math.sqrt(off)
        if off <= rel_tol * norm or sweeps >= max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation(A[p, p], A[q, q], apq)
                for r in range(n):
                    arp = A[r, p]
                    arq = A[r, q]
                    A[r, p] = c * arp - s * arq
                    A[r, q] = s * arp + c * arq
                for r in range(n):
                    apr = A[p, r]
                    aqr = A[q, r]
                    A[p, r] = c * apr - s * aqr
                    A[q, r] = s * apr + c * aqr
                A[p, q] = 0.0
                A[q, p] = 0.0
    return np.diag(A).copy(), sweeps, off / norm if norm > 0 else 0.0


def jacobi_eigenvalues_numpy(a, rel_tol, max_sweeps):
    A = np.array(a, dtype=float, copy=True)
    n = A.shape[0]
    norm = math.sqrt(float(np.sum(A * A)))
    sweeps = 0
    while True:
        offd = A - np.diag(np.diag(A))
        off = math.sqrt(float(np.sum(offd * offd)))
        if off <= rel_tol * norm or sweeps >= max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation_py(A[p, p], A[q, q], apq)
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
    return np.diag(A).copy(), sweeps, off / norm if norm > 0 else 0.0


def _rotation_py(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


# ---------------------------------------------------------------------------
# dispatch

if USE_NUMBA:
    enumerate_optimum = enumerate_optimum_numba
    refine_sweep = refine_sweep_numba
    jacobi_eigenvalues = jacobi_eigenvalues_numba
else:
    enumerate_optimum = enumerate_optimum_numpy
    refine_sweep = refine_sweep_numpy
    jacobi_eigenvalues = jacobi_eigenvalues_numpy
