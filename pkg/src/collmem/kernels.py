"""Hot loops, each with a numba kernel and a numpy fallback.

Both paths perform the same IEEE operations in the same order, so results
are bit-identical between backends and independent of the worker count.
The public wrappers dispatch on :func:`collmem._jit.use_numba`.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import sparse

from . import _jit
from ._jit import njit, prange


# --- burst indicator -------------------------------------------------------

def _row_thresholds(series, n):
    # exact integer moments, then one fixed float formula shared by both paths
    t = series.shape[1]
    s = series.sum(axis=1)
    q = (series * series).sum(axis=1)
    mu = s / t
    var = np.maximum(q / t - mu * mu, 0.0)
    return mu + n * np.sqrt(var)


@njit(parallel=True, cache=True)
def _burst_mask_nb(series, n):
    rows, t = series.shape
    out = np.zeros((rows, t), dtype=np.bool_)
    for i in prange(rows):
        s = 0
        q = 0
        for k in range(t):
            v = series[i, k]
            s += v
            q += v * v
        mu = s / t
        var = q / t - mu * mu
        if var < 0.0:
            var = 0.0
        thr = mu + n * np.sqrt(var)
        for k in range(t):
            out[i, k] = series[i, k] > thr
    return out


def burst_mask(series, n):
    """Boolean ``(N, T)`` mask of hours above ``mean + n * std`` per row."""
    series = np.ascontiguousarray(series, dtype=np.int64)
    if series.shape[1] == 0:
        return np.zeros(series.shape, dtype=bool)
    if _jit.use_numba():
        return _burst_mask_nb(series, float(n))
    thr = _row_thresholds(series, float(n))
    return series > thr[:, None]


# --- Hebbian co-activation accumulation -----------------------------------

@njit(parallel=True, cache=True)
def _hebbian_nb(series, src, dst, lam):
    n_edges = src.shape[0]
    t_len = series.shape[1]
    w = np.zeros(n_edges, dtype=np.float64)
    for e in prange(n_edges):
        i = src[e]
        j = dst[e]
        acc = 0.0
        for t in range(t_len):
            a = series[i, t]
            b = series[j, t]
            if a == 0 and b == 0:
                continue
            if a < b:
                sim = a / b
            else:
                sim = b / a
            if sim > lam:
                acc += sim
        w[e] = acc
    return w


def _hebbian_np_block(series_t, src, dst, lam, out):
    acc = np.zeros(len(src))
    for col in series_t:
        a = col[src]
        b = col[dst]
        hi = np.maximum(a, b)
        lo = np.minimum(a, b)
        sim = lo / np.where(hi > 0, hi, 1)
        acc += np.where(sim > lam, sim, 0.0)
    out[:] = acc


def hebbian_weights(series, edges, lam, threads=1):
    """Sum of thresholded min/max similarity over hours, one value per edge.

    Accumulation runs in ascending hour order per edge.
    """
    series = np.ascontiguousarray(series, dtype=np.int64)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    src = np.ascontiguousarray(edges[:, 0])
    dst = np.ascontiguousarray(edges[:, 1])
    lam = float(lam)
    if len(src) == 0:
        return np.zeros(0)
    if _jit.use_numba():
        with _jit.numba_threads(threads):
            return _hebbian_nb(series, src, dst, lam)
    series_t = np.ascontiguousarray(series.T)
    out = np.empty(len(src))
    threads = _jit.resolve_threads(threads)
    bounds = np.linspace(0, len(src), threads + 1).astype(np.int64)
    blocks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if len(blocks) == 1:
        _hebbian_np_block(series_t, src, dst, lam, out)
        return out
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        futures = [
            pool.submit(_hebbian_np_block, series_t, src[lo:hi], dst[lo:hi], lam, out[lo:hi])
            for lo, hi in blocks
        ]
        for f in futures:
            f.result()
    return out


# --- synchronous Hopfield update -------------------------------------------

@njit(parallel=True, cache=True)
def _field_nb(indptr, indices, data, p):
    n, t_len = p.shape
    s = np.zeros((n, t_len), dtype=np.float64)
    for i in prange(n):
        for jj in range(indptr[i], indptr[i + 1]):
            j = indices[jj]
            w = data[jj]
            for t in range(t_len):
                s[i, t] += w * p[j, t]
    return s


@njit(parallel=True, cache=True)
def _recall_step_nb(indptr, indices, data, p, theta):
    n, t_len = p.shape
    out = np.empty((n, t_len), dtype=np.int8)
    s = _field_nb(indptr, indices, data, p)
    for i in prange(n):
        for t in range(t_len):
            out[i, t] = 1 if s[i, t] > theta else -1
    return out


def local_field(indptr, indices, data, p):
    """``W @ p`` with neighbor contributions summed in ascending id order."""
    p = np.ascontiguousarray(p, dtype=np.int8)
    if _jit.use_numba():
        return _field_nb(indptr, indices, data, p)
    n = p.shape[0]
    w = sparse.csr_matrix((data, indices, indptr), shape=(n, n))
    # scipy's csr kernel also walks each row in stored order from 0.0
    return np.asarray(w @ p.astype(np.float64))


def recall_step_kernel(indptr, indices, data, p, theta, threads=1):
    p = np.ascontiguousarray(p, dtype=np.int8)
    if _jit.use_numba():
        with _jit.numba_threads(threads):
            return _recall_step_nb(indptr, indices, data, p, float(theta))
    s = local_field(indptr, indices, data, p)
    return np.where(s > theta, 1, -1).astype(np.int8)


# --- Louvain local moving ----------------------------------------------------

def _local_move_py(indptr, indices, data, k, order, comm, resolution, m2, max_passes):
    """Greedy modularity local moves on one aggregation level.

    ``comm`` is updated in place. Returns the number of moves made.
    Ties between equally good target communities go to the lowest id; a
    node leaves its community only for a strictly better gain.
    """
    n = k.shape[0]
    tot = np.zeros(n, dtype=np.float64)
    for i in range(n):
        tot[comm[i]] += k[i]
    link = np.zeros(n, dtype=np.float64)
    seen = np.zeros(n, dtype=np.bool_)
    cand = np.empty(n, dtype=np.int64)
    moves = 0
    for _ in range(max_passes):
        moved = 0
        for pos in range(n):
            i = order[pos]
            ci = comm[i]
            ki = k[i]
            n_cand = 0
            for jj in range(indptr[i], indptr[i + 1]):
                j = indices[jj]
                if j == i:
                    continue
                c = comm[j]
                if not seen[c]:
                    seen[c] = True
                    link[c] = 0.0
                    cand[n_cand] = c
                    n_cand += 1
                link[c] += data[jj]
            tot[ci] -= ki
            own_link = link[ci] if seen[ci] else 0.0
            best_c = ci
            best_gain = own_link - resolution * tot[ci] * ki / m2
            for q in range(n_cand):
                c = cand[q]
                if c == ci:
                    continue
                gain = link[c] - resolution * tot[c] * ki / m2
                if gain > best_gain or (gain == best_gain and best_c != ci and c < best_c):
                    best_gain = gain
                    best_c = c
            for q in range(n_cand):
                seen[cand[q]] = False
            tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                moved += 1
        moves += moved
        if moved == 0:
            break
    return moves


_local_move_nb = njit(cache=True)(_local_move_py)


def local_move(indptr, indices, data, k, order, comm, resolution, m2, max_passes=1000):
    fn = _local_move_nb if _jit.use_numba() else _local_move_py
    return int(
        fn(
            indptr,
            indices,
            np.ascontiguousarray(data, dtype=np.float64),
            np.ascontiguousarray(k, dtype=np.float64),
            np.ascontiguousarray(order, dtype=np.int64),
            comm,
            float(resolution),
            float(m2),
            int(max_passes),
        )
    )
