"""Compiled inner loops.

All kernels take 0-based rank arrays (a permutation of ``0..n-1``) and use
int64 accumulators. Callers are responsible for checking that results fit;
see ``cornertree.fits_int64``.

Edge label codes: 0=NE, 1=NW, 2=SE, 3=SW.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _fen_prefix(fen, pos):
    # sum of entries at 1-based positions 1..pos
    s = 0
    while pos > 0:
        s += fen[pos]
        pos -= pos & -pos
    return s


@njit(cache=True, nogil=True)
def _fen_add(fen, pos, n, val):
    while pos <= n:
        fen[pos] += val
        pos += pos & -pos


@njit(cache=True, nogil=True)
def _count_one_tree(r, parents, labels, v, A, B, fen):
    n = r.size
    for u in range(v):
        for i in range(n):
            A[u, i] = 1
    for u in range(v - 1):
        lab = labels[u]
        later = lab == 0 or lab == 2
        larger = lab == 0 or lab == 1
        for p in range(n + 1):
            fen[p] = 0
        total = 0
        for step in range(n):
            i = n - 1 - step if later else step
            val = r[i]
            below = _fen_prefix(fen, val)
            B[i] = total - below if larger else below
            a = A[u, i]
            if a != 0:
                _fen_add(fen, val + 1, n, a)
                total += a
        par = parents[u]
        for i in range(n):
            A[par, i] *= B[i]
    s = 0
    for i in range(n):
        s += A[v - 1, i]
    return s


@njit(cache=True, nogil=True)
def count_trees(r, parents, labels, offsets):
    """Embedding counts of a batch of corner trees.

    Tree ``t`` occupies ``parents[offsets[t]:offsets[t+1]]``; vertices are in
    post-order (children before parents, root last) and parent indices are
    local to the tree.
    """
    n = r.size
    ntrees = offsets.size - 1
    vmax = 1
    for t in range(ntrees):
        vmax = max(vmax, offsets[t + 1] - offsets[t])
    A = np.empty((vmax, n), dtype=np.int64)
    B = np.empty(n, dtype=np.int64)
    fen = np.zeros(n + 1, dtype=np.int64)
    out = np.zeros(ntrees, dtype=np.int64)
    for t in range(ntrees):
        lo = offsets[t]
        hi = offsets[t + 1]
        out[t] = _count_one_tree(r, parents[lo:hi], labels[lo:hi], hi - lo, A, B, fen)
    return out


@njit(cache=True, nogil=True)
def _count_3214_into(r, L, fen):
    n = r.size
    total = 0
    for m in range(3, n):
        xm = r[m]
        for p in range(n + 1):
            fen[p] = 0
        cnt = 0
        for j in range(m):
            x = r[j]
            if x < xm:
                # earlier, in-range and larger than x
                L[j] = cnt - _fen_prefix(fen, x + 1)
                _fen_add(fen, x + 1, n, 1)
                cnt += 1
        for p in range(n + 1):
            fen[p] = 0
        for j in range(m - 1, -1, -1):
            x = r[j]
            if x < xm:
                total += L[j] * _fen_prefix(fen, x)
                _fen_add(fen, x + 1, n, 1)
    return total


@njit(cache=True, nogil=True)
def count_3214(r):
    """Occurrences of the pattern 3214 in O(n^2 log n)."""
    n = r.size
    L = np.zeros(n, dtype=np.int64)
    fen = np.zeros(n + 1, dtype=np.int64)
    return _count_3214_into(r, L, fen)


@njit(cache=True, nogil=True)
def _local_ranks(x, out):
    order = np.argsort(x, kind="mergesort")
    for i in range(order.size):
        out[order[i]] = i


@njit(cache=True, nogil=True)
def window_tree_counts(r, width, stride, parents, labels, offsets, with_3214):
    """Tree counts (and optionally 3214 counts) for every sliding window."""
    n = r.size
    nw = (n - width) // stride + 1
    ntrees = offsets.size - 1
    vmax = 1
    for t in range(ntrees):
        vmax = max(vmax, offsets[t + 1] - offsets[t])
    A = np.empty((vmax, width), dtype=np.int64)
    B = np.empty(width, dtype=np.int64)
    fen = np.zeros(width + 1, dtype=np.int64)
    L = np.zeros(width, dtype=np.int64)
    loc = np.empty(width, dtype=np.int64)
    out = np.zeros((nw, ntrees), dtype=np.int64)
    out3214 = np.zeros(nw, dtype=np.int64)
    for wi in range(nw):
        start = wi * stride
        _local_ranks(r[start:start + width], loc)
        for t in range(ntrees):
            lo = offsets[t]
            hi = offsets[t + 1]
            out[wi, t] = _count_one_tree(loc, parents[lo:hi], labels[lo:hi], hi - lo, A, B, fen)
        if with_3214:
            out3214[wi] = _count_3214_into(loc, L, fen)
    return out, out3214


@njit(cache=True, nogil=True)
def profile_by_last(r, k, code_table, nfact):
    """Pattern counts split by the last index of each tuple.

    Tuples are enumerated depth first; the pattern is built incrementally by
    appending, at depth ``d``, the number of earlier entries smaller than the
    new one (an insertion code), so every prefix is standardized once and
    shared by all its extensions. ``code_table`` maps insertion codes to
    Lehmer ranks.
    """
    n = r.size
    out = np.zeros((n, nfact), dtype=np.int64)
    if n < k:
        return out
    idx = np.empty(k, dtype=np.int64)
    code = np.zeros(k + 1, dtype=np.int64)
    d = 0
    idx[0] = -1
    while d >= 0:
        idx[d] += 1
        if idx[d] > n - (k - d):
            d -= 1
            continue
        x = r[idx[d]]
        c = 0
        for e in range(d):
            if r[idx[e]] < x:
                c += 1
        cd = code[d] * (d + 1) + c
        if d == k - 1:
            out[idx[d], code_table[cd]] += 1
        else:
            code[d + 1] = cd
            d += 1
            idx[d] = idx[d - 1]
    return out


@njit(cache=True, nogil=True)
def entropy_rows(counts):
    """Shannon entropy (nats) of each row of non-negative weights.

    Rows summing to zero yield NaN.
    """
    m, k = counts.shape
    out = np.empty(m, dtype=np.float64)
    for i in range(m):
        tot = 0.0
        for j in range(k):
            tot += counts[i, j]
        if tot <= 0.0:
            out[i] = np.nan
            continue
        h = 0.0
        for j in range(k):
            c = counts[i, j]
            if c > 0.0:
                p = c / tot
                h -= p * math.log(p)
        out[i] = h
    return out
