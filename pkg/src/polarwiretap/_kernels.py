"""Compiled inner loops for output-alphabet quantization and GF(2) rank."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _bracket(p, grid_p):
    # largest k with grid_p[k] >= p; grid_p decreases from 1/2 to 0
    K = grid_p.shape[0]
    if p <= 0.0:
        return K - 1
    lo = 0
    hi = K - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if grid_p[mid] >= p:
            lo = mid
        else:
            hi = mid
    return lo


@njit(cache=True, inline="always")
def _deposit(x, y, grid_p, degrade, out_a, out_b):
    big = x if x >= y else y
    small = y if x >= y else x
    t = big + small
    if t <= 0.0:
        return
    p = small / t
    k = _bracket(p, grid_p)
    if degrade:
        out_a[k] += big
        out_b[k] += small
        return
    K = grid_p.shape[0]
    if k == K - 1:
        out_a[k] += t
        return
    p_lo = grid_p[k]
    p_hi = grid_p[k + 1]
    w = (p_lo - p) / (p_lo - p_hi)
    if w < 0.0:
        w = 0.0
    elif w > 1.0:
        w = 1.0
    # mass moved to a grid point takes that point's posterior
    m0 = t * (1.0 - w)
    m1 = t * w
    out_a[k] += m0 * (1.0 - p_lo)
    out_b[k] += m0 * p_lo
    out_a[k + 1] += m1 * (1.0 - p_hi)
    out_b[k + 1] += m1 * p_hi


@njit(cache=True)
def quantize_row(A, B, grid_p, degrade, out_a, out_b):
    for j in range(A.shape[0]):
        _deposit(A[j], B[j], grid_p, degrade, out_a, out_b)


@njit(cache=True)
def split_level(a, b, grid_p, degrade, out_a, out_b):
    """Minus/plus transform of every row followed by quantization.

    Row ``r`` of the input yields rows ``2r`` (minus) and ``2r+1`` (plus).
    Every product pair is symmetric in ``(j, k)`` up to swapping its two
    entries, so only ``k >= j`` is visited with doubled off-diagonal mass.
    """
    R, K = a.shape
    for r in range(R):
        am = out_a[2 * r]
        bm = out_b[2 * r]
        ap = out_a[2 * r + 1]
        bp = out_b[2 * r + 1]
        for j in range(K):
            aj = a[r, j]
            bj = b[r, j]
            if aj + bj <= 0.0:
                continue
            for k in range(j, K):
                ak = a[r, k]
                bk = b[r, k]
                if ak + bk <= 0.0:
                    continue
                s = 1.0 if k == j else 2.0
                _deposit(s * (aj * ak + bj * bk), s * (aj * bk + bj * ak), grid_p, degrade, am, bm)
                _deposit(s * aj * ak, s * bj * bk, grid_p, degrade, ap, bp)
                _deposit(s * aj * bk, s * bj * ak, grid_p, degrade, ap, bp)


@njit(cache=True, inline="always")
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def gf2_rank_selected(cols, sel, max_rank):
    """Rank of the packed column vectors ``cols[j]`` with ``sel[j]`` true.

    ``cols`` is ``(n, W)`` uint64; each vector is reduced against a basis
    keyed by its lowest set bit.  Stops early once ``max_rank`` is reached.
    """
    n, W = cols.shape
    nbits = W * 64
    basis = np.zeros((nbits, W), dtype=np.uint64)
    has = np.zeros(nbits, dtype=np.bool_)
    v = np.zeros(W, dtype=np.uint64)
    one = np.uint64(1)
    rank = 0
    for j in range(n):
        if not sel[j]:
            continue
        for w in range(W):
            v[w] = cols[j, w]
        for w in range(W):
            inserted = False
            while v[w] != 0:
                x = v[w]
                low = x & (~x + one)
                p = w * 64 + _popcount64(low - one)
                if has[p]:
                    for t in range(w, W):
                        v[t] ^= basis[p, t]
                else:
                    for t in range(W):
                        basis[p, t] = v[t]
                    has[p] = True
                    rank += 1
                    inserted = True
                    break
            if inserted:
                break
        if rank >= max_rank:
            break
    return rank


@njit(cache=True)
def rank_gap_patterns(cols_full, full_rows, cols_sub, sub_rows, patterns):
    """Per pattern ``rank(full rows on S) - rank(sub rows on S)``; ``patterns`` is ``(P, n)`` bool.

    ``full_rows < 0`` means the full row set is all of ``[n]``, so the first
    rank equals ``|S|``.
    """
    P = patterns.shape[0]
    out = np.zeros(P, dtype=np.int64)
    for i in range(P):
        sel = patterns[i]
        if full_rows < 0:
            r1 = 0
            for j in range(sel.shape[0]):
                if sel[j]:
                    r1 += 1
        else:
            r1 = gf2_rank_selected(cols_full, sel, full_rows)
        r2 = gf2_rank_selected(cols_sub, sel, sub_rows) if sub_rows > 0 else 0
        out[i] = r1 - r2
    return out
