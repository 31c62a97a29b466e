"""Successive-cancellation decoding in the LLR domain.

Decoders operate on batches of received blocks.  Since the bit-reversal
permutation commutes with the Kronecker power, ``x = (v G^{(x)m}) P_n``: the
received LLRs are permuted once and the usual natural-order recursion on
``G^{(x)m}`` then decides ``v_0, v_1, ...`` in index order.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .llr import f_minus, g_plus
from .transform import bit_reversal_permutation, butterfly, check_length


def _leaf_decision(L, rng: Optional[np.random.Generator]):
    bits = (L < 0).astype(np.uint8)
    tie = ~((L > 0) | (L < 0))  # zero or nan
    if rng is not None:
        draw = rng.integers(0, 2, size=L.shape, dtype=np.uint8)
        bits = np.where(tie, draw, bits)
    else:
        bits[tie] = 0
    return bits


def sc_decode_llr(llr, frozen, frozen_values=None, rng: Optional[np.random.Generator] = None):
    """Decide every ``v_i`` by successive cancellation.

    ``llr`` has shape ``(T, n)`` (channel LLRs in transmission order),
    ``frozen`` is a boolean mask of length ``n``, ``frozen_values`` is either
    ``None`` (zeros), a length-``n`` vector or a ``(T, n)`` array.  Ties
    (LLR 0 or undefined) are broken with ``rng``, one draw per trial at every
    unfrozen index, or set to 0 when ``rng`` is None.
    """
    L = np.atleast_2d(np.asarray(llr, dtype=float))
    T, n = L.shape
    m = check_length(n)
    frozen = np.asarray(frozen, dtype=bool)
    if frozen.shape != (n,):
        raise ValueError("frozen mask has the wrong length")
    if frozen_values is None:
        fv = np.zeros((1, n), dtype=np.uint8)
    else:
        fv = np.atleast_2d(np.asarray(frozen_values, dtype=np.uint8))
        if fv.shape[1] != n or fv.shape[0] not in (1, T):
            raise ValueError("frozen values have the wrong shape")
    fv = np.broadcast_to(fv, (T, n))
    # prefix counts of unfrozen indices make the rate-0 test O(1) per node
    free_prefix = np.concatenate([[0], np.cumsum(~frozen)])
    v = np.zeros((T, n), dtype=np.uint8)
    Lp = L[:, bit_reversal_permutation(m)]

    def rec(Lnode, lo):
        size = Lnode.shape[1]
        if free_prefix[lo + size] == free_prefix[lo]:
            vals = fv[:, lo:lo + size]
            v[:, lo:lo + size] = vals
            return butterfly(vals)
        if size == 1:
            bit = _leaf_decision(Lnode[:, 0], rng)
            v[:, lo] = bit
            return bit[:, None]
        h = size // 2
        left, right = Lnode[:, :h], Lnode[:, h:]
        c1 = rec(f_minus(left, right), lo)
        c2 = rec(g_plus(left, right, c1), lo + h)
        return np.concatenate([c1 ^ c2, c2], axis=1)

    rec(Lp, 0)
    return v


def _bit_loglik(L, bit):
    """``log P(bit | L)`` for an LLR ``L = log P(0)/P(1)``."""
    s = 1.0 - 2.0 * bit.astype(float)
    with np.errstate(invalid="ignore"):
        out = -np.logaddexp(0.0, -s * L)
    return np.where(np.isnan(out), -np.log(2.0), out)


def branching_decode_llr(llr, frozen, branch, limit: int, frozen_values=None,
                         rng: Optional[np.random.Generator] = None):
    """SC decoding that follows both values at every ``branch`` index.

    Up to ``limit`` paths per trial are kept, ranked by the accumulated
    log-likelihood of all decided bits (frozen ones included); the best
    path is returned.  Paths are carried as a second batch axis, so all
    trials advance together.  With no branch indices this makes the same
    decisions and random draws as :func:`sc_decode_llr`.
    """
    if limit < 1:
        raise ValueError("branch limit must be at least 1")
    L = np.atleast_2d(np.asarray(llr, dtype=float))
    T, n = L.shape
    m = check_length(n)
    frozen = np.asarray(frozen, dtype=bool)
    branch = np.zeros(n, dtype=bool) if branch is None else np.asarray(branch, dtype=bool)
    if frozen.shape != (n,) or branch.shape != (n,):
        raise ValueError("index masks have the wrong length")
    if np.any(frozen & branch):
        raise ValueError("an index cannot be both frozen and branched")
    fv = np.zeros((1, n), dtype=np.uint8) if frozen_values is None else \
        np.atleast_2d(np.asarray(frozen_values, dtype=np.uint8))
    fv = np.broadcast_to(fv, (T, n))

    state = {
        "v": np.zeros((T, 1, n), dtype=np.uint8),
        "score": np.zeros((T, 1)),
    }
    rows = np.arange(T)[:, None]

    def leaf(Lleaf, i):
        # Lleaf: (T, P)
        P = Lleaf.shape[1]
        if branch[i]:
            zeros = np.zeros((T, P), dtype=np.uint8)
            bits = np.concatenate([zeros, zeros + 1], axis=1)
            parent = np.tile(np.arange(P), 2)[None, :].repeat(T, axis=0)
            score = state["score"][rows, parent] + _bit_loglik(Lleaf[rows, parent], bits)
            if 2 * P > limit:
                keep = np.argsort(-score, axis=1, kind="stable")[:, :limit]
                parent = np.take_along_axis(parent, keep, axis=1)
                bits = np.take_along_axis(bits, keep, axis=1)
                score = np.take_along_axis(score, keep, axis=1)
        else:
            parent = np.broadcast_to(np.arange(P), (T, P))
            if frozen[i]:
                bits = np.repeat(fv[:, i:i + 1], P, axis=1)
            else:
                bits = _leaf_decision(Lleaf, rng)
            score = state["score"] + _bit_loglik(Lleaf, bits)
        v = state["v"][rows, parent]
        v[:, :, i] = bits
        state["v"] = v
        state["score"] = score
        return bits[:, :, None], parent

    def rec(Lnode, lo):
        # Lnode: (T, P, size)
        size = Lnode.shape[2]
        if size == 1:
            return leaf(Lnode[:, :, 0], lo)
        h = size // 2
        left, right = Lnode[:, :, :h], Lnode[:, :, h:]
        c1, p1 = rec(f_minus(left, right), lo)
        left = left[rows, p1]
        right = right[rows, p1]
        c2, p2 = rec(g_plus(left, right, c1), lo + h)
        c1 = c1[rows, p2]
        return np.concatenate([c1 ^ c2, c2], axis=2), p1[rows, p2]

    Lp = L[:, bit_reversal_permutation(m)][:, None, :]
    rec(Lp, 0)
    best = np.argmax(state["score"], axis=1)
    return state["v"][np.arange(T), best], state["score"]
