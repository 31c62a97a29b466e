"""Arikan polar transform ``G_n = P_n G^{(x)m}`` over GF(2).

Indices are 0-based throughout the library; reports and files convert to
1-based at the boundary.  The bit-reversal permutation is applied on the
input side (``x = (v P_n) G^{(x)m}``), which commutes with the Kronecker
power, so ``x = (v G^{(x)m}) P_n`` as well.
"""

from __future__ import annotations

import numpy as np

DENSE_MAX_M = 12


def check_length(n: int) -> int:
    """Return ``m`` with ``n == 2**m`` or raise ``ValueError``."""
    n = int(n)
    if n < 1 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    return n.bit_length() - 1


def bit_reversal_permutation(m: int) -> np.ndarray:
    """Permutation ``sigma`` of ``range(2**m)`` reversing the m-bit binary index."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    n = 1 << m
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(m):
        rev |= ((idx >> b) & 1) << (m - 1 - b)
    return rev


def butterfly(u: np.ndarray) -> np.ndarray:
    """Multiply by ``G^{(x)m}`` along the last axis (no permutation).

    Works on any leading batch shape; returns a new uint8 array.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    m = check_length(n)
    lead = x.shape[:-1]
    for s in range(m):
        h = 1 << s
        y = x.reshape(lead + (n // (2 * h), 2, h))
        y[..., 0, :] ^= y[..., 1, :]
    return x


def polar_encode(v) -> np.ndarray:
    """Return ``x = v G_n`` along the last axis, O(n log n).

    ``v`` may be a single vector or a batch ``(..., n)`` of 0/1 values.
    """
    v = np.asarray(v)
    if v.ndim == 0:
        raise ValueError("expected a bit vector")
    if v.size and (v.min() < 0 or v.max() > 1):
        raise ValueError("bit vectors must contain only 0 and 1")
    m = check_length(v.shape[-1])
    return butterfly(v[..., bit_reversal_permutation(m)])


def kronecker_power(m: int) -> np.ndarray:
    g = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    out = np.ones((1, 1), dtype=np.uint8)
    for _ in range(m):
        out = np.kron(out, g)
    return out


def polar_transform_matrix(m: int) -> np.ndarray:
    """Dense ``G_n = P_n G^{(x)m}`` as a uint8 matrix (``m <= 12``)."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m > DENSE_MAX_M:
        raise ValueError(f"dense transform limited to m <= {DENSE_MAX_M}")
    # row i of P_n G^{(x)m} is row sigma(i) of the Kronecker power
    return kronecker_power(m)[bit_reversal_permutation(m)]


def gf2_matmul(v, mat) -> np.ndarray:
    """Plain GF(2) product ``v @ mat``; used as a test oracle."""
    return (np.asarray(v, dtype=np.int64) @ np.asarray(mat, dtype=np.int64)) % 2
