"""Numerically stable LLR combine rules shared by the decoders."""

from __future__ import annotations

import numpy as np


def f_minus(a, b):
    """Check-node combine ``2 atanh(tanh(a/2) tanh(b/2))`` without overflow.

    Infinite inputs are allowed; ``inf`` combined with ``-inf`` gives ``-inf``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.sign(a) * np.sign(b)
    mag = np.minimum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", over="ignore"):
        corr = np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    corr = np.where(np.isnan(corr), 0.0, corr)
    out = s * mag + corr
    return np.where(np.isnan(out), 0.0, out)


def g_plus(a, b, u):
    """Variable-node combine ``b + (1 - 2u) a`` given the partial sum ``u``."""
    with np.errstate(invalid="ignore"):
        out = b + (1.0 - 2.0 * np.asarray(u, dtype=float)) * a
    return np.where(np.isnan(out), 0.0, out)
