"""Bit-channel evaluation and polarization index sets.

Bhattacharyya parameters are carried as log2 values so that thresholds like
``2**-n**beta / n`` stay representable at large ``n``; capacities are plain
doubles.  Bit-channel ``i`` (0-based) is obtained from the base channel by
applying the split transforms in the order of the binary digits of ``i``,
most significant first (0 = "minus"/check combine, 1 = "plus"/variable
combine).  This is the ordering seen by successive cancellation on
``G_n = P_n G^{(x)m}``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Optional

import numpy as np

from .channel import (
    ChannelParams,
    DiscreteChannel,
    NotSymmetricError,
    all_bit_vectors,
    bhattacharyya,
    capacity,
    channel_from_config,
    is_symmetric,
    pair_representation,
    product_channel_table,
)
from .llr import f_minus
from ._kernels import quantize_row, split_level
from .transform import check_length, polar_encode

LN2 = math.log(2.0)
ROUNDING_SLACK = 1e-12  # relative widening of quantized bounds
METHODS = ("bec-exact", "de-bounds", "monte-carlo", "brute-force")
BRUTE_FORCE_MAX_N = 8


@dataclass(frozen=True, eq=False)
class BitChannelStats:
    """Per-index certified intervals for ``Z(W_i)`` (log2) and ``C(W_i)``."""

    n: int
    method: str
    z_lo_log2: np.ndarray
    z_hi_log2: np.ndarray
    c_lo: np.ndarray
    c_hi: np.ndarray
    base_capacity: float
    channel: Optional[dict] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        check_length(self.n)
        for name in ("z_lo_log2", "z_hi_log2", "c_lo", "c_hi"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (self.n,):
                raise ValueError(f"{name} must have length {self.n}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.z_lo_log2 > self.z_hi_log2 + 1e-9) or np.any(self.c_lo > self.c_hi + 1e-9):
            raise ValueError("lower bounds exceed upper bounds")

    @property
    def m(self) -> int:
        return check_length(self.n)

    @property
    def z_lo(self) -> np.ndarray:
        return np.exp2(self.z_lo_log2)

    @property
    def z_hi(self) -> np.ndarray:
        return np.exp2(self.z_hi_log2)

    @property
    def exact(self) -> bool:
        return self.method in ("bec-exact", "brute-force")

    def to_dict(self) -> dict:
        def enc(x):
            return None if not np.isfinite(x) else float(x)

        records = [
            {"i": i + 1, "z_lo": enc(self.z_lo_log2[i]), "z_hi": enc(self.z_hi_log2[i]),
             "c_lo": float(self.c_lo[i]), "c_hi": float(self.c_hi[i])}
            for i in range(self.n)
        ]
        return {"n": self.n, "method": self.method, "base_capacity": self.base_capacity,
                "channel": self.channel, "meta": self.meta, "z_units": "log2",
                "records": records}

    @classmethod
    def from_dict(cls, d: dict) -> "BitChannelStats":
        recs = sorted(d["records"], key=lambda r: r["i"])

        def dec(x):
            return -np.inf if x is None else float(x)

        return cls(
            n=int(d["n"]), method=d["method"],
            z_lo_log2=np.array([dec(r["z_lo"]) for r in recs]),
            z_hi_log2=np.array([dec(r["z_hi"]) for r in recs]),
            c_lo=np.array([r["c_lo"] for r in recs]),
            c_hi=np.array([r["c_hi"] for r in recs]),
            base_capacity=float(d["base_capacity"]),
            channel=d.get("channel"), meta=d.get("meta") or {},
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "BitChannelStats":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# small numerics


def log2_one_minus(x_log2):
    """``log2(1 - 2**x)`` accurate for ``x`` near 0 and very negative."""
    x = np.asarray(x_log2, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(-np.expm1(x * LN2)) / LN2


def one_minus_h2_centered(d):
    """``1 - h2(1/2 - d)`` for ``0 <= d <= 1/2`` without cancellation near ``d = 0``."""
    d = np.abs(np.asarray(d, dtype=float))
    s = 2.0 * d
    out = np.empty_like(s)
    small = s < 0.05
    ss = s[small] ** 2
    # (1/ln2) * sum_k s^(2k) / (2k (2k-1))
    acc = np.zeros_like(ss)
    term = np.ones_like(ss)
    for k in range(1, 12):
        term = term * ss if k > 1 else ss.copy()
        acc += term / (2 * k * (2 * k - 1))
    out[small] = acc / LN2
    big = ~small
    sb = s[big]
    with np.errstate(divide="ignore", invalid="ignore"):
        v = 0.5 * ((1 + sb) * np.log1p(sb) + (1 - sb) * np.log1p(-sb)) / LN2
    v = np.where(sb >= 1.0, 1.0, v)
    out[big] = v
    return out


def pair_measures(a: np.ndarray, b: np.ndarray):
    """Bhattacharyya (log2) and capacity of pair-represented channels along the last axis."""
    t = a + b
    sa, sb = np.sqrt(a), np.sqrt(b)
    z = np.sum(2.0 * sa * sb, axis=-1)
    zc = np.sum((sa - sb) ** 2, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(t > 0, np.abs(a - b) / (2.0 * t), 0.0)
    cap = np.sum(t * one_minus_h2_centered(d), axis=-1)
    with np.errstate(divide="ignore"):
        zlog = np.where(zc < 0.25, np.log1p(-np.minimum(zc, 0.999)) / LN2, np.log2(z))
    return zlog, np.clip(cap, 0.0, 1.0)


# ---------------------------------------------------------------------------
# exact BEC recursion


def bec_evolve(eps: float, m: int) -> BitChannelStats:
    """Exact bit-channel erasure probabilities of BEC(eps), ``n = 2**m``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("erasure probability must lie in [0, 1]")
    if m < 0:
        raise ValueError("m must be nonnegative")
    with np.errstate(divide="ignore"):
        zl = np.array([math.log2(eps) if eps > 0 else -np.inf])
    c = np.array([1.0 - eps])
    for _ in range(m):
        with np.errstate(divide="ignore", invalid="ignore"):
            # 2 - z computed through 1 - z = c to keep precision near z = 1
            z_minus = zl + np.log1p(c) / LN2
            z_minus = np.where(np.isneginf(zl), -np.inf, z_minus)
        z_plus = 2.0 * zl
        c_minus = c * c
        c_plus = c * (2.0 - c)
        zl = np.stack([z_minus, z_plus], axis=1).reshape(-1)
        c = np.stack([c_minus, c_plus], axis=1).reshape(-1)
        # Z = 1 - C exactly on erasure channels; log1p is the precise form for small C
        near_useless = c < 0.5
        zl[near_useless] = np.log1p(-c[near_useless]) / LN2
    return BitChannelStats(
        n=1 << m, method="bec-exact", z_lo_log2=zl, z_hi_log2=zl.copy(),
        c_lo=c, c_hi=c.copy(), base_capacity=1.0 - eps,
        channel=ChannelParams("bec", eps=float(eps)).to_config(),
    )


# ---------------------------------------------------------------------------
# brute force by direct summation


def _combined_table(W: DiscreteChannel, n: int) -> np.ndarray:
    """``W~(y|v) = W^n(y|v G_n)`` with rows indexed by ``v`` (first bit most significant)."""
    V = all_bit_vectors(n)
    return product_channel_table(W, polar_encode(V))


def _bitchannel_from_table(P: np.ndarray, n: int, i: int) -> DiscreteChannel:
    nz = P.shape[1]
    T = P.reshape((2,) * n + (nz,))
    if i + 1 < n:
        T = T.sum(axis=tuple(range(i + 1, n)))
    T = np.moveaxis(T, i, 0).reshape(2, -1) / 2.0 ** (n - 1)
    return DiscreteChannel(T)


def brute_force_bitchannel(W: DiscreteChannel, n: int, i: int) -> DiscreteChannel:
    """Explicit bit-channel ``W_i`` (0-based ``i``) with outputs ``(y, v_0..v_{i-1})``.

    Output columns enumerate the previous bits (most significant first) and
    then ``y`` in mixed radix.
    """
    check_length(n)
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}")
    if not 0 <= i < n:
        raise ValueError(f"index {i} outside [0, {n})")
    if (2 ** n) * W.n_outputs ** n > 1 << 26:
        raise ValueError("brute-force table too large")
    return _bitchannel_from_table(_combined_table(W, n), n, i)


def brute_force_stats(W: DiscreteChannel, n: int) -> BitChannelStats:
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}")
    P = _combined_table(W, n)
    z = np.empty(n)
    c = np.empty(n)
    for i in range(n):
        Wi = _bitchannel_from_table(P, n, i)
        z[i] = bhattacharyya(Wi)
        c[i] = capacity(Wi)
    with np.errstate(divide="ignore"):
        zl = np.log2(np.clip(z, 0.0, 1.0))
    c = np.clip(c, 0.0, 1.0)
    return BitChannelStats(n=n, method="brute-force", z_lo_log2=zl, z_hi_log2=zl.copy(),
                           c_lo=c, c_hi=c.copy(), base_capacity=capacity(W),
                           channel=W.to_config())


# ---------------------------------------------------------------------------
# certified bounds by output-alphabet quantization


@dataclass(frozen=True)
class QuantizationConfig:
    """``mu`` bounds the retained output alphabet (``mu // 2`` conjugate pairs).

    The finite grid LLRs are ``0`` plus a log-spaced ladder from ``llr_min``
    to ``llr_max`` whose density is raised by ``mid_weight`` inside
    ``[mid_lo, mid_hi]``; the last grid point is ``+inf``.
    """

    mu: int = 128
    mode: str = "both"  # "degrading" | "upgrading" | "both"
    llr_min: float = 1e-7
    llr_max: float = 700.0
    mid_lo: float = 0.25
    mid_hi: float = 40.0
    mid_weight: float = 3.0

    def __post_init__(self):
        if self.mu < 4:
            raise ValueError("mu must be at least 4 (two conjugate pairs)")
        if self.mode not in ("degrading", "upgrading", "both"):
            raise ValueError(f"unknown quantization mode {self.mode!r}")
        if not 0 < self.llr_min <= self.mid_lo < self.mid_hi <= self.llr_max:
            raise ValueError("need 0 < llr_min <= mid_lo < mid_hi <= llr_max")
        if self.mid_weight < 1:
            raise ValueError("mid_weight must be at least 1")

    @property
    def pairs(self) -> int:
        return self.mu // 2

    def grid_llrs(self) -> np.ndarray:
        """Finite grid LLRs, increasing from 0 (the ``+inf`` point is implicit)."""
        count = self.pairs - 2
        if count <= 0:
            return np.zeros(1)
        if count == 1:
            return np.array([0.0, math.sqrt(self.mid_lo * self.mid_hi)])
        # piecewise-linear density in log(llr)
        knots = np.log([self.llr_min, self.mid_lo, self.mid_hi, self.llr_max])
        widths = np.diff(knots) * np.array([1.0, self.mid_weight, 1.0])
        cum = np.concatenate([[0.0], np.cumsum(widths)])
        u = np.linspace(0.0, cum[-1], count)
        return np.concatenate([[0.0], np.exp(np.interp(u, cum, knots))])

    def grid_posteriors(self) -> np.ndarray:
        """Posterior ``p = 1/(1+e^llr)`` at each grid point, decreasing from 1/2 to 0."""
        return np.concatenate([1.0 / (1.0 + np.exp(self.grid_llrs())), [0.0]])


def _quantize(A, B, grid_p: np.ndarray, degrade: bool):
    """Reduce each row of pairs ``(A, B)`` to ``len(grid_p)`` pairs."""
    A = np.ascontiguousarray(A, dtype=float)
    B = np.ascontiguousarray(B, dtype=float)
    R = A.shape[0]
    K = grid_p.size
    out_a = np.zeros((R, K))
    out_b = np.zeros((R, K))
    for r in range(R):
        quantize_row(A[r], B[r], grid_p, degrade, out_a[r], out_b[r])
    return out_a, out_b


def _evolve_quantized(a0, b0, m, q: QuantizationConfig, degrade: bool):
    """Run the split recursion on a quantized channel; returns per-index (z_log2, c)."""
    grid_p = q.grid_posteriors()
    K = grid_p.size
    if a0.size > K:
        a, b = _quantize(a0[None, :], b0[None, :], grid_p, degrade)
    else:
        a = np.zeros((1, a0.size))
        b = np.zeros((1, a0.size))
        a[0], b[0] = a0, b0
    zlog, cap = pair_measures(a, b)
    for _level in range(m):
        na = np.zeros((2 * a.shape[0], K))
        nb = np.zeros((2 * a.shape[0], K))
        split_level(a, b, grid_p, degrade, na, nb)
        # each row is a probability distribution; stop rounding drift from compounding
        mass = na.sum(axis=1, keepdims=True) + nb.sum(axis=1, keepdims=True)
        a, b = na / mass, nb / mass
        zl, cp = pair_measures(a, b)
        zlog, cap = _tighten(zlog, cap, zl, cp, degrade)
    return zlog, cap


def _children_bounds(parent_z, parent_c, upper: bool):
    """Bhattacharyya/capacity recursion bounds for the (minus, plus) children."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if upper:
            # Z(2 - Z) = 1 - (1 - Z)^2; the second form avoids cancellation near Z = 1
            one_minus = -np.expm1(parent_z * LN2)
            near_one = np.log1p(-one_minus * one_minus) / LN2
            zm = np.where(parent_z > -1.0, near_one,
                          parent_z + np.log2(2.0 - np.exp2(parent_z)))
            zm = np.where(np.isneginf(parent_z), -np.inf, zm)
        else:
            zm = parent_z.copy()
    zp = 2.0 * parent_z
    return zm, zp


def _tighten(parent_z, parent_c, z_child, c_child, degrade: bool):
    """Combine quantized-channel values with parent recursion bounds.

    For the degraded branch ``z`` is an upper bound and ``c`` a lower bound;
    for the upgraded branch the reverse.
    """
    zm, zp = _children_bounds(parent_z, parent_c, upper=degrade)
    rec_z = np.stack([zm, zp], axis=1).reshape(-1)
    pc = np.repeat(parent_c, 2)
    is_plus = np.tile([False, True], parent_c.size)
    if degrade:
        z = np.minimum(z_child, rec_z)
        # C(W-) <= C(W) <= C(W+): a lower bound carries over to the plus child
        c = np.where(is_plus, np.maximum(c_child, pc), c_child)
    else:
        z = np.maximum(z_child, rec_z)
        c = np.where(is_plus, c_child, np.minimum(c_child, pc))
    return z, c


def de_bounds(W: DiscreteChannel, m: int, q: Optional[QuantizationConfig] = None) -> BitChannelStats:
    """Certified per-index intervals from degraded and upgraded quantized evolutions."""
    q = q or QuantizationConfig()
    if not W.is_binary() or not is_symmetric(W):
        raise NotSymmetricError("de_bounds needs a binary-input symmetric channel")
    a0, b0 = pair_representation(W)
    z_hi = c_lo = z_lo = c_hi = None
    if q.mode in ("degrading", "both"):
        z_hi, c_lo = _evolve_quantized(a0, b0, m, q, degrade=True)
    if q.mode in ("upgrading", "both"):
        z_lo, c_hi = _evolve_quantized(a0, b0, m, q, degrade=False)
    n = 1 << m
    if z_hi is None:
        z_hi, c_lo = np.zeros(n), np.zeros(n)
    if z_lo is None:
        z_lo, c_hi = np.full(n, -np.inf), np.ones(n)
    # cross-relations valid for any BMS channel:
    # C >= log2(2/(1+Z)) and C <= sqrt(1 - Z^2)
    c_lo = np.maximum(c_lo, 1.0 - np.log2(1.0 + np.exp2(z_hi)))
    with np.errstate(invalid="ignore"):
        one_minus_z = -np.expm1(z_lo * LN2)
        c_hi = np.minimum(c_hi, np.sqrt(np.clip(one_minus_z * (1.0 + np.exp2(z_lo)), 0.0, 1.0)))
    # widen outward to absorb floating-point rounding in the quantized sums
    z_hi = np.minimum(z_hi * (1.0 - ROUNDING_SLACK), 0.0)
    z_lo = np.minimum(z_lo * (1.0 + ROUNDING_SLACK), z_hi)
    c_hi = c_hi * (1.0 + ROUNDING_SLACK)
    c_lo = np.minimum(c_lo * (1.0 - ROUNDING_SLACK), c_hi)
    return BitChannelStats(
        n=n, method="de-bounds", z_lo_log2=z_lo, z_hi_log2=z_hi,
        c_lo=np.clip(c_lo, 0, 1), c_hi=np.clip(c_hi, 0, 1), base_capacity=capacity(W),
        channel=W.to_config(), meta={"mu": q.mu, "mode": q.mode},
    )


# ---------------------------------------------------------------------------
# Monte-Carlo estimation (diagnostic only)


def genie_llrs(channel_llr: np.ndarray) -> np.ndarray:
    """Genie-aided bit-channel LLRs for the all-zero input, shape ``(trials, n)``."""
    L = channel_llr
    T, n = L.shape
    x = L.reshape(T, 1, n)
    while x.shape[-1] > 1:
        h = x.shape[-1] // 2
        left, right = x[..., :h], x[..., h:]
        x = np.stack([f_minus(left, right), left + right], axis=2).reshape(T, -1, h)
    return x.reshape(T, n)


def monte_carlo_z(W: DiscreteChannel, m: int, trials: int, seed: int,
                  batch: int = 4096) -> BitChannelStats:
    """Estimate ``Z(W_i)`` and ``C(W_i)`` by genie-aided sampling.

    Uses ``Z = E[exp(-L/2)]`` and ``C = E[1 - log2(1 + exp(-L))]`` under the
    zero input (exact identities for symmetric channels); intervals are
    three standard errors wide on each side.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    n = 1 << m
    rng = np.random.default_rng(seed)
    llr_table = W.llr()
    s_z = np.zeros(n)
    s_z2 = np.zeros(n)
    s_c = np.zeros(n)
    s_c2 = np.zeros(n)
    batch = max(1, min(batch, (1 << 22) // n))
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        y = W.sample(np.zeros((b, n), dtype=np.int64), rng)
        L = genie_llrs(llr_table[y])
        with np.errstate(over="ignore"):
            zs = np.exp(-0.5 * L)
            cs = 1.0 - np.logaddexp(0.0, -L) / LN2
        s_z += zs.sum(0)
        s_z2 += (zs * zs).sum(0)
        s_c += cs.sum(0)
        s_c2 += (cs * cs).sum(0)
        done += b
    mz = s_z / trials
    mc = s_c / trials
    se_z = np.sqrt(np.maximum(s_z2 / trials - mz ** 2, 0.0) / trials)
    se_c = np.sqrt(np.maximum(s_c2 / trials - mc ** 2, 0.0) / trials)
    with np.errstate(divide="ignore"):
        zl = np.log2(np.clip(mz - 3 * se_z, 0.0, 1.0))
        zh = np.log2(np.clip(mz + 3 * se_z, 0.0, 1.0))
    return BitChannelStats(
        n=n, method="monte-carlo", z_lo_log2=zl, z_hi_log2=zh,
        c_lo=np.clip(mc - 3 * se_c, 0, 1), c_hi=np.clip(mc + 3 * se_c, 0, 1),
        base_capacity=capacity(W), channel=W.to_config(),
        meta={"trials": int(trials), "seed": int(seed), "z_mean": mz.tolist(),
              "z_stderr": se_z.tolist()},
    )


# ---------------------------------------------------------------------------
# index sets


def good_threshold_log2(n: int, beta: float) -> float:
    """log2 of ``2**(-n**beta) / n``."""
    return -(n ** beta) - math.log2(n)


def _check_beta(beta):
    if not 0 < beta < 0.5:
        raise ValueError(f"beta must lie in (0, 1/2), got {beta}")


def good_set(stats: BitChannelStats, beta: float) -> np.ndarray:
    """Indices whose certified ``Z`` upper bound is strictly below ``2**-n**beta / n``."""
    _check_beta(beta)
    return np.flatnonzero(stats.z_hi_log2 < good_threshold_log2(stats.n, beta))


def bad_set(stats: BitChannelStats, beta: float) -> np.ndarray:
    _check_beta(beta)
    return np.flatnonzero(~(stats.z_hi_log2 < good_threshold_log2(stats.n, beta)))


def poor_set(stats: BitChannelStats, delta: Optional[float] = None,
             delta_log2: Optional[float] = None) -> np.ndarray:
    """Indices whose certified capacity upper bound is at most ``delta``.

    ``delta_log2`` avoids underflow for very small thresholds.
    """
    if delta_log2 is None:
        if delta is None:
            raise ValueError("give delta or delta_log2")
        if not 0 < delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        return np.flatnonzero(stats.c_hi <= delta)
    if not delta_log2 < 0:
        raise ValueError(f"delta must lie in (0, 1), got 2**{delta_log2}")
    with np.errstate(divide="ignore"):
        return np.flatnonzero(np.log2(stats.c_hi) <= delta_log2)


def poor_set_bhattacharyya(stats: BitChannelStats, gamma: Optional[float] = None,
                           gamma_log2: Optional[float] = None) -> np.ndarray:
    """Indices with certified ``Z >= 1 - gamma``."""
    if gamma_log2 is None:
        if gamma is None:
            raise ValueError("give gamma or gamma_log2")
        if not 0 < gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
        gamma_log2 = math.log2(gamma)
    elif not gamma_log2 < 0:
        raise ValueError("gamma must be below 1")
    thr = math.log1p(-2.0 ** gamma_log2) / LN2
    return np.flatnonzero(stats.z_lo_log2 >= thr)


def sum_z(stats: BitChannelStats, idx, upper: bool = True) -> float:
    """Linear sum of ``Z`` bounds over ``idx``."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        return 0.0
    vals = (stats.z_hi_log2 if upper else stats.z_lo_log2)[idx]
    return float(np.exp2(np.logaddexp2.reduce(vals)))


def epsilon_n(stats: BitChannelStats, beta: float) -> float:
    """``C(W) - |good|/n``."""
    return stats.base_capacity - good_set(stats, beta).size / stats.n


# ---------------------------------------------------------------------------
# alpha(m, xi) and gamma_n


def a_xi(m: int, xi: float) -> int:
    """The integer ``a`` with ``sum_{i>=a} C(m,i) <= xi 2^m < sum_{i>=a-1} C(m,i)``."""
    if m < 1:
        raise ValueError("m must be positive")
    if not 0 < xi < 1:
        raise ValueError("xi must lie in (0, 1)")
    target = Fraction(xi) * (1 << m)
    tail = 0  # sum_{i=a}^m C(m, i), starting from the empty sum at a = m + 1
    a = m + 1
    while a - 1 >= 0 and tail + comb(m, a - 1) <= target:
        a -= 1
        tail += comb(m, a)
    return a


def alpha_xi(m: int, xi: float) -> float:
    return a_xi(m, xi) / m


def default_f(m: int) -> float:
    return m ** -0.75


def gamma_n(m: int, xi: float, f: Callable[[int], float] = default_f) -> float:
    """``log2 gamma_n = -n**(alpha(m, xi) (1 + f(m)))``; returned in log2."""
    fm = f(m)
    if not 0 < fm < 1:
        raise ValueError("f(m) must lie in (0, 1)")
    return -((2.0 ** m) ** (alpha_xi(m, xi) * (1 + fm)))


def stats_for_channel(W: DiscreteChannel, m: int, q: Optional[QuantizationConfig] = None) -> BitChannelStats:
    """Exact stats for erasure channels, certified quantized bounds otherwise."""
    p = W.params
    if p is not None and p.kind == "bec":
        return bec_evolve(p.eps, m)
    return de_bounds(W, m, q)


def stats_from_config(cfg: dict, m: int, q: Optional[QuantizationConfig] = None) -> BitChannelStats:
    return stats_for_channel(channel_from_config(cfg), m, q)
