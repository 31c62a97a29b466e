"""Leakage bounds, exact erasure-wiretap leakage and induced-channel checks.

All quantities are in bits.  Exact small-instance oracles work on dense
joint distributions of ``(V, Z)`` with ``V`` uniform on ``{0,1}^n`` and
``Z = W^n(. | V G_n)``; they are guarded to a few million table entries.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._kernels import rank_gap_patterns
from .channel import (
    DiscreteChannel,
    NotSymmetricError,
    all_bit_vectors,
    capacity,
    involution,
    is_symmetric,
    product_channel_table,
)
from .construction import (
    BitChannelStats,
    _bitchannel_from_table,
    _combined_table,
    epsilon_n,
    poor_set,
)
from .transform import check_length, polar_encode, polar_transform_matrix
from .wiretap import WiretapCode

DENSE_GUARD = 1 << 24
EXACT_MAX_M = 12


class SymmetryViolation(AssertionError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


def _h2_of_log2(x_log2: float) -> float:
    """``h2(2**x_log2)`` without underflow trouble for very negative exponents."""
    if x_log2 >= 0:
        return 0.0
    x = 2.0 ** x_log2
    if x == 0.0:
        return 0.0
    return x * (-x_log2) - (1 - x) * math.log1p(-x) / math.log(2)


@dataclass
class LeakageReport:
    mode: str
    k: int
    n: int
    bound_bits: float
    bound_log2: float
    components: dict
    exact_bits: Optional[float] = None
    exact_stderr: Optional[float] = None
    exact_method: Optional[str] = None
    flags: dict = field(default_factory=dict)

    @property
    def normalized(self) -> Optional[float]:
        return self.bound_bits / self.k if self.k else None

    @property
    def exact_normalized(self) -> Optional[float]:
        if self.exact_bits is None or not self.k:
            return None
        return self.exact_bits / self.k

    def to_dict(self) -> dict:
        return {
            "mode": self.mode, "n": self.n, "k": self.k,
            "bound_bits": self.bound_bits, "bound_log2": self.bound_log2,
            "normalized_bound": self.normalized, "components": self.components,
            "exact_bits": self.exact_bits, "exact_stderr": self.exact_stderr,
            "exact_method": self.exact_method, "exact_normalized": self.exact_normalized,
            "flags": self.flags,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def weak_leakage_bound(code: WiretapCode, eve: BitChannelStats) -> LeakageReport:
    """``n eps_n + h2(2**-n**beta) + (n - k) 2**-n**beta``."""
    if code.mode != "weak":
        raise ValueError("weak leakage bound needs a weak-mode code")
    n, k = code.n, code.k
    lam_log2 = -(n ** code.beta)
    eps = epsilon_n(eve, code.beta)
    comps = {
        "n_epsilon_n": n * eps,
        "h2_lambda": _h2_of_log2(lam_log2),
        "n_minus_k_lambda": (n - k) * 2.0 ** lam_log2,
        "epsilon_n": eps,
        "lambda_log2": lam_log2,
    }
    total = max(0.0, comps["n_epsilon_n"] + comps["h2_lambda"] + comps["n_minus_k_lambda"])
    with np.errstate(divide="ignore"):
        tl = float(np.log2(total)) if total > 0 else -math.inf
    return LeakageReport("weak", k, n, total, tl, comps)


def strong_leakage_bound(code: WiretapCode, eve: BitChannelStats) -> LeakageReport:
    """``delta_n |poor(Eve, delta_n)|``, kept in log2 as well."""
    if code.mode != "strong":
        raise ValueError("strong leakage bound needs a strong-mode code")
    n, k = code.n, code.k
    dl = code.delta_log2
    size = int(poor_set(eve, delta_log2=dl).size)
    bl = dl + math.log2(size) if size else -math.inf
    comps = {"delta_log2": dl, "poor_size": size}
    flags = {
        "delta_n_times_n_below_one": dl + math.log2(n) < 0,
        "note": "with delta_n = 2**-n**beta the bound decays like 2**-n**beta times n",
    }
    return LeakageReport("strong", k, n, 2.0 ** bl if size else 0.0, bl, comps, flags=flags)


# ---------------------------------------------------------------------------
# exact leakage over an erasure eavesdropper


def _packed_columns(G: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Columns of ``G[rows]`` as little-endian packed uint64 words, shape ``(n, W)``."""
    n = G.shape[1]
    sub = np.ascontiguousarray(G[rows].T)  # (n, |rows|)
    packed = np.packbits(sub, axis=1, bitorder="little")
    nbytes = max(8, -(-packed.shape[1] // 8) * 8)
    out = np.zeros((n, nbytes), dtype=np.uint8)
    out[:, :packed.shape[1]] = packed
    return out.view(np.uint64).copy()


def rank_gap(G, full_rows, sub_rows, patterns) -> np.ndarray:
    """``rank(G[full_rows][:, S]) - rank(G[sub_rows][:, S])`` for each unerased mask ``S``."""
    n = G.shape[0]
    full_rows = np.asarray(full_rows, dtype=np.int64)
    sub_rows = np.asarray(sub_rows, dtype=np.int64)
    patterns = np.ascontiguousarray(patterns, dtype=np.bool_)
    if full_rows.size == n:
        cols_full, nfull = np.zeros((n, 1), dtype=np.uint64), -1
    else:
        cols_full, nfull = _packed_columns(G, full_rows), int(full_rows.size)
    cols_sub = _packed_columns(G, sub_rows)
    return rank_gap_patterns(cols_full, nfull, cols_sub, int(sub_rows.size), patterns)


def bec_exact_leakage(code: WiretapCode, eps: float, pattern_budget: int = 1 << 16,
                      seed: int = 0, samples: int = 100_000, randomized: bool = True,
                      batch: int = 2048):
    """``I(U; Z)`` in bits for an erasure eavesdropper, ``U`` and ``E`` uniform.

    Equals ``E_S[rank G_{A u R, S} - rank G_{R, S}]`` over the unerased
    positions ``S``.  With ``randomized=False`` the random bits are fixed
    and the second rank drops out.  Exhaustive (weighted) when
    ``2**n <= pattern_budget``, otherwise a Monte-Carlo mean over
    ``samples`` patterns.  Returns ``(bits, stderr, method)``.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError("erasure probability must lie in [0, 1]")
    n = code.n
    m = check_length(n)
    if m > EXACT_MAX_M:
        raise ValueError(f"exact leakage limited to m <= {EXACT_MAX_M}")
    if code.k == 0 or eps == 1.0:
        return 0.0, 0.0, "trivial"
    G = polar_transform_matrix(m)
    sub = code.R if randomized else np.zeros(0, dtype=np.int64)
    full = np.union1d(code.A, sub)
    if eps == 0.0:
        gap = rank_gap(G, full, sub, np.ones((1, n), dtype=bool))
        return float(gap[0]), 0.0, "trivial"
    if 2 ** n <= pattern_budget:
        bits = all_bit_vectors(n).astype(bool)  # True = unerased
        gaps = rank_gap(G, full, sub, bits)
        seen = bits.sum(axis=1)
        logw = seen * math.log(1 - eps) + (n - seen) * math.log(eps)
        w = np.exp(logw)
        return float(np.dot(w, gaps) / w.sum()), 0.0, "exhaustive"
    rng = np.random.default_rng(seed)
    total = 0.0
    total2 = 0.0
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        pats = rng.random((b, n)) >= eps
        g = rank_gap(G, full, sub, pats).astype(float)
        total += g.sum()
        total2 += (g * g).sum()
        done += b
    mean = total / samples
    var = max(total2 / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / samples), "monte-carlo"


def attach_exact(report: LeakageReport, code: WiretapCode, eps: float, **kw) -> LeakageReport:
    bits, se, method = bec_exact_leakage(code, eps, **kw)
    report.exact_bits = bits
    report.exact_stderr = se
    report.exact_method = method
    return report


# ---------------------------------------------------------------------------
# induced channel


@dataclass(frozen=True, eq=False)
class InducedChannel:
    """``Q(z|x) = 2**-r sum_e W^n(z | (x; e) G_n)``.

    Input ``x`` fills the positions outside ``R`` in increasing order, first
    position most significant; outputs are the mixed-radix product alphabet.
    """

    n: int
    R: tuple
    table: np.ndarray
    base: DiscreteChannel

    @property
    def channel(self) -> DiscreteChannel:
        return DiscreteChannel(self.table)

    @property
    def free(self) -> tuple:
        return tuple(i for i in range(self.n) if i not in self.R)

    def to_csv(self, path) -> None:
        free = self.free
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x"] + [f"z{j}" for j in range(self.table.shape[1])])
            for row, x in enumerate(all_bit_vectors(len(free))):
                w.writerow(["".join(map(str, x))] + [f"{p:.17g}" for p in self.table[row]])


def _guard(W: DiscreteChannel, n: int):
    check_length(n)
    if n > 4:
        raise ValueError("dense oracles are limited to n <= 4")
    if (2 ** n) * W.n_outputs ** n > DENSE_GUARD:
        raise ValueError("dense table guard exceeded")


def _joint(W: DiscreteChannel, n: int) -> np.ndarray:
    """``p(v, z)`` with shape ``(2,)*n + (|Z|^n,)``."""
    return (_combined_table(W, n) / 2.0 ** n).reshape((2,) * n + (-1,))


def induced_channel(W: DiscreteChannel, n: int, R) -> InducedChannel:
    _guard(W, n)
    R = tuple(sorted(int(i) for i in R))
    if any(not 0 <= i < n for i in R):
        raise ValueError("index outside [0, n)")
    P = _combined_table(W, n).reshape((2,) * n + (-1,))
    if R:
        P = P.mean(axis=R)
    table = P.reshape(-1, P.shape[-1])
    return InducedChannel(n=n, R=R, table=table, base=W)


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def mutual_information(joint: np.ndarray, first, second) -> float:
    """``I(first; second)`` from a joint array; axes groups are tuples of axis ids."""
    first, second = tuple(first), tuple(second)
    allax = tuple(range(joint.ndim))

    def marg(keep):
        drop = tuple(a for a in allax if a not in keep)
        return joint.sum(axis=drop) if drop else joint

    if not first or not second:
        return 0.0
    return _entropy(marg(first).ravel()) + _entropy(marg(second).ravel()) \
        - _entropy(marg(first + second).ravel())


def induced_capacity_check(W: DiscreteChannel, n: int, R, stats: Optional[BitChannelStats] = None,
                           tol: float = 1e-9) -> dict:
    """Compare ``C(Q)`` with ``sum_{i not in R} C(W_i)`` and with ``I(V_{R^c}; Z)``."""
    ic = induced_channel(W, n, R)
    free = ic.free
    cq = capacity(ic.channel) if free else 0.0
    if stats is None:
        P = _combined_table(W, n)
        caps = [capacity(_bitchannel_from_table(P, n, i)) for i in free]
    else:
        caps = [float(stats.c_hi[i]) for i in free]
    rhs = float(sum(caps))
    joint = _joint(W, n)
    mi = mutual_information(joint, free, (n,))
    return {"R": [i + 1 for i in ic.R], "capacity_Q": cq, "sum_bit_capacities": rhs,
            "mutual_information": mi, "holds": cq <= rhs + tol,
            "identity_gap": abs(cq - mi)}


def chain_rule_check(W: DiscreteChannel, n: int, R) -> dict:
    """``I(V_F; Z)`` against the term-by-term sum over ``F = [n] - R`` in index order."""
    _guard(W, n)
    free = [i for i in range(n) if i not in set(R)]
    joint = _joint(W, n)
    direct = mutual_information(joint, free, (n,))
    terms = [mutual_information(joint, (i,), (n,) + tuple(free[:j])) for j, i in enumerate(free)]
    return {"direct": direct, "terms": terms, "sum": float(sum(terms)),
            "gap": abs(direct - sum(terms))}


def bitchannel_mi_check(W: DiscreteChannel, n: int) -> dict:
    """``C(W_i)`` from the explicit bit-channel against ``I(V_i; Z, V_0..V_{i-1})``."""
    _guard(W, n)
    P = _combined_table(W, n)
    joint = _joint(W, n)
    caps = [capacity(_bitchannel_from_table(P, n, i)) for i in range(n)]
    mis = [mutual_information(joint, (i,), (n,) + tuple(range(i))) for i in range(n)]
    return {"capacities": caps, "mutual_information": mis,
            "max_gap": float(np.max(np.abs(np.subtract(caps, mis))))}


# ---------------------------------------------------------------------------
# symmetry


def _act(pi: np.ndarray, q: int, n: int, c: np.ndarray, z: int) -> int:
    """Apply ``pi`` to the coordinates of the mixed-radix output ``z`` where ``c`` is 1."""
    digits = []
    for _ in range(n):
        digits.append(z % q)
        z //= q
    digits = digits[::-1]
    out = 0
    for j in range(n):
        d = int(pi[digits[j]]) if c[j] else digits[j]
        out = out * q + d
    return out


def lemma12_check(W: DiscreteChannel, n: int, samples: Optional[int] = None,
                  seed: int = 0, tol: float = 1e-12) -> dict:
    """``W^n(z | (a+x) G_n) = W^n(a G_n . z | x G_n)`` over all (or sampled) triples."""
    _guard(W, n)
    pi = involution(W)
    if pi is None:
        raise NotSymmetricError("channel has no output involution")
    q = W.n_outputs
    V = all_bit_vectors(n)
    C = polar_encode(V)
    P = product_channel_table(W, C)  # rows indexed by v
    nz = P.shape[1]
    if samples is None:
        triples = itertools.product(range(2 ** n), range(2 ** n), range(nz))
        count = (4 ** n) * nz
    else:
        rng = np.random.default_rng(seed)
        triples = zip(rng.integers(0, 2 ** n, samples), rng.integers(0, 2 ** n, samples),
                      rng.integers(0, nz, samples))
        count = samples
    for a, x, z in triples:
        a, x, z = int(a), int(x), int(z)
        lhs = P[a ^ x, z]
        rhs = P[x, _act(pi, q, n, C[a], z)]
        if abs(lhs - rhs) > tol:
            raise SymmetryViolation(f"identity fails at a={a}, x={x}, z={z}", (a, x, z))
    return {"checked": count, "holds": True}


def symmetry_certificate(obj, samples: Optional[int] = None, seed: int = 0,
                         tol: float = 1e-10) -> list:
    """Orbit partition proving symmetry; for induced channels also checks the group action.

    For an :class:`InducedChannel` the action ``a . z = ((a; 0) G_n) . z`` is
    verified as ``Q(z | a+x) = Q(a . z | x)`` on every triple (or on
    ``samples`` random ones).
    """
    W = obj.channel if isinstance(obj, InducedChannel) else obj
    wit = is_symmetric(W, tol=tol)
    if not wit.symmetric:
        raise SymmetryViolation("no symmetric column partition exists")
    if isinstance(obj, InducedChannel):
        base = obj.base
        pi = involution(base)
        if pi is None:
            raise NotSymmetricError("base channel has no output involution")
        n, q = obj.n, base.n_outputs
        free = obj.free
        nin = 2 ** len(free)
        # (a; 0) places a on the free positions, zeros on R
        embed = np.zeros((nin, n), dtype=np.uint8)
        embed[:, list(free)] = all_bit_vectors(len(free)) if free else np.zeros((1, 0))
        codes = polar_encode(embed)
        nz = obj.table.shape[1]
        if samples is None:
            triples = itertools.product(range(nin), range(nin), range(nz))
        else:
            rng = np.random.default_rng(seed)
            triples = zip(rng.integers(0, nin, samples), rng.integers(0, nin, samples),
                          rng.integers(0, nz, samples))
        Q = obj.table
        for a, x, z in triples:
            a, x, z = int(a), int(x), int(z)
            if abs(Q[a ^ x, z] - Q[x, _act(pi, q, n, codes[a], z)]) > tol:
                raise SymmetryViolation(f"group action fails at a={a}, x={x}, z={z}", (a, x, z))
    return wit.partition
