"""Finite discrete memoryless channels and their information measures.

A channel is a row-stochastic matrix ``W[x, z] = W(z|x)``.  Binary-input
channels (two rows) are the main objects; induced channels built by
:mod:`polarwiretap.security` reuse the same type with ``2**k`` rows.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

log = logging.getLogger(__name__)

ROW_SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-9


class ChannelError(ValueError):
    """Invalid channel parameters or table."""


class NotSymmetricError(ChannelError):
    pass


@dataclass(frozen=True)
class ChannelParams:
    kind: str  # "bsc" | "bec" | "generic"
    p: Optional[float] = None
    eps: Optional[float] = None
    transitions: Optional[tuple] = None

    def __post_init__(self):
        if self.kind == "bsc":
            if self.p is None or not 0.0 <= self.p <= 0.5:
                raise ChannelError(f"BSC crossover must lie in [0, 1/2], got {self.p}")
        elif self.kind == "bec":
            if self.eps is None or not 0.0 <= self.eps <= 1.0:
                raise ChannelError(f"BEC erasure probability must lie in [0, 1], got {self.eps}")
        elif self.kind == "generic":
            if self.transitions is None:
                raise ChannelError("generic channel needs a transition table")
        else:
            raise ChannelError(f"unknown channel kind {self.kind!r}")

    def to_config(self) -> dict:
        if self.kind == "bsc":
            return {"kind": "bsc", "p": self.p}
        if self.kind == "bec":
            return {"kind": "bec", "eps": self.eps}
        return {"kind": "generic", "transitions": [list(r) for r in self.transitions]}

    @classmethod
    def from_config(cls, cfg: dict) -> "ChannelParams":
        kind = str(cfg.get("kind", "")).lower()
        if kind == "bsc":
            return cls("bsc", p=float(cfg["p"]))
        if kind == "bec":
            return cls("bec", eps=float(cfg.get("eps", cfg.get("epsilon"))))
        if kind == "generic":
            return cls("generic", transitions=tuple(tuple(float(v) for v in row)
                                                    for row in cfg["transitions"]))
        raise ChannelError(f"unknown channel kind {cfg.get('kind')!r}")

    def build(self) -> "DiscreteChannel":
        if self.kind == "bsc":
            return make_bsc(self.p)
        if self.kind == "bec":
            return make_bec(self.eps)
        return DiscreteChannel(np.array(self.transitions, dtype=float), params=self)


@dataclass(frozen=True, eq=False)
class DiscreteChannel:
    """Transition table ``W[x, z]`` with opaque output labels."""

    transitions: np.ndarray
    outputs: Optional[tuple] = None
    params: Optional[ChannelParams] = field(default=None, compare=False)

    def __post_init__(self):
        t = np.array(self.transitions, dtype=float)
        if t.ndim != 2 or t.shape[0] < 1 or t.shape[1] < 1:
            raise ChannelError("transition table must be a nonempty 2-D matrix")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise ChannelError("transition probabilities must be finite and nonnegative")
        sums = t.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL * max(1, t.shape[1])):
            raise ChannelError(f"rows must sum to 1 (got {sums})")
        t.setflags(write=False)
        object.__setattr__(self, "transitions", t)
        if self.outputs is not None and len(self.outputs) != t.shape[1]:
            raise ChannelError("output label count does not match the table")

    @property
    def n_inputs(self) -> int:
        return self.transitions.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.transitions.shape[1]

    @property
    def labels(self) -> tuple:
        return self.outputs if self.outputs is not None else tuple(range(self.n_outputs))

    def is_binary(self) -> bool:
        return self.n_inputs == 2

    def to_config(self) -> dict:
        if self.params is not None:
            return self.params.to_config()
        return {"kind": "generic", "transitions": self.transitions.tolist()}

    def llr(self) -> np.ndarray:
        """Per-output log-likelihood ratio ``ln W(z|0)/W(z|1)`` (may be +-inf or nan)."""
        self._require_binary()
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(self.transitions[0]) - np.log(self.transitions[1])
        # outputs impossible under both inputs never occur; treat as erasures
        out[np.isnan(out)] = 0.0
        return out

    def sample(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Pass the input symbols ``x`` through the channel, returning output indices."""
        x = np.asarray(x, dtype=np.int64)
        cum = np.cumsum(self.transitions, axis=1)
        cum[:, -1] = 1.0
        u = rng.random(x.shape)
        rows = cum[x]
        return (u[..., None] >= rows).sum(axis=-1).astype(np.int64)

    def _require_binary(self):
        if not self.is_binary():
            raise ChannelError("operation needs a binary-input channel")

    def __repr__(self):
        if self.params is not None and self.params.kind != "generic":
            arg = self.params.p if self.params.kind == "bsc" else self.params.eps
            return f"{self.params.kind.upper()}({arg})"
        return f"DiscreteChannel({self.n_inputs}x{self.n_outputs})"


def make_bsc(p: float) -> DiscreteChannel:
    params = ChannelParams("bsc", p=float(p))
    p = params.p
    return DiscreteChannel(np.array([[1 - p, p], [p, 1 - p]]), outputs=(0, 1), params=params)


def make_bec(eps: float) -> DiscreteChannel:
    params = ChannelParams("bec", eps=float(eps))
    e = params.eps
    return DiscreteChannel(np.array([[1 - e, e, 0.0], [0.0, e, 1 - e]]),
                           outputs=(0, "e", 1), params=params)


def channel_from_config(cfg) -> DiscreteChannel:
    if isinstance(cfg, DiscreteChannel):
        return cfg
    return ChannelParams.from_config(cfg).build()


def h2(p) -> np.ndarray:
    """Binary entropy in bits (vectorised, ``h2(0) = h2(1) = 0``)."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    return np.where((p <= 0) | (p >= 1), 0.0, out)


def _xlogy_ratio(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num * np.log2(num / den)
    return np.where(num > 0, r, 0.0)


def capacity(W: DiscreteChannel) -> float:
    """Mutual information (bits) between a uniform input and the output."""
    t = W.transitions
    q = t.mean(axis=0)
    val = float(_xlogy_ratio(t, q[None, :]).sum() / t.shape[0])
    return min(max(val, 0.0), math.log2(t.shape[0]))


def bhattacharyya(W: DiscreteChannel) -> float:
    W._require_binary()
    t = W.transitions
    return float(np.sum(np.sqrt(t[0]) * np.sqrt(t[1])))


class SymmetryWitness(NamedTuple):
    symmetric: bool
    partition: Optional[list]  # list of tuples of output indices

    def __bool__(self):
        return self.symmetric


def _close(a, b, tol=SYMMETRY_TOL) -> bool:
    return bool(np.all(np.abs(np.asarray(a) - np.asarray(b)) <= tol))


def is_symmetric(W: DiscreteChannel, tol: float = SYMMETRY_TOL) -> SymmetryWitness:
    """Gallager symmetry test; returns the column partition as witness.

    Columns are grouped by their sorted value multiset (this grouping is the
    coarsest admissible one, so a partition exists iff it works); inside each
    group every row must be a permutation of every other row.
    """
    t = W.transitions
    cols = np.sort(t, axis=0).T  # one sorted column per output
    order = np.lexsort(cols.T[::-1])
    groups: list[list[int]] = []
    for j in order:
        if groups and _close(cols[groups[-1][0]], cols[j], tol):
            groups[-1].append(int(j))
        else:
            groups.append([int(j)])
    for g in groups:
        rows = np.sort(t[:, g], axis=1)
        if not _close(rows, rows[0][None, :], tol):
            return SymmetryWitness(False, None)
    return SymmetryWitness(True, [tuple(sorted(g)) for g in groups])


def involution(W: DiscreteChannel, tol: float = SYMMETRY_TOL) -> Optional[np.ndarray]:
    """Output permutation ``pi`` with ``pi = pi^-1`` and ``W(z|0) = W(pi(z)|1)``.

    For binary input this exists iff the channel is symmetric; returns None
    otherwise.
    """
    W._require_binary()
    t = W.transitions
    nz = t.shape[1]
    pi = -np.ones(nz, dtype=np.int64)
    for z in range(nz):
        if pi[z] >= 0:
            continue
        a, b = t[0, z], t[1, z]
        if abs(a - b) <= tol:
            pi[z] = z
            continue
        for w in range(z + 1, nz):
            if pi[w] < 0 and abs(t[0, w] - b) <= tol and abs(t[1, w] - a) <= tol:
                pi[z], pi[w] = w, z
                break
        else:
            return None
    return pi


def cascade(W1: DiscreteChannel, W3) -> DiscreteChannel:
    """Channel ``W2(z|x) = sum_y W1(y|x) W3(z|y)``; degraded w.r.t. ``W1`` by construction."""
    m3 = W3.transitions if isinstance(W3, DiscreteChannel) else np.asarray(W3, dtype=float)
    if m3.ndim != 2 or m3.shape[0] != W1.n_outputs:
        raise ChannelError(f"cascade needs a {W1.n_outputs}-row stochastic matrix, got {m3.shape}")
    if np.any(m3 < 0) or np.any(np.abs(m3.sum(axis=1) - 1) > ROW_SUM_TOL * max(1, m3.shape[1])):
        raise ChannelError("second stage is not a stochastic matrix")
    t = W1.transitions @ m3
    t = t / t.sum(axis=1, keepdims=True)
    out = DiscreteChannel(t)
    return DiscreteChannel(t, params=classify(out))


def classify(W: DiscreteChannel, tol: float = 1e-12) -> Optional[ChannelParams]:
    """Recognise a table as BSC(p) or BEC(eps) when it has that exact shape."""
    if not W.is_binary():
        return None
    t = W.transitions
    if t.shape[1] == 2 and abs(t[0, 0] - t[1, 1]) <= tol and abs(t[0, 1] - t[1, 0]) <= tol:
        p = float(min(t[0, 1], t[0, 0]))
        return ChannelParams("bsc", p=p)
    if t.shape[1] == 3 and t[0, 2] <= tol and t[1, 0] <= tol and abs(t[0, 1] - t[1, 1]) <= tol \
            and abs(t[0, 0] - t[1, 2]) <= tol:
        return ChannelParams("bec", eps=float(t[0, 1]))
    return None


def known_degraded(W_main: DiscreteChannel, W_tap: DiscreteChannel) -> Optional[bool]:
    """True/False when degradation of ``W_tap`` w.r.t. ``W_main`` is recognisable, else None."""
    pm = W_main.params or classify(W_main)
    pt = W_tap.params or classify(W_tap)
    if pm is None or pt is None:
        return None
    if pm.kind == pt.kind == "bsc":
        return pt.p >= pm.p
    if pm.kind == pt.kind == "bec":
        return pt.eps >= pm.eps
    return None


def secrecy_capacity(W_main: DiscreteChannel, W_tap: DiscreteChannel,
                     degraded: Optional[bool] = None) -> float:
    """``C(W_main) - C(W_tap)`` for symmetric channels, tap degraded w.r.t. main.

    Degradation is a caller hypothesis.  BSC/BEC pairs are recognised
    automatically; a pair known to be non-degraded still gets the difference,
    with a warning that it carries no operational meaning.
    """
    for name, W in (("main", W_main), ("tap", W_tap)):
        if not is_symmetric(W):
            raise NotSymmetricError(f"{name} channel is not symmetric")
    if degraded is None:
        degraded = known_degraded(W_main, W_tap)
    if degraded is False:
        warnings.warn("wiretap channel is not degraded w.r.t. the main channel; "
                      "the capacity difference is not a proven secrecy capacity",
                      stacklevel=2)
    return capacity(W_main) - capacity(W_tap)


def product_channel_table(W: DiscreteChannel, xs: np.ndarray) -> np.ndarray:
    """Rows ``W^n(. | x)`` for each row ``x`` of ``xs``; outputs in mixed radix, first coordinate most significant."""
    xs = np.asarray(xs, dtype=np.int64)
    rows = np.ones((xs.shape[0], 1))
    for j in range(xs.shape[1]):
        rows = (rows[:, :, None] * W.transitions[xs[:, j]][:, None, :]).reshape(xs.shape[0], -1)
    return rows


def all_bit_vectors(n: int) -> np.ndarray:
    """All of {0,1}^n, first coordinate most significant."""
    idx = np.arange(1 << n)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(np.uint8)


def pair_representation(W: DiscreteChannel, tol: float = SYMMETRY_TOL):
    """Return arrays ``(a, b)`` with ``a >= b`` describing a symmetric binary channel.

    Each pair stands for two conjugate outputs ``(a, b)`` and ``(b, a)``;
    self-conjugate outputs are split into two halves.
    """
    pi = involution(W, tol)
    if pi is None:
        raise NotSymmetricError("channel is not symmetric")
    t = W.transitions
    a, b = [], []
    for z in range(W.n_outputs):
        w = pi[z]
        if w == z:
            a.append(t[0, z] / 2)
            b.append(t[1, z] / 2)
        elif z < w:
            a.append(t[0, z])
            b.append(t[1, z])
    a, b = np.array(a), np.array(b)
    return np.maximum(a, b), np.minimum(a, b)


def channel_from_pairs(a: Sequence[float], b: Sequence[float]) -> DiscreteChannel:
    a, b = np.asarray(a, float), np.asarray(b, float)
    t = np.vstack([np.concatenate([a, b]), np.concatenate([b, a])])
    return DiscreteChannel(t / t.sum(axis=1, keepdims=True))
