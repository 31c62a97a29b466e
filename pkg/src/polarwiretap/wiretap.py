"""Weak- and strong-security wiretap codes built from two bit-channel profiles.

A code splits ``[n]`` into ``R`` (random bits), ``A`` (message bits) and
``B`` (frozen bits).  In strong mode ``R`` is further split into ``X`` (bits
that Bob cannot decode reliably) and ``Y``.  Index sets are 0-based sorted
int arrays here and 1-based in the JSON descriptor.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import DiscreteChannel
from .construction import (
    BitChannelStats,
    bad_set,
    good_set,
    poor_set,
    sum_z,
)
from .decoder import branching_decode_llr, sc_decode_llr
from .transform import check_length, polar_encode


class ConstructionRefused(ValueError):
    """Raised when the two profiles violate the nesting a code relies on."""

    def __init__(self, message: str, indices=()):
        super().__init__(message)
        self.indices = [int(i) for i in indices]


class DeltaWindowWarning(UserWarning):
    pass


def _idx(a) -> np.ndarray:
    out = np.unique(np.asarray(a, dtype=np.int64))
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class WiretapCode:
    n: int
    mode: str
    R: np.ndarray
    A: np.ndarray
    B: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    beta: float
    delta_log2: Optional[float] = None
    frozen_values: Optional[np.ndarray] = None
    main_channel: Optional[dict] = None
    tap_channel: Optional[dict] = None
    provenance: dict = field(default_factory=dict)
    notes: tuple = ()

    def __post_init__(self):
        check_length(self.n)
        if self.mode not in ("weak", "strong"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for name in ("R", "A", "B", "X", "Y"):
            object.__setattr__(self, name, _idx(getattr(self, name)))
        allidx = np.concatenate([self.R, self.A, self.B])
        if allidx.size != self.n or not np.array_equal(np.sort(allidx), np.arange(self.n)):
            raise ValueError("R, A, B must partition [n]")
        if self.mode == "strong":
            xy = np.concatenate([self.X, self.Y])
            if xy.size != self.R.size or not np.array_equal(np.sort(xy), self.R):
                raise ValueError("X, Y must partition R")
        elif self.X.size or self.Y.size:
            raise ValueError("X and Y are only used in strong mode")
        if self.frozen_values is not None:
            s = np.asarray(self.frozen_values, dtype=np.uint8)
            if s.shape != (self.B.size,) or s.max(initial=0) > 1:
                raise ValueError("frozen values must be a bit vector of length |B|")
            s.setflags(write=False)
            object.__setattr__(self, "frozen_values", s)

    @property
    def k(self) -> int:
        return int(self.A.size)

    @property
    def r(self) -> int:
        return int(self.R.size)

    @property
    def rate(self) -> float:
        return self.k / self.n

    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[self.B] = True
        return mask

    def frozen_vector(self) -> np.ndarray:
        """Length-``n`` vector holding the frozen values on ``B`` and 0 elsewhere."""
        out = np.zeros(self.n, dtype=np.uint8)
        if self.frozen_values is not None:
            out[self.B] = self.frozen_values
        return out

    def to_dict(self) -> dict:
        def one(a):
            return [int(i) + 1 for i in a]

        return {
            "n": self.n, "mode": self.mode, "beta": self.beta,
            "delta_log2": self.delta_log2, "k": self.k, "r": self.r,
            "rate": self.rate,
            "R": one(self.R), "A": one(self.A), "B": one(self.B),
            "X": one(self.X), "Y": one(self.Y),
            "frozen_values": None if self.frozen_values is None else self.frozen_values.tolist(),
            "main_channel": self.main_channel, "tap_channel": self.tap_channel,
            "provenance": self.provenance, "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WiretapCode":
        def zero(a):
            return np.asarray(a, dtype=np.int64) - 1

        return cls(
            n=int(d["n"]), mode=d["mode"], R=zero(d["R"]), A=zero(d["A"]), B=zero(d["B"]),
            X=zero(d.get("X", [])), Y=zero(d.get("Y", [])), beta=float(d["beta"]),
            delta_log2=d.get("delta_log2"), frozen_values=d.get("frozen_values"),
            main_channel=d.get("main_channel"), tap_channel=d.get("tap_channel"),
            provenance=d.get("provenance") or {}, notes=tuple(d.get("notes") or ()),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "WiretapCode":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _provenance(bob: BitChannelStats, eve: BitChannelStats) -> dict:
    return {"main_stats": bob.digest(), "tap_stats": eve.digest(),
            "main_method": bob.method, "tap_method": eve.method}


def _check_pair(bob: BitChannelStats, eve: BitChannelStats):
    if bob.n != eve.n:
        raise ValueError(f"profiles have different lengths {bob.n} and {eve.n}")


def build_weak(bob: BitChannelStats, eve: BitChannelStats, beta: float) -> WiretapCode:
    """``R = good(Eve)``, ``A = good(Bob) - good(Eve)``, ``B = bad(Bob)``."""
    _check_pair(bob, eve)
    g_bob = good_set(bob, beta)
    g_eve = good_set(eve, beta)
    stray = np.setdiff1d(g_eve, g_bob)
    if stray.size:
        raise ConstructionRefused(
            f"{stray.size} indices are good for the eavesdropper but not for the "
            f"legitimate receiver: {(stray + 1).tolist()[:20]}", stray)
    notes = ()
    A = np.setdiff1d(g_bob, g_eve)
    if A.size == 0:
        notes = ("no message bits: the two channels have the same good set",)
    return WiretapCode(
        n=bob.n, mode="weak", R=g_eve, A=A, B=bad_set(bob, beta), X=[], Y=[],
        beta=beta, main_channel=bob.channel, tap_channel=eve.channel,
        provenance=_provenance(bob, eve), notes=notes,
    )


def delta_window_log2(n: int, beta: float, c1: float = 1.0, c2: float = 0.5):
    """``log2`` endpoints of ``c1 2**(-n**beta) <= delta <= 1 - c2``."""
    return math.log2(c1) - n ** beta, math.log2(1.0 - c2)


def build_strong(bob: BitChannelStats, eve: BitChannelStats, beta: float,
                 delta_log2: Optional[float] = None, c1: float = 1.0,
                 c2: float = 0.5) -> WiretapCode:
    """Strong-security code from the poor set of Eve at level ``2**delta_log2``.

    ``delta_log2`` defaults to ``-n**beta``.  A value outside the window
    ``[c1 2**-n**beta, 1 - c2]`` only triggers a warning.
    """
    _check_pair(bob, eve)
    n = bob.n
    if delta_log2 is None:
        delta_log2 = -(n ** beta)
    lo, hi = delta_window_log2(n, beta, c1, c2)
    notes = []
    if not lo - 1e-12 <= delta_log2 <= hi + 1e-12:
        msg = f"delta = 2**{delta_log2:.4g} lies outside [2**{lo:.4g}, 2**{hi:.4g}]"
        warnings.warn(msg, DeltaWindowWarning, stacklevel=2)
        notes.append(msg)
    P = poor_set(eve, delta_log2=delta_log2)
    g_bob = good_set(bob, beta)
    R = np.setdiff1d(np.arange(n), P)
    return WiretapCode(
        n=n, mode="strong", R=R, A=np.intersect1d(P, g_bob), B=np.setdiff1d(P, g_bob),
        X=np.setdiff1d(R, g_bob), Y=np.intersect1d(R, g_bob), beta=beta,
        delta_log2=float(delta_log2), main_channel=bob.channel, tap_channel=eve.channel,
        provenance=_provenance(bob, eve), notes=tuple(notes),
    )


def reliability_bound(code: WiretapCode, bob: BitChannelStats) -> float:
    """Certified union bound ``sum_{i in A u R} z_hi(W*_i)`` on the block-error rate."""
    return sum_z(bob, np.concatenate([code.A, code.R]), upper=True)


# ---------------------------------------------------------------------------
# encoding


def assemble(code: WiretapCode, u, e, s=None) -> np.ndarray:
    """Place message ``u``, randomness ``e`` and frozen values into ``v``."""
    u = np.asarray(u, dtype=np.uint8)
    e = np.asarray(e, dtype=np.uint8)
    if u.shape[-1] != code.k or e.shape[-1] != code.r:
        raise ValueError(f"expected |u| = {code.k} and |e| = {code.r}, got "
                         f"{u.shape[-1]} and {e.shape[-1]}")
    lead = np.broadcast_shapes(u.shape[:-1], e.shape[:-1])
    v = np.zeros(lead + (code.n,), dtype=np.uint8)
    v[..., code.A] = u
    v[..., code.R] = e
    if s is None and code.frozen_values is not None:
        s = code.frozen_values
    if s is not None:
        s = np.asarray(s, dtype=np.uint8)
        if s.shape[-1] != code.B.size:
            raise ValueError(f"expected |s| = {code.B.size}")
        v[..., code.B] = s
    return v


def encode(code: WiretapCode, u, e, s=None) -> np.ndarray:
    """``x = v G_n`` with ``v_A = u``, ``v_R = e``, ``v_B = s`` (zeros by default)."""
    return polar_encode(assemble(code, u, e, s))


def encode_random(code: WiretapCode, u, rng: np.random.Generator) -> np.ndarray:
    """Encode with fresh uniform randomness drawn from ``rng``."""
    u = np.asarray(u, dtype=np.uint8)
    e = rng.integers(0, 2, size=u.shape[:-1] + (code.r,), dtype=np.uint8)
    return encode(code, u, e)


# ---------------------------------------------------------------------------
# decoding


@dataclass(frozen=True)
class DecodeConfig:
    tie_break: str = "random"  # "random" | "zero"
    seed: int = 0
    branch_limit: Optional[int] = None  # None: 2**min(|X|, 4)

    def __post_init__(self):
        if self.tie_break not in ("random", "zero"):
            raise ValueError(f"unknown tie-break rule {self.tie_break!r}")
        if self.branch_limit is not None and self.branch_limit < 1:
            raise ValueError("branch limit must be at least 1")

    def make_rng(self) -> Optional[np.random.Generator]:
        return np.random.default_rng(self.seed) if self.tie_break == "random" else None


def channel_llrs(y, W: DiscreteChannel) -> np.ndarray:
    y = np.asarray(y)
    if not np.issubdtype(y.dtype, np.integer):
        raise ValueError("channel outputs must be integer symbol indices")
    if y.size and (y.min() < 0 or y.max() >= W.n_outputs):
        raise ValueError("channel output outside the output alphabet")
    return W.llr()[y]


def _tie_rng(cfg: DecodeConfig, rng):
    return rng if rng is not None else cfg.make_rng()


def sc_decode(code: WiretapCode, y, W: DiscreteChannel, cfg: DecodeConfig = DecodeConfig(),
              rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Successive cancellation over ``A u R`` with ``B`` frozen; returns ``v_A``.

    ``y`` holds output symbol indices, shape ``(n,)`` or ``(T, n)``; ``rng``
    overrides the tie-break generator of ``cfg``.
    """
    y = np.asarray(y)
    if y.shape[-1] != code.n:
        raise ValueError(f"expected {code.n} channel outputs")
    v = sc_decode_llr(channel_llrs(y, W).reshape(-1, code.n), code.frozen_mask(),
                      code.frozen_vector(), _tie_rng(cfg, rng))
    return v[:, code.A].reshape(y.shape[:-1] + (code.k,))


def sc_decode_genie(code: WiretapCode, y, W: DiscreteChannel, known,
                    cfg: DecodeConfig = DecodeConfig(),
                    rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Estimate ``v_R`` when every bit outside ``R`` is revealed.

    ``known`` is a full length-``n`` vector (or ``(T, n)`` batch) whose
    entries outside ``R`` are used; entries on ``R`` are ignored.
    """
    y = np.asarray(y)
    known = np.asarray(known, dtype=np.uint8)
    if known.shape[-1] != code.n:
        raise ValueError(f"genie information must cover all {code.n} indices")
    mask = np.ones(code.n, dtype=bool)
    mask[code.R] = False
    v = sc_decode_llr(channel_llrs(y, W).reshape(-1, code.n), mask,
                      known.reshape(-1, code.n), _tie_rng(cfg, rng))
    return v[:, code.R].reshape(y.shape[:-1] + (code.r,))


def default_branch_limit(code: WiretapCode) -> int:
    return 2 ** min(code.X.size, 4)


def sc_decode_branching(code: WiretapCode, y, W: DiscreteChannel,
                        cfg: DecodeConfig = DecodeConfig(),
                        rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Follow both values of every ``X`` bit, keeping the best ``M`` paths; returns ``v_A``."""
    y = np.asarray(y)
    if y.shape[-1] != code.n:
        raise ValueError(f"expected {code.n} channel outputs")
    limit = cfg.branch_limit or default_branch_limit(code)
    branch = np.zeros(code.n, dtype=bool)
    branch[code.X] = True
    v, _ = branching_decode_llr(channel_llrs(y, W).reshape(-1, code.n), code.frozen_mask(),
                                branch, limit, code.frozen_vector(), _tie_rng(cfg, rng))
    return v[:, code.A].reshape(y.shape[:-1] + (code.k,))


def decode(code: WiretapCode, y, W: DiscreteChannel, cfg: DecodeConfig = DecodeConfig(),
           rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Branching decoder for strong codes with a nonempty ``X``, plain SC otherwise."""
    if code.mode == "strong" and code.X.size:
        return sc_decode_branching(code, y, W, cfg, rng)
    return sc_decode(code, y, W, cfg, rng)


def code_digest(code: WiretapCode) -> str:
    return hashlib.sha256(code.to_json().encode()).hexdigest()
