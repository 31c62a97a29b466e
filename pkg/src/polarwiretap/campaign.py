"""Campaign specs, seeded Monte-Carlo simulation and the rate table sweep.

Randomness is split per batch: batch ``b`` of a campaign seeded with ``s``
draws from ``SeedSequence([s, b])`` with independent child streams for the
message, the randomizer bits, the channel noise and decoder ties.  Batches
have a fixed size, so results do not depend on how many worker threads
process them.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.stats import binomtest

from .channel import ChannelParams, DiscreteChannel, secrecy_capacity
from .construction import (
    BitChannelStats,
    QuantizationConfig,
    bec_evolve,
    de_bounds,
    sum_z,
)
from .decoder import branching_decode_llr, sc_decode_llr
from .security import (
    LeakageReport,
    attach_exact,
    strong_leakage_bound,
    weak_leakage_bound,
)
from .wiretap import (
    ConstructionRefused,
    DecodeConfig,
    WiretapCode,
    assemble,
    build_strong,
    build_weak,
    channel_llrs,
    default_branch_limit,
    reliability_bound,
)
from .transform import polar_encode

STREAMS = ("message", "random", "noise", "ties")


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class CampaignSpec:
    main_channel: ChannelParams
    tap_channel: ChannelParams
    m: int
    beta: float = 0.3
    mode: str = "weak"
    delta_log2: Optional[float] = None
    decoder: DecodeConfig = DecodeConfig()
    trials: int = 1000
    seed: int = 0
    message: str = "uniform"  # "uniform" | "fixed"
    receiver: str = "main"  # "main" | "tap-genie"
    batch_size: int = 2000
    mu: int = 128
    pattern_budget: int = 1 << 16
    leakage_samples: int = 100_000
    sweep: tuple = ()  # tap-channel parameters for the table
    plot: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise SpecError("trials must be at least 1")
        if self.m < 0 or self.m > 24:
            raise SpecError("m must lie in [0, 24]")
        if not 0 < self.beta < 0.5:
            raise SpecError("beta must lie in (0, 1/2)")
        if self.mode not in ("weak", "strong"):
            raise SpecError(f"unknown mode {self.mode!r}")
        if self.message not in ("uniform", "fixed"):
            raise SpecError(f"unknown message distribution {self.message!r}")
        if self.receiver not in ("main", "tap-genie"):
            raise SpecError(f"unknown receiver {self.receiver!r}")
        if self.batch_size < 1:
            raise SpecError("batch_size must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignSpec":
        d = dict(d)
        if "seed" not in d:
            raise SpecError("spec must contain a seed")
        try:
            main = ChannelParams.from_config(d.pop("main_channel"))
            tap = ChannelParams.from_config(d.pop("tap_channel"))
        except KeyError as exc:
            raise SpecError(f"missing field {exc}") from None
        dec = d.pop("decoder", None) or {}
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise SpecError(f"unknown spec fields: {sorted(extra)}")
        if "sweep" in d:
            d["sweep"] = tuple(float(p) for p in d["sweep"])
        return cls(main_channel=main, tap_channel=tap, decoder=DecodeConfig(**dec), **d)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["main_channel"] = self.main_channel.to_config()
        out["tap_channel"] = self.tap_channel.to_config()
        out["sweep"] = list(self.sweep)
        return out

    @classmethod
    def load(cls, path) -> "CampaignSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def with_overrides(self, **kw) -> "CampaignSpec":
        vals = {k: v for k, v in kw.items() if v is not None}
        if not vals:
            return self
        d = asdict(self)
        d.update(main_channel=self.main_channel, tap_channel=self.tap_channel,
                 decoder=self.decoder, **vals)
        return CampaignSpec(**d)

    @property
    def n(self) -> int:
        return 1 << self.m


# ---------------------------------------------------------------------------
# construction


def build_stats(params: ChannelParams, m: int, mu: int) -> BitChannelStats:
    W = params.build()
    if params.kind == "bec":
        return bec_evolve(params.eps, m)
    return de_bounds(W, m, QuantizationConfig(mu=mu))


def build_code(spec: CampaignSpec, bob: Optional[BitChannelStats] = None,
               eve: Optional[BitChannelStats] = None):
    """Profiles for both channels and the resulting code (may raise ConstructionRefused)."""
    bob = bob or build_stats(spec.main_channel, spec.m, spec.mu)
    eve = eve or build_stats(spec.tap_channel, spec.m, spec.mu)
    if spec.mode == "weak":
        code = build_weak(bob, eve, spec.beta)
    else:
        code = build_strong(bob, eve, spec.beta, spec.delta_log2)
    return code, bob, eve


def code_summary(code: WiretapCode, bob: BitChannelStats, eve: BitChannelStats) -> dict:
    cs = bob.base_capacity - eve.base_capacity
    ratio = code.rate / cs if cs > 0 else None
    return {"n": code.n, "k": code.k, "r": code.r, "X": int(code.X.size),
            "B": int(code.B.size), "rate": code.rate, "secrecy_capacity": cs,
            "rate_over_cs": ratio, "mode": code.mode, "beta": code.beta,
            "delta_log2": code.delta_log2, "notes": list(code.notes)}


# ---------------------------------------------------------------------------
# simulation


def wilson_interval(errors: int, trials: int, level: float = 0.95):
    ci = binomtest(errors, trials).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def batch_streams(seed: int, batch: int) -> dict:
    children = np.random.SeedSequence([seed, batch]).spawn(len(STREAMS))
    return {name: np.random.default_rng(c) for name, c in zip(STREAMS, children)}


def fixed_message(code: WiretapCode, seed: int) -> np.ndarray:
    return np.random.default_rng([seed, 0xF1]).integers(0, 2, code.k, dtype=np.uint8)


def _run_batch(code: WiretapCode, W: DiscreteChannel, spec: CampaignSpec, b: int, size: int,
               fixed_u: Optional[np.ndarray]) -> np.ndarray:
    """Per-trial block-error flags for batch ``b``."""
    rngs = batch_streams(spec.seed, b)
    u = rngs["message"].integers(0, 2, (size, code.k), dtype=np.uint8)
    if fixed_u is not None:
        u = np.broadcast_to(fixed_u, (size, code.k))
    e = rngs["random"].integers(0, 2, (size, code.r), dtype=np.uint8)
    v = assemble(code, u, e)
    y = W.sample(polar_encode(v), rngs["noise"])
    L = channel_llrs(y, W)
    ties = rngs["ties"] if spec.decoder.tie_break == "random" else None
    if spec.receiver == "tap-genie":
        mask = np.ones(code.n, dtype=bool)
        mask[code.R] = False
        vh = sc_decode_llr(L, mask, v, ties)
        return np.any(vh[:, code.R] != v[:, code.R], axis=1)
    if code.mode == "strong" and code.X.size:
        branch = np.zeros(code.n, dtype=bool)
        branch[code.X] = True
        limit = spec.decoder.branch_limit or default_branch_limit(code)
        vh, _ = branching_decode_llr(L, code.frozen_mask(), branch, limit,
                                     code.frozen_vector(), ties)
    else:
        vh = sc_decode_llr(L, code.frozen_mask(), code.frozen_vector(), ties)
    return np.any(vh[:, code.A] != u, axis=1)


def trial_errors(code: WiretapCode, W: DiscreteChannel, spec: CampaignSpec,
                 threads: int = 1) -> np.ndarray:
    """Block-error flag of every trial, in trial order."""
    sizes = []
    left = spec.trials
    while left > 0:
        sizes.append(min(spec.batch_size, left))
        left -= sizes[-1]
    fixed_u = fixed_message(code, spec.seed) if spec.message == "fixed" else None

    def job(b):
        return _run_batch(code, W, spec, b, sizes[b], fixed_u)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flags = list(pool.map(job, range(len(sizes))))
    else:
        flags = [job(b) for b in range(len(sizes))]
    return np.concatenate(flags)


def simulate(code: WiretapCode, W: DiscreteChannel, spec: CampaignSpec,
             threads: int = 1) -> tuple:
    """Run ``spec.trials`` encode-channel-decode trials; returns ``(errors, per_batch)``."""
    flags = trial_errors(code, W, spec, threads)
    per_batch = [int(flags[i:i + spec.batch_size].sum())
                 for i in range(0, flags.size, spec.batch_size)]
    return int(flags.sum()), per_batch


@dataclass
class CampaignResult:
    code: dict
    reliability: dict
    security: Optional[dict]
    seed: int
    spec: dict
    wall_clock: Optional[float] = None

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {"code": self.code, "reliability": self.reliability, "security": self.security,
             "seed": self.seed, "spec": self.spec}
        if include_timing:
            d["wall_clock_seconds"] = self.wall_clock
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=1)


def analytic_bound(code: WiretapCode, spec: CampaignSpec, bob: BitChannelStats,
                   eve: BitChannelStats) -> tuple:
    if spec.receiver == "tap-genie":
        return sum_z(eve, code.R, upper=True), "sum of z_hi over R on the tap channel"
    if code.mode == "strong":
        return reliability_bound(code, bob), "sum of z_hi over A, Y and X on the main channel"
    return reliability_bound(code, bob), "sum of z_hi over A and R on the main channel"


def leakage_report(code: WiretapCode, eve: BitChannelStats, tap: ChannelParams,
                   pattern_budget: int = 1 << 16, samples: int = 100_000,
                   seed: int = 0) -> LeakageReport:
    rep = weak_leakage_bound(code, eve) if code.mode == "weak" else strong_leakage_bound(code, eve)
    if tap.kind == "bec" and code.n <= 1 << 12:
        attach_exact(rep, code, tap.eps, pattern_budget=pattern_budget, samples=samples, seed=seed)
    return rep


def run_campaign(spec: CampaignSpec, code: Optional[WiretapCode] = None,
                 threads: int = 1, with_security: bool = False) -> CampaignResult:
    t0 = time.perf_counter()
    built, bob, eve = build_code(spec)
    code = code or built
    if code.n != spec.n:
        raise SpecError(f"code length {code.n} does not match spec length {spec.n}")
    W = (spec.tap_channel if spec.receiver == "tap-genie" else spec.main_channel).build()
    errors, per_batch = simulate(code, W, spec, threads)
    lo, hi = wilson_interval(errors, spec.trials)
    bound, kind = analytic_bound(code, spec, bob, eve)
    rel = {"trials": spec.trials, "errors": errors, "bler": errors / spec.trials,
           "wilson95": [lo, hi], "bound": bound, "bound_kind": kind,
           "consistent_with_bound": lo <= bound, "batch_errors": per_batch,
           "receiver": spec.receiver, "message": spec.message}
    sec = None
    if with_security:
        sec = leakage_report(code, eve, spec.tap_channel, spec.pattern_budget,
                             spec.leakage_samples, spec.seed).to_dict()
    return CampaignResult(code=code_summary(code, bob, eve), reliability=rel, security=sec,
                          seed=spec.seed, spec=spec.to_dict(),
                          wall_clock=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# rate table


TABLE_COLUMNS = ("p2", "rate", "secrecy_capacity", "rate_over_cs_percent", "X", "k", "status")


def _tap_params(base: ChannelParams, value: float) -> ChannelParams:
    if base.kind == "bsc":
        return ChannelParams("bsc", p=value)
    if base.kind == "bec":
        return ChannelParams("bec", eps=value)
    raise SpecError("a sweep needs a BSC or BEC tap channel")


def rate_table(spec: CampaignSpec, threads: int = 1, bob: Optional[BitChannelStats] = None) -> list:
    """One row per swept tap parameter, sorted by decreasing parameter."""
    if not spec.sweep:
        raise SpecError("table needs a nonempty sweep of tap-channel parameters")
    bob = bob or build_stats(spec.main_channel, spec.m, spec.mu)
    main = spec.main_channel.build()

    def row(p2):
        try:
            tap = _tap_params(spec.tap_channel, p2)
            eve = build_stats(tap, spec.m, spec.mu)
            if spec.mode == "weak":
                code = build_weak(bob, eve, spec.beta)
            else:
                code = build_strong(bob, eve, spec.beta, spec.delta_log2)
            cs = secrecy_capacity(main, tap.build())
            ratio = 100.0 * code.rate / cs if cs > 0 else None
            status = "ok" if cs > 0 else "zero secrecy capacity"
            return {"p2": p2, "rate": code.rate, "secrecy_capacity": cs,
                    "rate_over_cs_percent": ratio, "X": int(code.X.size), "k": code.k,
                    "status": status}
        except (ValueError, ConstructionRefused) as exc:
            return {"p2": p2, "rate": None, "secrecy_capacity": None,
                    "rate_over_cs_percent": None, "X": None, "k": None,
                    "status": f"error: {exc}"}

    values = sorted(set(spec.sweep), reverse=True)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(row, values))
    return [row(p) for p in values]


def table_checks(rows: list) -> dict:
    ok = [r for r in rows if r["rate"] is not None]
    rates = [r["rate"] for r in ok]
    return {
        "monotone_in_p2": all(a >= b for a, b in zip(rates, rates[1:])),
        "rate_below_cs": all(r["rate"] <= r["secrecy_capacity"] + 1e-12 for r in ok),
        "rows_with_nonempty_X": [r["p2"] for r in ok if r["X"]],
    }
