"""Command-line interface: construct, encode, decode, simulate, analyze, table.

Exit codes: 0 success, 2 construction refused, 3 I/O problem, 4 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .campaign import (
    TABLE_COLUMNS,
    CampaignSpec,
    build_code,
    code_summary,
    leakage_report,
    rate_table,
    run_campaign,
    table_checks,
)
from .channel import ChannelError, channel_from_config
from .wiretap import (
    ConstructionRefused,
    DecodeConfig,
    WiretapCode,
    decode,
    encode,
)

EXIT_OK, EXIT_REFUSED, EXIT_IO, EXIT_INVALID = 0, 2, 3, 4
log = logging.getLogger("polarwiretap")


def parse_bits(text: str, length: int) -> np.ndarray:
    """Binary string (``0101``) or hex (``0x5``, right-aligned) to a bit vector."""
    text = text.strip().replace("_", "")
    if text.lower().startswith("0x"):
        digits = text[2:]
        if not digits:
            raise ValueError("empty hex string")
        bits = "".join(f"{int(c, 16):04b}" for c in digits)
        if len(bits) < length:
            bits = "0" * (length - len(bits)) + bits
        extra, bits = bits[:len(bits) - length], bits[len(bits) - length:]
        if "1" in extra:
            raise ValueError(f"hex value does not fit in {length} bits")
    else:
        bits = text
    if len(bits) != length or set(bits) - {"0", "1"}:
        raise ValueError(f"expected {length} bits, got {text!r}")
    return np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")


def format_bits(bits) -> str:
    return "".join(str(int(b)) for b in np.asarray(bits).ravel())


def parse_symbols(text: str, W, n: int) -> np.ndarray:
    """Channel outputs as one character per label (``0``, ``1``, ``e``) or comma-separated indices."""
    labels = [str(lab) for lab in W.labels]
    if "," in text:
        y = np.array([int(t) for t in text.split(",")], dtype=np.int64)
    else:
        lookup = {lab: i for i, lab in enumerate(labels)}
        lookup.setdefault("?", lookup.get("e", -1))
        try:
            y = np.array([lookup[c] for c in text.strip()], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"unknown output symbol {exc}") from None
    if y.size != n or y.min() < 0 or y.max() >= W.n_outputs:
        raise ValueError(f"expected {n} symbols from {labels}")
    return y


def _out_dir(path) -> Path:
    p = Path(path or ".")
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    log.info("wrote %s", path)


def _load_spec(args) -> CampaignSpec:
    if not args.spec:
        raise ValueError("--spec is required")
    spec = CampaignSpec.load(args.spec)
    return spec.with_overrides(seed=args.seed, trials=args.trials)


def _load_code(path) -> WiretapCode:
    return WiretapCode.load(path)


def cmd_construct(args) -> int:
    spec = _load_spec(args)
    out = _out_dir(args.out)
    code, bob, eve = build_code(spec)
    bob.save(out / "main_stats.json")
    eve.save(out / "tap_stats.json")
    _write(out / "code.json", code.to_json())
    s = code_summary(code, bob, eve)
    ratio = "undefined" if s["rate_over_cs"] is None else f"{s['rate_over_cs']:.4f}"
    print(f"n={s['n']} k={s['k']} r={s['r']} |X|={s['X']} rate={s['rate']:.6f} "
          f"C_s={s['secrecy_capacity']:.6f} rate/C_s={ratio}")
    for note in code.notes:
        print(f"note: {note}")
    if spec.mode == "strong":
        print("X is empty" if not code.X.size else f"X has {code.X.size} indices")
    if spec.plot and not args.no_plot:
        from .plotting import plot_profile

        plot_profile(bob, eve, code, out / "profile.png")
    return EXIT_OK


def cmd_encode(args) -> int:
    code = _load_code(args.code)
    u = parse_bits(args.message, code.k)
    if args.random is not None:
        e = parse_bits(args.random, code.r)
    else:
        seed = 0 if args.seed is None else args.seed
        e = np.random.default_rng(seed).integers(0, 2, code.r, dtype=np.uint8)
    x = encode(code, u, e)
    text = format_bits(x)
    if args.out:
        _write(Path(args.out), text + "\n")
    print(text)
    return EXIT_OK


def cmd_decode(args) -> int:
    code = _load_code(args.code)
    cfg = code.main_channel if args.channel is None else json.loads(args.channel)
    if cfg is None:
        raise ValueError("code has no main channel; pass --channel")
    W = channel_from_config(cfg)
    y = parse_symbols(args.received, W, code.n)
    seed = 0 if args.seed is None else args.seed
    u = decode(code, y, W, DecodeConfig(seed=seed))
    text = format_bits(u)
    if args.out:
        _write(Path(args.out), text + "\n")
    print(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = _load_spec(args)
    code = _load_code(args.code) if args.code else None
    res = run_campaign(spec, code, threads=args.threads, with_security=args.with_security)
    out = _out_dir(args.out)
    _write(out / "result.json", res.to_json(include_timing=args.timing))
    r = res.reliability
    with open(out / "result.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "k", "r", "X", "rate", "trials", "errors", "bler", "wilson_lo",
                    "wilson_hi", "bound", "seed"])
        c = res.code
        w.writerow([c["n"], c["k"], c["r"], c["X"], c["rate"], r["trials"], r["errors"],
                    r["bler"], r["wilson95"][0], r["wilson95"][1], r["bound"], res.seed])
    print(f"trials={r['trials']} errors={r['errors']} bler={r['bler']:.3e} "
          f"wilson95=[{r['wilson95'][0]:.3e}, {r['wilson95'][1]:.3e}] bound={r['bound']:.3e}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    spec = _load_spec(args)
    code, bob, eve = build_code(spec)
    if args.code:
        code = _load_code(args.code)
    seed = spec.seed
    rep = leakage_report(code, eve, spec.tap_channel, spec.pattern_budget,
                         spec.leakage_samples, seed)
    out = _out_dir(args.out)
    _write(out / "leakage.json", rep.to_json())
    exact = "n/a" if rep.exact_bits is None else f"{rep.exact_bits:.6g}"
    print(f"mode={rep.mode} k={rep.k} bound_bits={rep.bound_bits:.6g} exact_bits={exact}")
    return EXIT_OK


def cmd_table(args) -> int:
    spec = _load_spec(args)
    out = _out_dir(args.out)
    rows = rate_table(spec, threads=args.threads)
    with open(out / "table.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TABLE_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    checks = table_checks(rows)
    _write(out / "table.json", json.dumps({"rows": rows, "checks": checks,
                                           "spec": spec.to_dict()}, sort_keys=True, indent=1))
    for r in rows:
        if r["rate"] is None:
            print(f"p2={r['p2']:<6} {r['status']}")
        else:
            pct = "undefined" if r["rate_over_cs_percent"] is None else f"{r['rate_over_cs_percent']:.1f}%"
            print(f"p2={r['p2']:<6} rate={r['rate']:.4f} C_s={r['secrecy_capacity']:.4f} "
                  f"{pct} |X|={r['X']}")
    if spec.plot and not args.no_plot:
        from .plotting import plot_rate_table

        main_p = spec.main_channel.p if spec.main_channel.kind == "bsc" else None
        plot_rate_table(rows, out / "table.png", main_p if spec.tap_channel.kind == "bsc" else None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="campaign spec (JSON)")
    common.add_argument("--seed", type=int, help="override the spec seed")
    common.add_argument("--trials", type=int, help="override the number of trials")
    common.add_argument("--threads", type=int, default=1, help="worker threads")
    common.add_argument("--out", help="output directory (or file for encode/decode)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="polarwiretap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="build a code and its profiles")
    c.add_argument("--no-plot", action="store_true")
    c.set_defaults(func=cmd_construct)

    e = sub.add_parser("encode", parents=[common], help="encode one message")
    e.add_argument("--code", required=True)
    e.add_argument("--message", required=True, help="k bits, binary or 0x-hex")
    e.add_argument("--random", help="r randomizer bits (default: drawn from --seed)")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", parents=[common], help="decode one received block")
    d.add_argument("--code", required=True)
    d.add_argument("--received", required=True, help="n output symbols")
    d.add_argument("--channel", help="main-channel config JSON (default: from the code)")
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("simulate", parents=[common], help="Monte-Carlo block-error campaign")
    s.add_argument("--code", help="use this code instead of constructing from the spec")
    s.add_argument("--with-security", action="store_true", help="also compute leakage")
    s.add_argument("--timing", action="store_true", help="record wall-clock time in the JSON")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analyze", parents=[common], help="leakage bounds and exact leakage")
    a.add_argument("--code")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("table", parents=[common], help="rate table over a tap-channel sweep")
    t.add_argument("--no-plot", action="store_true")
    t.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except ConstructionRefused as exc:
        print(f"construction refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError, ChannelError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
