"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 solver fallback with warning,
3 internal assertion failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import binary, io, oracle, region
from .classify import TAU_CLASS, PreconditionError, classify
from .channel import ChannelError, capacity, channel_to_dict, load_channel, make_standard
from .probability import PmfError

EXIT_OK, EXIT_INPUT, EXIT_FALLBACK, EXIT_ASSERT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _add_source(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--bsc-bec", nargs=2, type=float, metavar=("EPS", "ALPHA"))
    g.add_argument("--bec-bsc", nargs=2, type=float, metavar=("ALPHA", "EPS"))
    g.add_argument("--bsc-bsc", nargs=2, type=float, metavar=("EPS_B", "EPS_E"))
    g.add_argument("--sec53", nargs=3, type=float, metavar=("P", "Q", "EPS"))
    g.add_argument("--vandijk", nargs=3, type=float, metavar=("P", "Q", "R"))
    g.add_argument("--file", type=Path, help="channel JSON with 'main' and 'eavesdropper'")
    p.add_argument("--dump", type=Path, help="also write the channel as JSON")
    p.add_argument("--tolerance", type=float, default=None,
                   help="classification sign tolerance (default 1e-8)")
    p.add_argument("--seed", type=int, default=0)


def _channel(args):
    for flag, kind in (("bsc_bec", "bsc_bec"), ("bec_bsc", "bec_bsc"), ("bsc_bsc", "bsc_bsc"),
                       ("sec53", "sec53"), ("vandijk", "vandijk")):
        vals = getattr(args, flag)
        if vals is not None:
            w = make_standard(kind, *vals)
            break
    else:
        w = load_channel(args.file)
    if args.dump:
        args.dump.parent.mkdir(parents=True, exist_ok=True)
        # full precision so the dump re-parses to the identical matrices
        args.dump.write_text(json.dumps(channel_to_dict(w), indent=2))
    return w


def _report(w, args):
    tol = args.tolerance if args.tolerance is not None else TAU_CLASS
    return classify(w, tol, seed=args.seed)


def _mu_grid(args):
    if args.mu is not None:
        grid = np.array(sorted(float(t) for t in args.mu.split(",")))
        if np.any(grid < 0):
            raise InputError("mu values must be non-negative")
        return grid
    return region.default_mu_grid(args.mu_count, args.mu_max)


def cmd_classify(args):
    w = _channel(args)
    rep = _report(w, args)
    out = rep.to_dict()
    out["channel"] = w.name or str(args.file)
    cs, _ = region.secrecy_capacity(w, rep)
    out["C_s"] = cs
    print(io.dumps(out))
    return EXIT_OK


def cmd_capacity(args):
    w = _channel(args)
    out = {}
    for key, ch in (("C_B", w.main), ("C_E", w.eavesdropper)):
        c, px = capacity(ch)
        out[key] = c
        out[key + "_input"] = px
    print(io.dumps(out))
    return EXIT_OK


def cmd_secrecy(args):
    w = _channel(args)
    rep = _report(w, args)
    cs, chain = region.secrecy_capacity(w, rep)
    print(io.dumps({"C_s": cs, "upper_bound": region.secrecy_upper_bound(w, rep),
                    "chain": chain.to_dict()}))
    return EXIT_OK


def cmd_region(args):
    w = _channel(args)
    rep = _report(w, args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", region.FallbackWarning)
        bd = region.trace_region(w, _mu_grid(args), threads=args.threads, report=rep)
    for c in caught:
        print(f"warning: {c.message}", file=sys.stderr)
    csv_path, json_path = io.write_region(bd, args.output, args.stem)
    io.validate_region_rows(io.read_csv(csv_path, io.REGION_HEADER), w.C_B)
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_FALLBACK if bd.fallback else EXIT_OK


def cmd_curve(args):
    w = _channel(args)
    if w.in_dim != 2:
        raise InputError("curve export needs a binary input alphabet")
    res = 1.0 / args.grid_resolution if args.grid_resolution else binary.H_GRID
    sample = binary.sample_curve(w, args.mu, res)
    path = io.write_curve(sample, args.output)
    io.validate_curve_rows(io.read_csv(path, io.CURVE_HEADER))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_oracle(args):
    w = _channel(args)
    if args.card_u:
        val, chain, res = oracle.brute_chain(w, args.mu, args.card_u, args.card_v,
                                             args.grid_resolution or 8)
        extra = {"chain": chain.to_dict()}
    else:
        val, cfg, res = oracle.brute_binary(w, args.mu, args.grid_resolution or 400)
        extra = {"config": cfg.to_dict()}
    print(io.dumps({"value": val, "lipschitz": res.lipschitz, "error_bound": res.error_bound,
                    "evaluations": res.evaluations, **extra}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wiretap", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="place the channel in the class hierarchy")
    _add_source(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("capacity", help="C_B and C_E")
    _add_source(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("secrecy", help="secrecy capacity and achieving prefix")
    _add_source(p)
    p.set_defaults(func=cmd_secrecy)

    p = sub.add_parser("region", help="trace the rate-equivocation boundary")
    _add_source(p)
    p.add_argument("-o", "--output", type=Path, required=True, help="output directory")
    p.add_argument("--stem", default="region")
    p.add_argument("--mu", help="explicit comma-separated slopes")
    p.add_argument("--mu-count", type=int, default=region.MU_COUNT)
    p.add_argument("--mu-max", type=float, default=region.MU_MAX)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("curve", help="export f and f_mu samples (binary input)")
    _add_source(p)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("-o", "--output", type=Path, default=Path("curve.csv"))
    p.add_argument("--grid-resolution", type=int, default=None,
                   help="grid intervals on [0, 1] (default 10000)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("oracle")
    _add_source(p)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--grid-resolution", type=int, default=None)
    p.add_argument("--card-u", type=int, default=0)
    p.add_argument("--card-v", type=int, default=4)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, ChannelError, PmfError, binary.BinaryError, oracle.ResourceCapError,
            PreconditionError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
