"""Command-line entry point: gen / verify / stats / eval.

Exit codes: 0 success, 1 verification or evaluation failure, 2 usage error.
Reports go to stdout as JSON; every generated dataset gets a sidecar
manifest sufficient to regenerate it bit-exactly.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, diffstats, sampling
from .ciphers import BLOCK_BITS, CipherId, des, present
from .datafmt import DatasetReader
from .errors import (AlignmentError, FormatError, PredictionRangeError,
                     RoundRangeError, ShapeError, TruncationError)
from .evaluator import evaluate_files
from .sampling import DEFAULT_DELTA, GenSpec, group_packed


def _parse_hex(text: str) -> int:
    return int(text, 16) if text.lower().startswith("0x") else int(text, 0)


def _manifest_path(out: str) -> str:
    return out + ".manifest.json"


def _spec_from_args(args) -> GenSpec:
    cipher = CipherId.parse(args.cipher)
    delta = _parse_hex(args.delta) if args.delta else None
    if args.groups is not None:
        group_count = args.groups
    else:
        if args.pairs is None:
            raise ShapeError("provide --groups, or --case with --pairs")
        if args.case == 1:
            group_count, rem = divmod(args.pairs, args.m)
            if rem:
                print(f"warning: {args.pairs} pairs not divisible by m={args.m}; "
                      f"using {group_count} groups", file=sys.stderr)
        else:
            group_count = args.pairs
    return GenSpec(cipher=cipher, rounds=args.rounds, m=args.m,
                   group_count=group_count, seed=args.seed, delta=delta,
                   omega=args.omega, fresh_key_per_group=not args.shared_key)


def cmd_gen(args) -> int:
    spec = _spec_from_args(args)
    summary = sampling.generate_dataset(spec, args.out, threads=args.threads)
    manifest = {
        "tool": "neuraldiff", "version": __version__, "command": "gen",
        "cipher": spec.cipher.value, "rounds": spec.rounds, "m": spec.m,
        "omega": spec.omega, "delta": hex(spec.delta),
        "group_count": spec.group_count, "seed": spec.seed,
        "fresh_key_per_group": spec.fresh_key_per_group,
        "output": args.out, "threads": args.threads,
        "wall_clock_s": summary["seconds"],
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(_manifest_path(args.out), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(json.dumps({
        "output": args.out, "groups": summary["groups"], "pairs": summary["pairs"],
        "positive_fraction": summary["positive_fraction"],
        "groups_per_second": round(summary["groups_per_second"], 1),
    }))
    return 0


def _spec_from_header(reader: DatasetReader, fresh_key: bool) -> GenSpec:
    h = reader.header
    return GenSpec(cipher=h.cipher, rounds=h.rounds, m=h.m,
                   group_count=h.group_count, seed=h.seed, delta=h.delta,
                   omega=h.omega, fresh_key_per_group=fresh_key)


def cmd_verify(args) -> int:
    with DatasetReader(args.data) as reader:
        fresh_key = not args.shared_key
        try:
            with open(_manifest_path(args.data)) as fh:
                fresh_key = bool(json.load(fh).get("fresh_key_per_group", fresh_key))
        except OSError:
            pass
        spec = _spec_from_header(reader, fresh_key)
        n = reader.header.group_count
        if args.full or args.samples >= n:
            indices = list(range(n))
        else:
            pick = np.random.default_rng(args.sample_seed)
            indices = sorted(int(i) for i in
                             pick.choice(n, size=args.samples, replace=False))
        labels = reader.labels()
        for index in indices:
            label, packed = group_packed(spec, index)
            if label != int(labels[index]) or packed != reader.group_packed(index):
                print(json.dumps({"ok": False, "first_mismatch": index,
                                  "checked": len(indices)}))
                return 1
        report = {"ok": True, "checked": len(indices), "groups": n}
        if reader.header.rounds == 0:
            from .sampling import un_arrange
            bad = 0
            positives = 0
            for index in indices:
                if int(labels[index]) != 1:
                    continue
                positives += 1
                pairs = un_arrange(reader.group(index).tensor, reader.header.block_bits)
                if any((c0 ^ c1) != reader.header.delta for c0, c1 in pairs):
                    bad += 1
            report["r0_positive_groups_checked"] = positives
            report["r0_delta_violations"] = bad
            if bad:
                print(json.dumps({**report, "ok": False}))
                return 1
    print(json.dumps(report))
    return 0


def cmd_stats_ddt(args) -> int:
    cipher = CipherId.parse(args.cipher)
    if cipher is CipherId.PRESENT:
        tables = {"present": diffstats.sbox_ddt(present.SBOX)}
    elif cipher is CipherId.DES:
        tables = {f"des_s{i + 1}": diffstats.sbox_ddt(des.SBOX_FLAT[i])
                  for i in range(8)}
    else:
        print("chaskey has no S-box; DDTs apply to des and present", file=sys.stderr)
        return 2
    if args.csv:
        for name, table in tables.items():
            for row in table:
                print(name + "," + ",".join(str(int(v)) for v in row))
    else:
        print(json.dumps({name: table.tolist() for name, table in tables.items()}))
    return 0


def cmd_stats_mcprob(args) -> int:
    cipher = CipherId.parse(args.cipher)
    din = _parse_hex(args.din) if args.din else DEFAULT_DELTA[cipher]
    est = diffstats.mc_transition_prob(cipher, din, _parse_hex(args.dout),
                                       args.rounds, args.trials, args.seed,
                                       threads=args.threads)
    print(json.dumps({"p_hat": est.p_hat, "hits": est.hits, "trials": est.trials,
                      "std_err": est.std_err}))
    return 0


def cmd_stats_rank(args) -> int:
    cipher = CipherId.parse(args.cipher)
    din = _parse_hex(args.din) if args.din else DEFAULT_DELTA[cipher]
    ranked = diffstats.rank_output_diffs(cipher, din, args.rounds, args.trials,
                                         args.seed, args.top, threads=args.threads)
    width = BLOCK_BITS[cipher] // 4
    print(json.dumps([{"diff": f"0x{d:0{width}x}", "count": c} for d, c in ranked]))
    return 0


def cmd_eval(args) -> int:
    report = evaluate_files(args.data, args.pred, args.threshold)
    print(json.dumps(report.to_dict()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="neuraldiff")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a labeled dataset")
    gen.add_argument("--cipher", required=True)
    gen.add_argument("--rounds", type=int, required=True)
    gen.add_argument("--m", type=int, default=1)
    gen.add_argument("--omega", type=int, default=None)
    gen.add_argument("--delta", default=None, help="hex input difference")
    gen.add_argument("--groups", type=int, default=None)
    gen.add_argument("--case", type=int, choices=(1, 2), default=1,
                     help="with --pairs: 1 = pairs/m groups, 2 = pairs groups")
    gen.add_argument("--pairs", type=int, default=None, help="pair budget")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--threads", type=int, default=1)
    gen.add_argument("--shared-key", action="store_true",
                     help="one key for the whole dataset (ablation)")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="re-derive groups and compare bit-exactly")
    ver.add_argument("--data", required=True)
    ver.add_argument("--samples", type=int, default=256)
    ver.add_argument("--full", action="store_true")
    ver.add_argument("--sample-seed", type=int, default=0)
    ver.add_argument("--shared-key", action="store_true")
    ver.set_defaults(func=cmd_verify)

    stats = sub.add_parser("stats", help="classical differential statistics")
    ssub = stats.add_subparsers(dest="stats_command", required=True)
    ddt = ssub.add_parser("ddt")
    ddt.add_argument("--cipher", required=True)
    ddt.add_argument("--csv", action="store_true")
    ddt.set_defaults(func=cmd_stats_ddt)
    mcp = ssub.add_parser("mcprob")
    mcp.add_argument("--cipher", required=True)
    mcp.add_argument("--din", default=None)
    mcp.add_argument("--dout", required=True)
    mcp.add_argument("--rounds", type=int, required=True)
    mcp.add_argument("--trials", type=int, required=True)
    mcp.add_argument("--seed", type=int, default=0)
    mcp.add_argument("--threads", type=int, default=1)
    mcp.set_defaults(func=cmd_stats_mcprob)
    rank = ssub.add_parser("rank")
    rank.add_argument("--cipher", required=True)
    rank.add_argument("--din", default=None)
    rank.add_argument("--rounds", type=int, required=True)
    rank.add_argument("--trials", type=int, required=True)
    rank.add_argument("--top", type=int, default=10)
    rank.add_argument("--seed", type=int, default=0)
    rank.add_argument("--threads", type=int, default=1)
    rank.set_defaults(func=cmd_stats_rank)

    ev = sub.add_parser("eval", help="score predictions against labels")
    ev.add_argument("--data", required=True)
    ev.add_argument("--pred", required=True)
    ev.add_argument("--threshold", type=float, default=0.5)
    ev.set_defaults(func=cmd_eval)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ShapeError, RoundRangeError, FormatError, TruncationError,
            PredictionRangeError, AlignmentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
