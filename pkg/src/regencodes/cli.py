"""Command-line front end: ``regencodes <command> ...``.

Every command works on a store directory given by ``--out-dir``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import storage
from .errors import RegenError


def _node_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regencodes", description="Regenerating-code storage simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def store_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out-dir", required=True, type=Path, help="store directory")

    p = sub.add_parser("encode", help="stripe and encode a file into a new store")
    p.add_argument("file", type=Path)
    p.add_argument("--family", choices=storage.FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, default=257)
    store_arg(p)

    p = sub.add_parser("fail", help="delete a node's chunk")
    p.add_argument("node", type=int)
    store_arg(p)

    p = sub.add_parser("repair", help="regenerate a failed node")
    p.add_argument("node", type=int)
    p.add_argument("--helpers", type=_node_list, default=None)
    p.add_argument("--verify", action="store_true", help="check k-subsets decode after the repair")
    store_arg(p)

    p = sub.add_parser("reconstruct", help="decode the original file from k nodes")
    p.add_argument("--nodes", type=_node_list, default=None)
    p.add_argument("--out", type=Path, required=True)
    store_arg(p)

    p = sub.add_parser("stats", help="repair bandwidth totals")
    store_arg(p)

    p = sub.add_parser("verify", help="decode from k-subsets of surviving nodes")
    p.add_argument("--seed", type=int, default=0, help="seed for subset sampling")
    store_arg(p)
    return parser


def _print_stats(s: dict) -> None:
    print(f"family={s['family']} n={s['n']} k={s['k']} d={s['d']} alpha={s['alpha']} B={s['B']} stripes={s['stripes']}")
    print(f"repairs: {s['repairs']} ({s['optimal_repairs']} optimal, {s['fallback_repairs']} fallback)")
    for e in s["events"]:
        print(f"  node {e['node']}: {e['per_stripe']} vs {e['baseline_per_stripe']} symbols/stripe ({e['mode']})")
    print(f"total repair download: {s['repair_symbols']} symbols (naive baseline {s['baseline_symbols']})")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "encode":
            m = storage.encode_file(args.file, args.out_dir, args.family, args.n, args.k, args.q)
            print(f"encoded {m.original_length} bytes into {m.stripe_count} stripes of B={m.B} "
                  f"over {m.n} nodes ({args.out_dir})")
        elif args.command == "fail":
            storage.fail_node(args.out_dir, args.node)
            print(f"node {args.node} failed")
        elif args.command == "repair":
            rec = storage.repair_node(args.out_dir, args.node, args.helpers, verify=args.verify)
            print(f"repaired node {rec['node']} from {rec['helpers']} ({rec['mode']}): "
                  f"{rec['symbols_per_stripe']} symbols/stripe, {rec['symbols_downloaded']} total")
            if args.verify:
                print(f"verified {rec['verified_subsets']} k-subsets")
        elif args.command == "reconstruct":
            data = storage.reconstruct_file(args.out_dir, args.out, args.nodes)
            print(f"wrote {len(data)} bytes to {args.out}")
        elif args.command == "stats":
            _print_stats(storage.stats(args.out_dir))
        elif args.command == "verify":
            print(json.dumps(storage.verify_store(args.out_dir, args.seed)))
    except (RegenError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
