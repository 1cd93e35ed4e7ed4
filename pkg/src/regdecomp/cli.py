"""Command-line interface: ``regdecomp <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .core import DEFAULT_EPSILON_FLOOR, RDConfig
from .experiments import (cmd_decompose, cmd_generate, cmd_summarize,
                          cmd_sweep_refs, cmd_theory)

logger = logging.getLogger("regdecomp")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _emit(obj: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(obj, indent=2, sort_keys=True, default=str))
    else:
        print("key,value")
        for key in sorted(obj):
            val = obj[key]
            print(f"{key},{json.dumps(val, default=str) if isinstance(val, (dict, list)) else val}")


def _rd_config(args) -> RDConfig:
    return RDConfig(k=args.k or 1, s_max=args.restarts, t_max=args.iters,
                    epsilon_floor=args.epsilon_floor,
                    early_stop=not args.no_early_stop)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="RNG seed (u64)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="format of the record printed to stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    rd = argparse.ArgumentParser(add_help=False)
    rd.add_argument("--restarts", type=int, default=100, help="restarts (s_max)")
    rd.add_argument("--iters", type=int, default=30, help="updates per restart (t_max)")
    rd.add_argument("--epsilon-floor", type=float, default=DEFAULT_EPSILON_FLOOR)
    rd.add_argument("--no-early-stop", action="store_true",
                    help="always run all --iters updates")
    rd.add_argument("--jobs", type=int, default=None, help="threads for restarts")
    rd.add_argument("--directed", action="store_true",
                    help="read the edge list as directed (strong component)")

    parser = argparse.ArgumentParser(
        prog="regdecomp",
        description="Regular decomposition of graphs from shortest-path distances.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a random graph")
    p.add_argument("--model", choices=("planted", "sbm", "pa"), required=True)
    p.add_argument("--n", type=int, help="node count (planted, pa)")
    p.add_argument("--a", type=float, help="planted intra-block degree parameter")
    p.add_argument("--b", type=float, help="planted inter-block degree parameter")
    p.add_argument("--sizes", type=_int_list, help="sbm block sizes, e.g. 500,500")
    p.add_argument("--probs", type=json.loads,
                   help="sbm link probabilities as a JSON matrix")
    p.add_argument("--links", type=int, default=3, help="pa links per arriving node")

    p = sub.add_parser("decompose", parents=[common, rd],
                       help="partition a graph's giant component")
    p.add_argument("graph", help="edge-list file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=int, help="number of groups")
    g.add_argument("--k-max", type=int, help="select k by the knee of L(1..k_max)")
    p.add_argument("--refs", default="all",
                   help="all | uniform:<m> | betweenness:<pairs>,<m> | file:<path>")
    p.add_argument("--targets", default="all",
                   help="all | sample:<n> | file:<path>")
    p.add_argument("--expand", action="store_true",
                   help="extend labels to neighbours of labeled nodes")
    p.add_argument("--no-classify", action="store_true",
                   help="label only the targets, skip out-of-sample classification")
    p.add_argument("--tau", type=float, default=0.02, help="knee threshold")
    p.add_argument("--truth", help="node_id,group CSV to score against")

    p = sub.add_parser("sweep-refs", parents=[common, rd],
                       help="error vs. number of uniform references")
    p.add_argument("graph")
    p.add_argument("labels", help="ground-truth node_id,group CSV")
    p.add_argument("--m-list", type=_int_list, default=[50, 100, 200, 400])
    p.add_argument("--target-sizes", type=_int_list, default=[100, 200, 300, 400])
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--k", type=int, help="groups (default: number of true groups)")

    p = sub.add_parser("summarize", parents=[common],
                       help="group sizes and link densities of a labeling")
    p.add_argument("graph")
    p.add_argument("labels")
    p.add_argument("--directed", action="store_true")

    p = sub.add_parser("theory", parents=[common],
                       help="planted-partition distance predictions")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--n", type=float, default=10_000)
    return parser


def run(args) -> None:
    if args.command == "generate":
        if args.model == "sbm":
            params = {"sizes": args.sizes, "probs": args.probs}
        elif args.model == "planted":
            params = {"n": args.n, "a": args.a, "b": args.b}
        else:
            params = {"n": args.n, "links": args.links}
        missing = [k for k, v in params.items() if v is None]
        if missing:
            raise ValueError(f"--model {args.model} needs "
                             + ", ".join(f"--{k}" for k in missing))
        _emit(cmd_generate(args.model, params, args.seed, args.out).to_dict(), args.format)
    elif args.command == "decompose":
        k = None if args.k_max else (args.k or 2)
        record = cmd_decompose(
            args.graph, args.out, k=k, k_max=args.k_max, refs=args.refs,
            targets=args.targets, config=_rd_config(args), seed=args.seed,
            directed=args.directed, expand=args.expand,
            classify_rest=not args.no_classify, tau=args.tau,
            truth_path=args.truth, n_jobs=args.jobs)
        _emit(record.to_dict(), args.format)
    elif args.command == "sweep-refs":
        record = cmd_sweep_refs(
            args.graph, args.labels, args.out, m_list=args.m_list,
            target_sizes=args.target_sizes, trials=args.trials, seed=args.seed,
            k=args.k, config=_rd_config(args), directed=args.directed,
            n_jobs=args.jobs)
        _emit(record.to_dict(), args.format)
    elif args.command == "summarize":
        summary, _ = cmd_summarize(args.graph, args.labels, args.out,
                                   directed=args.directed)
        _emit(summary.to_dict(), args.format)
    elif args.command == "theory":
        _emit(cmd_theory(args.a, args.b, args.n), args.format)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"regdecomp {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
