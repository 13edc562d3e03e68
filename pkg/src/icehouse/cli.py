"""Command-line front end: generators, exact values, region flags,
sampling, estimation, and the medial cross-check, as reproducible batch
runs with machine-readable output.

Exit codes: 0 success, 1 usage error, 2 invalid instance, 3 size cap
exceeded, 4 sampler timeout.  Every randomized command requires an
explicit --seed; there is no wall-clock seeding anywhere.  Output is
byte-identical for identical configuration and seed, except for the
wall_clock_seconds field of estimate reports.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .estimator import estimate_Z
from .exact import SizeCapError, Weights, classify_region, enumerate_Z
from .holant import GRID_EDGE_CAP, holant_eval, incidence_grid
from .quadgraph import InstanceError, QuadGraph, load_graph, random_quad_graph, serialize, torus_grid
from .tutte import (
    PlaneGraphError,
    golden_suite,
    load_plane_graph,
    tutte_crosscheck,
)
from .worm import ChainParams, InfeasiblePinsError, SamplerTimeout, sample

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BAD_INSTANCE = 2
EXIT_SIZE_CAP = 3
EXIT_TIMEOUT = 4

log = logging.getLogger("icehouse.cli")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; we want 1
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="icehouse", description=__doc__)
    parser.add_argument("--version", action="version", version=f"icehouse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_instance_flags(p):
        p.add_argument("--instance", help="instance file path")
        p.add_argument("--torus", nargs=2, type=int, metavar=("N", "M"))
        p.add_argument("--random", type=int, metavar="N", help="random instance on N vertices")

    def add_common(p):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("gen", help="write an instance file")
    add_instance_flags(p)
    add_common(p)

    p = sub.add_parser("exact", help="exact total weight with cross-check")
    add_instance_flags(p)
    p.add_argument("--weights", nargs=3, type=float, metavar=("A", "B", "C"), required=True)
    add_common(p)

    p = sub.add_parser("classify", help="weight-region membership flags")
    p.add_argument("--weights", nargs=3, type=float, metavar=("A", "B", "C"), required=True)
    add_common(p)

    p = sub.add_parser("sample", help="draw valid orientations by Markov chain")
    add_instance_flags(p)
    p.add_argument("--weights", nargs=3, type=float, metavar=("A", "B", "C"), required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--thin", type=int, default=None)
    p.add_argument("--lam", type=float, default=None, help="defect fugacity (default max weight)")
    p.add_argument("--laziness", type=float, default=0.5)
    add_common(p)

    p = sub.add_parser("estimate", help="sampling-based estimate of the total weight")
    add_instance_flags(p)
    p.add_argument("--weights", nargs=3, type=float, metavar=("A", "B", "C"), required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--confidence", type=float, default=0.75)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--laziness", type=float, default=0.5)
    add_common(p)

    p = sub.add_parser("tutte-check", help="medial-graph correspondence table")
    p.add_argument("--plane", help="plane-graph file; default: built-in suite")
    add_common(p)

    return parser


def _resolve_graph(args) -> QuadGraph:
    picked = [x for x in ("instance", "torus", "random") if getattr(args, x, None) is not None]
    if len(picked) != 1:
        raise UsageError("exactly one of --instance / --torus / --random is required")
    if args.instance is not None:
        try:
            with open(args.instance) as fh:
                return load_graph(fh.read())
        except OSError as exc:
            raise InstanceError(f"cannot read {args.instance}: {exc}") from exc
    if args.torus is not None:
        return torus_grid(args.torus[0], args.torus[1])
    if args.seed is None:
        raise UsageError("--random requires --seed")
    return random_quad_graph(args.random, args.seed)


def _weights(args) -> Weights:
    a, b, c = args.weights
    return Weights(a, b, c)


def _region_dict(w: Weights) -> dict:
    r = classify_region(w)
    return {
        "F_le2": r.in_F_le2,
        "F_le": r.in_F_le,
        "F_eq": r.in_F_eq,
        "F_gt": r.in_F_gt,
    }


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _instance_hash(graph: QuadGraph) -> str:
    return hashlib.sha256(serialize(graph).encode()).hexdigest()


# -- commands ---------------------------------------------------------------


def cmd_gen(args) -> int:
    graph = _resolve_graph(args)
    _emit(args, serialize(graph) + "\n")
    return EXIT_OK


def cmd_exact(args) -> int:
    graph = _resolve_graph(args)
    w = _weights(args)
    z = enumerate_Z(graph, w)
    payload = {
        "command": "exact",
        "instance_sha256": _instance_hash(graph),
        "weights": list(args.weights),
        "region": _region_dict(w),
        "Z": z,
        "oracle": "enumeration",
    }
    if graph.num_darts <= GRID_EDGE_CAP:
        z2 = holant_eval(incidence_grid(graph, w))
        gap = abs(z - z2) / max(1.0, abs(z))
        payload["crosscheck"] = {
            "oracle": "holant",
            "value": z2,
            "relative_gap": gap,
            "status": "ok" if gap <= 1e-9 else "mismatch",
        }
    else:
        payload["crosscheck"] = {"status": "skipped", "reason": "grid above size cap"}
    _emit(args, _json(payload))
    return EXIT_OK


def cmd_classify(args) -> int:
    w = _weights(args)
    _emit(args, _json({"command": "classify", "weights": list(args.weights), "region": _region_dict(w)}))
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.seed is None:
        raise UsageError("sample requires --seed")
    graph = _resolve_graph(args)
    w = _weights(args)
    ne = graph.num_edges
    burn_in = args.burn_in if args.burn_in is not None else 100 * ne * ne
    thin = args.thin if args.thin is not None else 10 * ne
    params = ChainParams(lam=args.lam, laziness=args.laziness, seed=args.seed)
    orientations = sample(graph, w, None, params, burn_in, thin, args.count)
    rows = [o.dart_bits for o in orientations]
    if args.format == "csv":
        header = ",".join(f"dart_{d}" for d in range(graph.num_darts))
        body = "\n".join(",".join(str(b) for b in row) for row in rows)
        _emit(args, header + "\n" + body + "\n")
    else:
        _emit(
            args,
            _json(
                {
                    "command": "sample",
                    "instance_sha256": _instance_hash(graph),
                    "weights": list(args.weights),
                    "seed": args.seed,
                    "samples": [list(row) for row in rows],
                }
            ),
        )
    return EXIT_OK


def cmd_estimate(args) -> int:
    if args.seed is None:
        raise UsageError("estimate requires --seed")
    graph = _resolve_graph(args)
    w = _weights(args)
    region = _region_dict(w)
    if not region["F_le2"]:
        print(
            "warning: weights lie outside the squared-triangle region, so "
            "this estimate carries no accuracy promise; the region flags "
            "are included in the report",
            file=sys.stderr,
        )
    params = ChainParams(lam=args.lam, laziness=args.laziness, seed=args.seed)
    t0 = time.perf_counter()
    est = estimate_Z(
        graph,
        w,
        args.epsilon,
        args.confidence,
        params,
        np.random.default_rng(args.seed),
        threads=args.threads,
    )
    wall = time.perf_counter() - t0
    payload = {
        "command": "estimate",
        "instance_sha256": _instance_hash(graph),
        "weights": list(args.weights),
        "region": region,
        "epsilon": args.epsilon,
        "confidence": args.confidence,
        "seed": args.seed,
        "estimate": est.value,
        "samples_used": est.samples_used,
        "stages": [[e, d, m] for e, d, m in est.per_edge_log],
        "wall_clock_seconds": wall,
    }
    _emit(args, _json(payload))
    return EXIT_OK


def cmd_tutte_check(args) -> int:
    if args.plane:
        try:
            with open(args.plane) as fh:
                suite = [(os.path.basename(args.plane), load_plane_graph(fh.read()))]
        except OSError as exc:
            raise PlaneGraphError(f"cannot read {args.plane}: {exc}") from exc
    else:
        suite = golden_suite()
    rows = [tutte_crosscheck(pg, name) for name, pg in suite]
    if args.format == "csv":
        lines = ["name,z_medial,tutte_33,ratio"]
        lines += [f"{r.name},{r.z_medial},{r.tutte_33},{r.ratio}" for r in rows]
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(
            args,
            _json(
                {
                    "command": "tutte-check",
                    "rows": [
                        {
                            "name": r.name,
                            "z_medial": r.z_medial,
                            "tutte_33": r.tutte_33,
                            "ratio": r.ratio,
                        }
                        for r in rows
                    ],
                }
            ),
        )
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "exact": cmd_exact,
    "classify": cmd_classify,
    "sample": cmd_sample,
    "estimate": cmd_estimate,
    "tutte-check": cmd_tutte_check,
}


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("ICEHOUSE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceError, PlaneGraphError, InfeasiblePinsError) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_BAD_INSTANCE
    except SizeCapError as exc:
        print(f"size cap exceeded: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except SamplerTimeout as exc:
        print(f"sampler timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT


if __name__ == "__main__":
    sys.exit(main())
