"""Command-line entry point: ``ardecomp <command> [options]``.

Commands
--------
decompose   complete + split a network, write embeddings.csv and report.json
metrics     heterophily and repel-space neighbours from an embeddings file
bcv         bi-cross-validated rank choice, write bcv.csv, print k
benchmark   error-vs-rank curves for several completion strategies
generate    write a synthetic network to a file
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from typing import Optional

import numpy as np

from . import __version__
from .complete import SvtOptions, normalize_strategy
from .errors import ARError, MalformedFile, UnknownNode
from .metrics import (
    embedding_heterophily,
    network_heterophily,
    node_heterophily,
    repel_neighbors,
)
from .netcore import SymmetricNetwork, load_network, normalize_format, save_network
from .rankselect import bcv_select_rank, save_loss_table
from .spectral import (
    decompose,
    eigendecompose,
    load_embeddings,
    reconstruction_error,
    save_embeddings,
    split_ar,
)
from .synth import (
    block_model_from_dict,
    expand_sbm,
    generate_bipartite,
    generate_sandwich,
)
from .complete import complete

log = logging.getLogger("ardecomp")

SCHEMA = 1
FIDELITY_TARGETS = (0.8, 0.9, 0.95)
BENCH_STRATEGIES = ("nuclear_min", "psd_nuclear_min", "degree_diagonal", "zero_diagonal")


# ----------------------------------------------------------------- inputs


def _gen_network(spec: str, seed: Optional[int]) -> SymmetricNetwork:
    kind, _, arg = spec.partition(":")
    if not arg:
        raise ValueError(f"--gen expects kind:arg, got {spec!r}")
    if kind == "bipartite":
        return generate_bipartite(int(arg))
    if kind == "sandwich":
        _, c = generate_sandwich(int(arg))
        return SymmetricNetwork(c)
    if kind == "sbm":
        try:
            with open(arg) as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedFile(f"cannot read block model {arg!r}: {exc}") from None
        model = block_model_from_dict(payload)
        mode = payload.get("mode", "expected")
        return expand_sbm(model, mode, payload.get("seed", seed))
    raise ValueError(f"unknown generator {kind!r} (bipartite, sandwich, sbm)")


def _network(args) -> SymmetricNetwork:
    if args.gen and args.input:
        raise ValueError("give either --input or --gen, not both")
    if args.gen:
        return _gen_network(args.gen, args.seed)
    if not args.input:
        raise ValueError("one of --input or --gen is required")
    return load_network(args.input, normalize_format(args.format))


def _svt_options(args) -> SvtOptions:
    return SvtOptions(
        tau=args.tau,
        step=args.step,
        max_iter=args.max_iter,
        tol=args.tol,
        method=args.solver,
    )


def _parse_ks(text: Optional[str], n: int) -> Optional[list]:
    if text is None:
        return None
    ks = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            ks.extend(range(int(lo), int(hi) + 1))
        else:
            ks.append(int(part))
    return sorted(set(ks))


def _out(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------- commands


def cmd_decompose(args) -> int:
    net = _network(args)
    strategy = normalize_strategy(args.strategy)
    comp, spec, ar = decompose(net, strategy, args.rank, _svt_options(args))
    k = args.rank if args.rank is not None else max(ar.source_rank, 1)
    err = reconstruction_error(net, ar)
    try:
        het = network_heterophily(spec, k)
    except ARError:
        het = None
    save_embeddings(_out(args, "embeddings.csv"), ar, net.labels())
    report = {
        "schema": SCHEMA,
        "command": "decompose",
        "params": _params(args),
        "n": net.n,
        "k": k,
        "p": ar.p,
        "q": ar.q,
        "normalized_error": err,
        "network_heterophily": het,
        **comp.report(),
    }
    _write_json(_out(args, "report.json"), report)
    log.info("k=%d p=%d q=%d error=%.3g heterophily=%s", k, ar.p, ar.q, err, het)
    return 0


def cmd_metrics(args) -> int:
    ar, labels = load_embeddings(args.embeddings)
    index = {lab: i for i, lab in enumerate(labels)}
    queries = []
    for q in args.query or []:
        queries.extend(t for t in q.split(",") if t)
    subs = []
    for q in queries:
        if q not in index:
            raise UnknownNode(f"node {q!r} is not in {args.embeddings}")
        hits = repel_neighbors(ar, index[q], args.top_m, args.metric)
        subs.append([{"node": labels[j], "score": s} for j, s in hits])
    payload = {
        "schema": SCHEMA,
        "command": "metrics",
        "params": _params(args),
        "k": ar.source_rank,
        "network_heterophily": embedding_heterophily(ar) if ar.source_rank else None,
        "nodes": labels,
        "node_scores": [float(v) for v in node_heterophily(ar)],
        "queries": queries,
        "top_substitutes": subs,
    }
    _write_json(_out(args, "metrics.json"), payload)
    return 0


def cmd_bcv(args) -> int:
    net = _network(args)
    ks = _parse_ks(args.k_grid, net.n)
    res = bcv_select_rank(net, args.folds, ks, args.seed, args.repeats)
    save_loss_table(_out(args, "bcv.csv"), res.loss_table)
    print(res.k_best)
    return 0


def _min_k(curve, target):
    for k, e in curve:
        if 1.0 - e >= target:
            return k
    return None


def cmd_benchmark(args) -> int:
    net = _network(args)
    strategies = [normalize_strategy(s) for s in args.strategies.split(",") if s]
    ks = _parse_ks(args.k_range, net.n) or list(range(1, net.n + 1))
    opts = _svt_options(args)
    curves = {}
    for s in strategies:
        spec = eigendecompose(complete(net, s, opts).completed)
        curves[s] = [(k, reconstruction_error(net, split_ar(spec, k))) for k in ks]
    with open(_out(args, "curves.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["strategy", "k", "error"])
        for s, curve in curves.items():
            for k, e in curve:
                w.writerow([s, k, repr(e)])
    targets = []
    with open(_out(args, "fidelity.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["strategy", "target", "min_k"])
        for s, curve in curves.items():
            for t in FIDELITY_TARGETS:
                mk = _min_k(curve, t)
                w.writerow([s, t, "" if mk is None else mk])
                targets.append({"strategy": s, "target": t, "min_k": mk})
    _write_json(
        _out(args, "report.json"),
        {"schema": SCHEMA, "command": "benchmark", "params": _params(args),
         "n": net.n, "fidelity": targets},
    )
    return 0


def cmd_generate(args) -> int:
    net = _gen_network(args.gen, args.seed)
    save_network(net, args.output, normalize_format(args.format))
    return 0


# ------------------------------------------------------------------ parser


def _default_seed() -> int:
    env = os.environ.get("AR_SEED")
    return int(env) if env else 0


def _add_input(p):
    p.add_argument("--input", help="network file")
    p.add_argument("--format", default="edge-list",
                   choices=["edge-list", "coord", "dense-csv"])
    p.add_argument("--gen", help="bipartite:N | sandwich:M | sbm:FILE.json")


def _add_solver(p):
    p.add_argument("--tau", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--solver", choices=["alm", "svt"], default="alm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ardecomp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--out-dir", default=".")

    p = sub.add_parser("decompose", help="AR decomposition of one network")
    _add_input(p)
    _add_solver(p)
    p.add_argument("--strategy", default="nuclear-min",
                   choices=["nuclear-min", "psd-nuclear-min", "zero-diag", "degree-diag"])
    p.add_argument("--rank", type=int)
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("metrics", help="heterophily and substitutes from embeddings")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--query", action="append", help="node label(s), repeatable or comma-separated")
    p.add_argument("--top-m", type=int, default=3)
    p.add_argument("--metric", choices=["cosine", "dot"], default="cosine")
    common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bcv", help="bi-cross-validated rank selection")
    _add_input(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--k-grid", help="e.g. 1-20 or 1,2,5")
    p.add_argument("--repeats", type=int, default=1,
                   help="independent fold partitions to pool (default 1)")
    common(p)
    p.set_defaults(func=cmd_bcv)

    p = sub.add_parser("benchmark", help="error-vs-rank curves per strategy")
    _add_input(p)
    _add_solver(p)
    p.add_argument("--strategies", default=",".join(s.replace("_diagonal", "-diag").replace("_", "-")
                                                    for s in BENCH_STRATEGIES))
    p.add_argument("--k-range", help="e.g. 1-30")
    common(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("generate", help="write a synthetic network")
    p.add_argument("--gen", required=True)
    p.add_argument("--format", default="edge-list",
                   choices=["edge-list", "coord", "dense-csv"])
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except ARError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
