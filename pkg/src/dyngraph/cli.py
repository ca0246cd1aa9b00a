"""Command-line entry point.

Subcommands: synth (write a synthetic dataset), train (fit a model from a
config file), generate (sample graphs from a checkpoint), eval (compare two
dataset files), probe (latent-factor traversal), plot (render graphs or a
report table to an image), bench (time generation across graph sizes).
Every subcommand is reproducible given its seed flags. Exit codes: 0 on
success, 2 for usage problems (bad flags, missing files, malformed
config), 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import math
import statistics
import sys
import time
from pathlib import Path

from . import checkpoint as ckpt
from . import synth
from .data import DynamicGraphDataset, read_dataset, write_dataset
from .decoder import binarize
from .metrics import EvalReport, evaluate
from .model import DynamicGraphVAE, ModelConfig
from .probes import FACTOR_ALIASES, traverse
from .training import parse_train_config, train

__all__ = ["main"]


class UsageError(Exception):
    pass


def _require_file(path: str) -> str:
    if not Path(path).is_file():
        raise UsageError(f"input file not found: {path}")
    return path


def _cmd_synth(args) -> int:
    if args.model == "ba":
        if args.edges_per_node >= args.nodes:
            raise UsageError("--edges-per-node must be smaller than --nodes")
        graphs = []
        for i in range(args.graphs):
            stream = synth.generate_dynamic_ba(args.nodes, args.edges_per_node, args.seed + i)
            g = synth.discretize(stream, args.snapshots, cumulative=not args.sliding_window)
            if args.features != "none":
                g = synth.attach_synthetic_features(g, mode=args.features, seed=args.seed + i)
            graphs.append(g)
        ds = DynamicGraphDataset(tuple(graphs), n_max=args.nodes, T=args.snapshots, c=1)
        write_dataset(ds, args.out)
    else:
        ds, labels = synth.generate_toy_disentangled(args.graphs, args.nodes, args.snapshots, args.seed)
        write_dataset(ds, args.out)
        synth.write_factor_labels(labels, f"{args.out}.labels")
    print(f"wrote {args.graphs} graphs to {args.out}")
    return 0


def _cmd_train(args) -> int:
    _require_file(args.data)
    _require_file(args.config)
    try:
        cfg = parse_train_config(args.config)
    except ValueError as e:
        raise UsageError(f"malformed config: {e}") from e
    if args.mode is not None:
        from dataclasses import replace
        cfg = replace(cfg, inference_mode=args.mode)
    ds = read_dataset(args.data)
    report_path = args.report or f"{args.out}.report.jsonl"
    _, report = train(ds, cfg, checkpoint_path=args.out, report_path=report_path)
    last = report.final()
    print(f"trained {cfg.epochs} epochs; final negative ELBO {last.neg_elbo:.4f}; checkpoint at {args.out}")
    return 0


def _cmd_generate(args) -> int:
    _require_file(args.ckpt)
    model = ckpt.load_checkpoint(args.ckpt)
    graphs = model.generate(args.num, args.seed)
    binary = [binarize(g, mode=args.binarize, threshold=args.threshold, seed=args.seed + i)
              for i, g in enumerate(graphs)]
    cfg = model.cfg
    ds = DynamicGraphDataset(tuple(binary), n_max=cfg.n, T=cfg.T, c=cfg.c)
    write_dataset(ds, args.out)
    print(f"wrote {args.num} generated graphs to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    real = read_dataset(_require_file(args.real))
    gen = read_dataset(_require_file(args.gen))
    report = evaluate(real.graphs, gen.graphs, jobs=args.jobs)
    with open(args.out, "w") as fh:
        fh.write(report.to_json() + "\n")
    print(report.format_table())
    return 0


def _cmd_probe(args) -> int:
    _require_file(args.ckpt)
    model = ckpt.load_checkpoint(args.ckpt)
    result = traverse(model, args.factor, args.samples, args.seed)
    with open(args.out, "w") as fh:
        fh.write(result.scores_json() + "\n")
    graphs_out = args.graphs_out or f"{args.out}.graphs.jsonl"
    binary = [binarize(g, seed=args.seed + i) for i, g in enumerate(result.graphs)]
    cfg = model.cfg
    write_dataset(DynamicGraphDataset(tuple(binary), n_max=cfg.n, T=cfg.T, c=cfg.c), graphs_out)
    print(f"varied {args.factor}: edge_variation={result.edge_variation:.4g} "
          f"node_variation={result.node_variation:.4g} "
          f"within_time_variation={result.within_time_variation:.4g}")
    return 0


def _cmd_plot(args) -> int:
    from .plotting import plot_graph_grid, plot_report_table

    _require_file(args.infile)
    if args.style == "graph":
        ds = read_dataset(args.infile)
        if not ds.graphs:
            raise UsageError("dataset contains no graphs to plot")
        plot_graph_grid(ds.graphs, args.out)
    else:
        with open(args.infile) as fh:
            report = EvalReport.from_json(fh.read())
        plot_report_table(report, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rows = []
    for n in sizes:
        cfg = ModelConfig.create(n=n, c=1, T=args.snapshots)
        model = DynamicGraphVAE(cfg, seed=args.seed)
        times = []
        for rep in range(args.reps):
            start = time.perf_counter()
            graphs = model.generate(1, args.seed + rep)
            binarize(graphs[0], seed=args.seed + rep)
            times.append(time.perf_counter() - start)
        med = statistics.median(times)
        rows.append({"n": n, "seconds": med, "log10_seconds": math.log10(med)})
    header = f"{'n':>6}  {'seconds':>10}  {'log10(s)':>9}"
    lines = [header, "-" * len(header)]
    lines += [f"{r['n']:>6}  {r['seconds']:>10.4f}  {r['log10_seconds']:>9.3f}" for r in rows]
    table = "\n".join(lines)
    print(table)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(rows) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyngraph",
                                     description="Generate, model, and evaluate dynamic attributed graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--model", choices=("ba", "toy"), required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--snapshots", type=int, required=True)
    p.add_argument("--graphs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--edges-per-node", type=int, default=2, help="attachment edges per new node (ba)")
    p.add_argument("--features", choices=("degree", "noise", "none"), default="degree")
    p.add_argument("--sliding-window", action="store_true",
                   help="per-bin snapshots instead of the cumulative default (ba)")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="fit a model from a config file")
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--mode", choices=("factorized", "full"), default=None,
                   help="override the config's inference_mode")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--report", default=None, help="per-epoch report path (default <out>.report.jsonl)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("generate", help="sample graphs from a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--num", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--binarize", choices=("threshold", "bernoulli"), default="threshold")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("eval", help="compare two dataset files")
    p.add_argument("--real", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("probe", help="latent-factor traversal")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--factor", choices=tuple(k for k in FACTOR_ALIASES if isinstance(k, str)), required=True)
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="scores record path")
    p.add_argument("--graphs-out", default=None)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("plot", help="render graphs or a report table to an image")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--style", choices=("graph", "table"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("bench", help="time graph generation across sizes")
    p.add_argument("--sizes", default="100,500", help="comma-separated node counts (2500 is optional and slow)")
    p.add_argument("--snapshots", type=int, default=10)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - single reporting point for the CLI
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
