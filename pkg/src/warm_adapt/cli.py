"""Command-line entry point: ``warm-adapt <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .ansatz import VARIANTS, RunConfig, run_algorithm
from .experiments import (
    ExperimentSpec,
    first_layer_empirical,
    first_layer_reference,
    landscape_scan,
    run_batch,
)
from .graphs import Graph, random_regular


def _write_or_print(text, out):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_gen_graph(args):
    g = random_regular(args.n, args.degree, args.weighted, args.seed)
    _write_or_print(g.to_json(), args.out)


def cmd_run(args):
    g = Graph.from_json(Path(args.graph).read_text())
    cfg = RunConfig(max_layers=args.max_layers, gamma0=args.gamma0, threshold=args.threshold, seed=args.seed)
    rec = run_algorithm(args.algorithm, g, cfg)
    _write_or_print(json.dumps(rec.to_dict(), indent=1), args.out)
    if args.out:
        last = rec.layers[-1]
        print(f"{rec.algorithm}: p={last.layer} energy={last.energy:.6f} "
              f"error={last.energy_error:.3e} cnots={last.cnots} "
              f"threshold-layer={rec.layers_to_threshold()}")


def cmd_batch(args):
    spec = ExperimentSpec.from_json(Path(args.spec).read_text())
    if args.workers is not None:
        spec.workers = args.workers
    batch = run_batch(spec, args.out_dir)
    for row in batch.tables["threshold_fraction"]:
        print(f"{row['variant']:>14}  reached {row['threshold']} in {row['max_layers']} layers: "
              f"{row['fraction']:.3f}")
    if batch.failures:
        print(f"{len(batch.failures)} instance runs failed; see summary.json", file=sys.stderr)


def _parse_grid(text):
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("grid must be 'gmin,gmax,gsteps,bmin,bmax,bsteps'")
    gmin, gmax, gsteps, bmin, bmax, bsteps = parts
    return (float(gmin), float(gmax), int(gsteps)), (float(bmin), float(bmax), int(bsteps))


def cmd_landscape(args):
    g = Graph.from_json(Path(args.graph).read_text())
    grange, brange = args.grid
    cfg = RunConfig(max_layers=1, gamma0=args.gamma0, seed=args.seed)
    grid = landscape_scan(g, args.algorithm, grange, brange, cfg, drop_constant=not args.keep_constant)
    if args.out:
        grid.write_csv(args.out)
    print(f"mixer={grid.mixer} min={grid.min:.6g} max={grid.max:.6g} mean={grid.mean:.6g}")


def cmd_first_layer(args):
    ref = first_layer_reference(args.n, args.degree)
    out = {"reference": asdict(ref)}
    if args.instances:
        out["empirical"] = first_layer_empirical(args.n, args.degree, args.instances, args.seed)
    print(json.dumps(out, indent=1))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="warm-adapt", description="Warm-started adaptive QAOA for MaxCut")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen-graph", help="sample a random regular graph")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--weighted", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen_graph)

    s = sub.add_parser("run", help="run one algorithm on one graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--algorithm", choices=VARIANTS, required=True)
    s.add_argument("--max-layers", type=int, default=15)
    s.add_argument("--gamma0", type=float, default=0.01)
    s.add_argument("--threshold", type=float, default=0.01)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("batch", help="run an experiment spec and write summary tables")
    s.add_argument("--spec", required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_batch)

    s = sub.add_parser("landscape", help="one-layer energy-error grid")
    s.add_argument("--graph", required=True)
    s.add_argument("--algorithm", choices=VARIANTS, required=True)
    s.add_argument("--grid", type=_parse_grid, default=_parse_grid("-2,2,81,-2,2,81"))
    s.add_argument("--gamma0", type=float, default=0.01)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--keep-constant", action="store_true",
                   help="normalise with the -W/2 constant kept in the cost")
    s.add_argument("--out")
    s.set_defaults(func=cmd_landscape)

    s = sub.add_parser("first-layer", help="closed-form and sampled one-layer cuts")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--instances", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_first_layer)
    return p


def _join_grid(argv):
    # a grid like "-2,2,81,..." would otherwise be read as an option flag
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--grid":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--grid={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_grid(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
