"""Command-line entry point: ``ragacausal <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import RagaCausalError
from .experiment import (
    ExperimentConfig,
    load_corpus,
    load_sequence_pool,
    run_experiment,
    stationary_csv,
    write_compositions,
    write_report,
)
from .lz import lz76_complexity
from .lzp import Orientation, build_graph, causal_accuracy, graph_to_dict, to_dot
from .markov import SurrogateConfig, fit, stationary, surrogate_pool
from .melody import expand, pool_min_length, read_seq, sample_subsequence, write_seq
from .notation import emit_csv, parse_file, read_csv_composition
from .raga import core_pitches, load_scale_db, lookup_scale
from .seeding import derive_rng

log = logging.getLogger("ragacausal")


def _nmin(value: str) -> int | None:
    if value == "auto":
        return None
    n = int(value)
    if n <= 0:
        raise argparse.ArgumentTypeError("nmin must be positive or 'auto'")
    return n


def _scale(args):
    return lookup_scale(args.raga, load_scale_db(args.scale_db), fallback=args.fallback)


def cmd_parse(args) -> int:
    comp = parse_file(args.inp, _scale(args), args.tala_beats)
    data = emit_csv(comp)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return 0


def cmd_expand(args) -> int:
    seq = expand(read_csv_composition(args.inp))
    write_seq(seq, args.out)
    return 0


def cmd_lz76(args) -> int:
    print(lz76_complexity(read_seq(args.inp)).phrase_count)
    return 0


def cmd_causality(args) -> int:
    pool = load_sequence_pool(args.pool)
    n_min = args.nmin if args.nmin is not None else pool_min_length(pool)
    windows = [
        sample_subsequence(sq, n_min, derive_rng(args.seed, "window", k))
        for k, sq in enumerate(pool)
    ]
    graph = build_graph(windows, args.workers)
    if args.dot:
        Path(args.dot).write_bytes(to_dot(graph, args.orientation))
    stats = graph_to_dict(graph)
    stats["n_min"] = n_min
    stats["seed"] = args.seed
    try:
        acc = causal_accuracy(graph)
        stats.update(E=acc.E, E_prime=acc.E_prime, accuracy_pct=acc.accuracy_pct,
                     cross_ties=acc.tie_count)
    except RagaCausalError:
        stats.update(E=0, E_prime=None, accuracy_pct=None, cross_ties=0)
    if args.stats:
        Path(args.stats).write_text(json.dumps(stats, indent=2) + "\n", "utf-8")
    if stats["accuracy_pct"] is not None:
        print(f"{stats['E_prime']}/{stats['E']} melakarta->janya ({stats['accuracy_pct']:.2f}%)")
    print(f"{len(graph.edges)} edges, {len(graph.ties)} ties"
          + (", cycle present" if graph.has_cycle else ""))
    return 0


def cmd_gen_surrogates(args) -> int:
    scale = _scale(args)
    corpus = load_corpus(args.corpus, scale, args.tala_beats)
    cfg = SurrogateConfig(n_events=args.events, core_pitches=core_pitches(scale))
    comps = surrogate_pool(corpus, args.count, cfg, args.seed, args.order,
                           stream=(scale.raga_id,), raga_id=scale.raga_id, group=scale.group)
    write_compositions(comps, args.out)
    return 0


def cmd_stationary(args) -> int:
    if args.raga:
        corpus = load_corpus(args.corpus, _scale(args), args.tala_beats)
    else:
        paths = sorted(Path(args.corpus).glob("*.csv"))
        if not paths:
            raise RagaCausalError(f"no event CSVs in {args.corpus}; pass --raga for notation")
        corpus = [read_csv_composition(p) for p in paths]
    text = stationary_csv(stationary(fit(corpus, 1)))
    if args.out:
        Path(args.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.nmin is not None:
        cfg.nmin = None if args.nmin == "auto" else _nmin(args.nmin)
    if args.out:
        cfg.output_dir = Path(args.out)
    report = run_experiment(cfg)
    write_report(report)
    for p in report.pools:
        if p.error:
            print(f"pool {p.name}: {p.error}")
            continue
        cells = ", ".join(f"s={c.s}: {c.accuracy_pct:.2f}%" for c in p.cells)
        print(f"pool {p.name} ({p.melakarta} vs {p.janya}): {cells}; {p.direction}")
    return 1 if any(p.error for p in report.pools) else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ragacausal", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def raga_opts(p, required=True):
        p.add_argument("--raga", required=required, help="raga id, e.g. 15 or 15_m")
        p.add_argument("--scale-db", type=Path, default=None)
        p.add_argument("--fallback", action="store_true",
                       help="use a seven-tonal scale for unknown ragas")
        p.add_argument("--tala-beats", type=int, default=None,
                       help="beats per avartana when the file has no tala header")

    p = sub.add_parser("parse", help="notation text -> event CSV")
    raga_opts(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("expand", help="event CSV -> symbol sequence")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("lz76", help="print the LZ76 complexity of a sequence file")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_lz76)

    p = sub.add_parser("causality", help="pairwise LZP graph of a labelled pool")
    p.add_argument("--pool", required=True,
                   help="directory with melakarta/ and janya/ subdirectories, or a manifest JSON")
    p.add_argument("--nmin", type=_nmin, default=None, help="window length or 'auto'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dot")
    p.add_argument("--stats")
    p.add_argument("--orientation", default="TB", choices=[o.value for o in Orientation])
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_causality)

    p = sub.add_parser("gen-surrogates", help="Markov surrogates of a corpus")
    raga_opts(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--events", type=int, default=1000)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_surrogates)

    p = sub.add_parser("stationary", help="stationary pitch distribution of a corpus")
    raga_opts(p, required=False)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("experiment", help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--nmin", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (RagaCausalError, OSError, ValueError) as exc:
        print(f"ragacausal: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
