"""End-to-end melakarta/janya experiment: surrogates, windows, LZP, statistics."""
from __future__ import annotations

import csv
import io
import json
import logging
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import EmptyExperiment, RagaCausalError
from .lzp import Orientation, build_graph, causal_accuracy, to_dot
from .markov import StationaryDistribution, SurrogateConfig, fit, stationary, surrogate_pool
from .melody import SequenceLabel, SymbolSequence, expand, pool_min_length, read_seq, sample_subsequence
from .notation import Composition, ParseOptions, emit_csv, parse_file, read_csv_composition
from .raga import Group, Origin, RagaScale, core_pitches, load_scale_db, lookup_scale
from .seeding import derive_rng

log = logging.getLogger(__name__)

TIMING_KEYS = ("t_gen", "t_calc", "mean_t_gen", "mean_t_calc")


@dataclass
class CorpusSpec:
    raga_id: str
    corpus: Path


@dataclass
class PoolSpec:
    name: str
    melakarta: CorpusSpec
    janya: CorpusSpec


@dataclass
class ExperimentConfig:
    pools: list[PoolSpec]
    surrogate_counts: tuple[int, ...] = (0, 50, 100)
    iterations: int = 10
    # None: minimum length within each pool and iteration
    nmin: int | None = None
    master_seed: int = 0
    output_dir: Path = Path("results")
    scale_db: Path | None = None
    default_theta: int = 8
    markov_order: int = 1
    workers: int | None = None
    write_graphs: bool = True
    orientation: Orientation = Orientation.TOP_DOWN
    surrogate: SurrogateConfig = field(default_factory=SurrogateConfig)

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if any(s < 0 for s in self.surrogate_counts):
            raise ValueError("surrogate counts must be >= 0")
        if self.nmin is not None and self.nmin <= 0:
            raise ValueError("fixed nmin must be positive")

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        """Load a JSON config; relative paths resolve against its directory."""
        path = Path(path)
        doc = json.loads(path.read_text("utf-8"))
        base = path.parent

        def rel(p):
            p = Path(p)
            return p if p.is_absolute() else base / p

        pools = []
        for rec in doc.get("pools", []):
            m, j = rec["melakarta"], rec["janya"]
            pools.append(PoolSpec(
                name=str(rec.get("name", m["raga"])),
                melakarta=CorpusSpec(str(m["raga"]), rel(m["corpus"])),
                janya=CorpusSpec(str(j["raga"]), rel(j["corpus"])),
            ))
        nmin = doc.get("nmin", "auto")
        surrogate = SurrogateConfig(**doc.get("surrogate", {}))
        return cls(
            pools=pools,
            surrogate_counts=tuple(doc.get("surrogate_counts", (0, 50, 100))),
            iterations=int(doc.get("iterations", 10)),
            nmin=None if nmin in (None, "auto") else int(nmin),
            master_seed=int(doc.get("master_seed", 0)),
            output_dir=rel(doc.get("output_dir", "results")),
            scale_db=rel(doc["scale_db"]) if doc.get("scale_db") else None,
            default_theta=int(doc.get("default_theta", 8)),
            markov_order=int(doc.get("markov_order", 1)),
            workers=doc.get("workers"),
            write_graphs=bool(doc.get("write_graphs", True)),
            orientation=Orientation(doc.get("orientation", "TB")),
            surrogate=surrogate,
        )


@dataclass
class IterationResult:
    n_min: int
    E_prime: int
    ties: int
    edges: int
    has_cycle: bool
    t_gen: float
    t_calc: float


@dataclass
class CellResult:
    pool: str
    s: int
    E: int
    iterations: list[IterationResult] = field(default_factory=list)

    @property
    def mean_E_prime(self) -> float:
        return statistics.fmean(it.E_prime for it in self.iterations)

    @property
    def accuracy_pct(self) -> float:
        return self.mean_E_prime / self.E * 100.0

    @property
    def mean_t_gen(self) -> float:
        return statistics.fmean(it.t_gen for it in self.iterations)

    @property
    def mean_t_calc(self) -> float:
        return statistics.fmean(it.t_calc for it in self.iterations)

    @property
    def mean_ties(self) -> float:
        return statistics.fmean(it.ties for it in self.iterations)


@dataclass
class PoolResult:
    name: str
    melakarta: str
    janya: str
    n_melakarta: int = 0
    n_janya: int = 0
    cells: list[CellResult] = field(default_factory=list)
    error: str | None = None

    @property
    def n_min(self) -> int | None:
        values = [it.n_min for c in self.cells for it in c.iterations]
        return min(values) if values else None

    @property
    def direction(self) -> str | None:
        if not self.cells:
            return None
        return infer_direction(statistics.fmean(c.accuracy_pct for c in self.cells))


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    pools: list[PoolResult]
    stationary: dict[str, StationaryDistribution] = field(default_factory=dict)
    graphs: dict[str, bytes] = field(default_factory=dict)


def infer_direction(accuracy: float) -> str:
    """Pool-level arrow: melakarta -> janya above 50 % accuracy."""
    if accuracy > 50.0:
        return "melakarta->janya"
    if accuracy < 50.0:
        return "janya->melakarta"
    return "tie"


def load_corpus(
    directory: str | Path,
    scale: RagaScale,
    default_theta: int = 8,
    opts: ParseOptions | None = None,
) -> list[Composition]:
    """Parse every ``*.txt`` notation file and read every ``*.csv`` event file."""
    directory = Path(directory)
    comps = []
    for path in sorted(directory.iterdir()):
        if path.suffix == ".txt":
            comp = parse_file(path, scale, None, opts, default_theta=default_theta)
        elif path.suffix == ".csv":
            comp = read_csv_composition(path, scale.raga_id, default_theta, scale.group)
        else:
            continue
        comps.append(comp)
    if not comps:
        raise RagaCausalError(f"no compositions found in {directory}")
    return comps


def _run_cell(cfg, p_idx, pool, mela, janya, models, s, report_graphs) -> CellResult:
    cell = CellResult(pool.name, s, (len(mela) + s) * (len(janya) + s))
    for it in range(cfg.iterations):
        t0 = time.perf_counter()
        surr = []
        for tag, corpus in (("melakarta", mela), ("janya", janya)):
            model, pi, scfg = models[tag]
            surr.append(surrogate_pool(
                corpus, s, scfg, cfg.master_seed, cfg.markov_order,
                stream=(p_idx, s, it, tag), model=model, pi=pi,
            ))
        t_gen = time.perf_counter() - t0

        comps = mela + surr[0] + janya + surr[1]
        seqs = [expand(c) for c in comps]
        n_min = cfg.nmin if cfg.nmin is not None else pool_min_length(seqs)
        windows = [
            sample_subsequence(sq, n_min, derive_rng(cfg.master_seed, p_idx, s, it, "window", k))
            for k, sq in enumerate(seqs)
        ]
        t1 = time.perf_counter()
        graph = build_graph(windows, cfg.workers)
        t_calc = time.perf_counter() - t1
        acc = causal_accuracy(graph)
        cell.iterations.append(IterationResult(
            n_min=n_min, E_prime=int(acc.E_prime), ties=acc.tie_count,
            edges=len(graph.edges), has_cycle=graph.has_cycle,
            t_gen=t_gen, t_calc=t_calc,
        ))
        if report_graphs is not None:
            report_graphs[f"pool_{pool.name}_s{s}_it{it}.gv"] = to_dot(graph, cfg.orientation)
        log.info("pool %s s=%d it=%d: E'=%d/%d", pool.name, s, it, acc.E_prime, acc.E)
    return cell


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    if not cfg.pools:
        raise EmptyExperiment("experiment config lists no pools")
    db = load_scale_db(cfg.scale_db)
    report = ExperimentReport(cfg, [])
    graphs = report.graphs if cfg.write_graphs else None
    for p_idx, pool in enumerate(cfg.pools):
        result = PoolResult(pool.name, pool.melakarta.raga_id, pool.janya.raga_id)
        report.pools.append(result)
        try:
            scales = {
                "melakarta": lookup_scale(pool.melakarta.raga_id, db),
                "janya": lookup_scale(pool.janya.raga_id, db),
            }
            # group follows the pool role, whatever the database says
            mela = load_corpus(pool.melakarta.corpus, scales["melakarta"], cfg.default_theta)
            janya = load_corpus(pool.janya.corpus, scales["janya"], cfg.default_theta)
            for c in mela:
                c.group = Group.MELAKARTA
            for c in janya:
                c.group = Group.JANYA
            result.n_melakarta, result.n_janya = len(mela), len(janya)
            models = {}
            for tag, corpus in (("melakarta", mela), ("janya", janya)):
                model = fit(corpus, cfg.markov_order)
                pi = stationary(model) if cfg.markov_order == 1 else None
                if pi is not None:
                    report.stationary[corpus[0].raga_id] = pi
                scfg = SurrogateConfig(**{
                    **asdict(cfg.surrogate),
                    "core_pitches": core_pitches(scales[tag]),
                })
                models[tag] = (model, pi, scfg)
            for s in cfg.surrogate_counts:
                result.cells.append(_run_cell(cfg, p_idx, pool, mela, janya, models, s, graphs))
        except RagaCausalError as exc:
            log.error("pool %s aborted: %s", pool.name, exc)
            result.error = f"{type(exc).__name__}: {exc}"
    return report


def _r2(x: float) -> float:
    return round(x, 2)


def report_to_dict(report: ExperimentReport) -> dict:
    cfg = report.config
    return {
        "master_seed": cfg.master_seed,
        "iterations": cfg.iterations,
        "surrogate_counts": list(cfg.surrogate_counts),
        "nmin_mode": "per_pool" if cfg.nmin is None else cfg.nmin,
        "pools": [
            {
                "name": p.name,
                "melakarta": p.melakarta,
                "janya": p.janya,
                "n_melakarta": p.n_melakarta,
                "n_janya": p.n_janya,
                "n_min": p.n_min,
                "direction": p.direction,
                "error": p.error,
                "cells": [
                    {
                        "s": c.s,
                        "E": c.E,
                        "mean_E_prime": c.mean_E_prime,
                        "accuracy_pct": c.accuracy_pct,
                        "mean_ties": c.mean_ties,
                        "direction": infer_direction(c.accuracy_pct),
                        "mean_t_gen": _r2(c.mean_t_gen),
                        "mean_t_calc": _r2(c.mean_t_calc),
                        "iterations": [
                            {**asdict(it), "t_gen": _r2(it.t_gen), "t_calc": _r2(it.t_calc)}
                            for it in c.iterations
                        ],
                    }
                    for c in p.cells
                ],
            }
            for p in report.pools
        ],
    }


def report_table(report: ExperimentReport) -> list[list[str]]:
    """Rows shaped like the results table: one column per pool."""
    pools = report.pools
    rows = [["pool"] + [p.name for p in pools], ["N_min"] + [str(p.n_min) for p in pools]]
    for s in report.config.surrogate_counts:
        cells = []
        for p in pools:
            cells.append(next((c for c in p.cells if c.s == s), None))

        def row(label, fn):
            rows.append([label] + ["" if c is None else fn(c) for c in cells])

        row(f"E_{s}", lambda c: str(c.E))
        row(f"mean_E_prime_{s}", lambda c: f"{c.mean_E_prime:g}")
        row(f"E_prime_pct_{s}", lambda c: f"{c.accuracy_pct:.2f}")
        row(f"mean_ties_{s}", lambda c: f"{c.mean_ties:g}")
        row(f"mean_t_gen_{s}", lambda c: f"{c.mean_t_gen:.2f}")
        row(f"mean_t_calc_{s}", lambda c: f"{c.mean_t_calc:.2f}")
    rows.append(["direction"] + [p.direction or "" for p in pools])
    return rows


def write_report(
    report: ExperimentReport,
    output_dir: str | Path | None = None,
    formats=("csv", "json", "dot"),
) -> list[Path]:
    if not report.pools:
        raise EmptyExperiment("nothing to write: report has no pools")
    out = Path(output_dir) if output_dir is not None else report.config.output_dir
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if "csv" in formats:
            buf = io.StringIO()
            csv.writer(buf, lineterminator="\n").writerows(report_table(report))
            path = out / "results.csv"
            path.write_text(buf.getvalue(), "utf-8")
            written.append(path)
        if "json" in formats:
            path = out / "results.json"
            path.write_text(json.dumps(report_to_dict(report), indent=2) + "\n", "utf-8")
            written.append(path)
        if "dot" in formats and report.graphs:
            gdir = out / "graphs"
            gdir.mkdir(exist_ok=True)
            for name, data in report.graphs.items():
                (gdir / name).write_bytes(data)
                written.append(gdir / name)
        if report.stationary:
            sdir = out / "stationary"
            sdir.mkdir(exist_ok=True)
            for raga, pi in report.stationary.items():
                path = sdir / f"{raga}.csv"
                path.write_text(stationary_csv(pi), "utf-8")
                written.append(path)
    except OSError as exc:
        raise OSError(f"writing report under {out}: {exc}") from exc
    return written


def stationary_csv(pi: StationaryDistribution) -> str:
    lines = ["pitch,probability"]
    for state in pi.states():
        label = "inf" if state == float("inf") else str(int(state))
        lines.append(f"{label},{pi.probabilities[state]!r}")
    return "\n".join(lines) + "\n"


def write_compositions(comps: list[Composition], directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for comp in comps:
        path = directory / f"{comp.source_name}.csv"
        path.write_bytes(emit_csv(comp))
        paths.append(path)
    return paths


def load_sequence_pool(path: str | Path) -> list[SymbolSequence]:
    """Labelled sequences from a manifest JSON or a directory.

    A directory holds ``melakarta/`` and ``janya/`` subdirectories of
    ``.seq`` or event ``.csv`` files. A manifest is
    ``{"sequences": [{"path": ..., "group": "melakarta"|"janya", ...}]}``.
    """
    path = Path(path)
    entries = []
    if path.is_dir():
        for group in Group:
            sub = path / group.value
            if not sub.is_dir():
                continue
            for f in sorted(sub.iterdir()):
                if f.suffix in (".seq", ".csv"):
                    entries.append((f, group, Origin.ORIGINAL, f.stem))
    else:
        doc = json.loads(path.read_text("utf-8"))
        for rec in doc["sequences"]:
            f = Path(rec["path"])
            if not f.is_absolute():
                f = path.parent / f
            entries.append((
                f, Group(rec["group"]), Origin(rec.get("origin", "original")),
                rec.get("name", f.stem),
            ))
    pool = []
    for f, group, origin, name in entries:
        label = SequenceLabel(name, group, origin)
        if f.suffix == ".csv":
            comp = read_csv_composition(f, group=group, origin=origin)
            comp.source_name = name
            pool.append(expand(comp, label))
        else:
            pool.append(read_seq(f, label))
    if not pool:
        raise RagaCausalError(f"no sequences found under {path}")
    return pool
