"""Run the bundled two-raga sample experiment and print the results table.

    python3 scripts/run_sample_experiment.py [--seed N] [--out DIR]
"""
import argparse
import csv
import logging
from pathlib import Path

from ragacausal.experiment import ExperimentConfig, run_experiment, write_report

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "sample_experiment.json"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", type=Path, default=CONFIG)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.out is not None:
        cfg.output_dir = args.out
    report = run_experiment(cfg)
    write_report(report)
    with open(cfg.output_dir / "results.csv") as fh:
        for row in csv.reader(fh):
            print("  ".join(f"{c:>18}" for c in row))


if __name__ == "__main__":
    main()
