#!/usr/bin/env python3
"""Run the full cross-validated benchmark on a fetched credit dataset.

Thin wrapper over the `compare` subcommand: checks that the dataset has been
fetched (see scripts/fetch_datasets.py), then cross-validates the cluster
scorer and the logistic baseline side by side and writes the comparison
artifacts plus pooled ROC points.

    python3 scripts/run_benchmark.py                           # german
    python3 scripts/run_benchmark.py --config configs/australian.ini
    python3 scripts/run_benchmark.py --seed 7 --folds 5
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from riskmeans.cli import main as cli_main  # noqa: E402
from riskmeans.config import load_config  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=str(ROOT / "configs" / "german.ini"))
    parser.add_argument("--methods", default="kmeans,lr")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--folds", type=int, default=None)
    args = parser.parse_args()

    cfg = load_config(args.config)
    data_path = Path(cfg.data_path)
    if not data_path.is_absolute():
        data_path = ROOT / data_path
    if not data_path.exists():
        print(f"dataset not found: {data_path}\n"
              f"fetch it first:  python3 scripts/fetch_datasets.py",
              file=sys.stderr)
        return 1

    argv = ["compare", "--config", args.config, "--data", str(data_path),
            "--methods", args.methods, "--seed", str(args.seed),
            "--emit-plot-data"]
    if args.folds is not None:
        argv += ["--folds", str(args.folds)]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
