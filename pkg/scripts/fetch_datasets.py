#!/usr/bin/env python3
"""Download the two Statlog credit datasets and prepare them for loading.

The raw UCI distributions are whitespace-separated and ship without header
rows, while the loaders here expect one header whose names match the schema.
This script downloads each file, verifies its shape and class balance against
the documented values, prepends a header built from the committed schema, and
writes the result into data/.

Run from anywhere:

    python3 scripts/fetch_datasets.py            # fetch both
    python3 scripts/fetch_datasets.py german     # fetch one
    python3 scripts/fetch_datasets.py --force    # refetch even if present

Needs outbound network access to archive.ics.uci.edu; if that is blocked,
obtain the files by other means and place them at the destination paths with
the header line prepended (the error message below prints the exact header).
"""

from __future__ import annotations

import argparse
import sys
import urllib.error
import urllib.request
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from riskmeans.data_ingest import read_schema  # noqa: E402

UCI_BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases/statlog"

DATASETS = {
    "german": {
        "url": f"{UCI_BASE}/german/german.data",
        "schema": ROOT / "data" / "german.schema",
        "dest": ROOT / "data" / "german.data",
        "rows": 1000,
        "columns": 21,
        # raw label token -> documented count
        "label_counts": {"1": 700, "2": 300},
    },
    "australian": {
        "url": f"{UCI_BASE}/australian/australian.dat",
        "schema": ROOT / "data" / "australian.schema",
        "dest": ROOT / "data" / "australian.data",
        "rows": 690,
        "columns": 15,
        "label_counts": {"1": 307, "0": 383},
    },
}


def header_line(schema_path: Path) -> str:
    sf = read_schema(schema_path)
    return " ".join(c.name for c in sf.columns)


def fetch(name: str, force: bool) -> bool:
    spec = DATASETS[name]
    dest: Path = spec["dest"]
    if dest.exists() and not force:
        print(f"{name}: {dest} already present, skipping (use --force to refetch)")
        return True

    print(f"{name}: downloading {spec['url']}")
    try:
        with urllib.request.urlopen(spec["url"], timeout=60) as resp:
            raw = resp.read().decode("utf-8")
    except (urllib.error.URLError, OSError, TimeoutError) as exc:
        print(f"{name}: download failed: {exc}", file=sys.stderr)
        print(
            f"{name}: if this machine has no outbound network, fetch the file "
            f"elsewhere, prepend the header line\n    {header_line(spec['schema'])}\n"
            f"and save it as {dest}",
            file=sys.stderr,
        )
        return False

    lines = [ln for ln in raw.splitlines() if ln.strip()]
    if len(lines) != spec["rows"]:
        print(f"{name}: expected {spec['rows']} rows, got {len(lines)}", file=sys.stderr)
        return False
    counts: dict[str, int] = {}
    for i, ln in enumerate(lines, start=1):
        tokens = ln.split()
        if len(tokens) != spec["columns"]:
            print(f"{name}: row {i} has {len(tokens)} columns, expected "
                  f"{spec['columns']}", file=sys.stderr)
            return False
        counts[tokens[-1]] = counts.get(tokens[-1], 0) + 1
    if counts != spec["label_counts"]:
        print(f"{name}: label counts {counts} differ from documented "
              f"{spec['label_counts']}", file=sys.stderr)
        return False

    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", encoding="utf-8") as fh:
        fh.write(header_line(spec["schema"]) + "\n")
        fh.write("\n".join(lines) + "\n")
    print(f"{name}: wrote {dest} ({len(lines)} rows, labels {counts})")
    return True


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("names", nargs="*",
                        help="datasets to fetch: german, australian (default: all)")
    parser.add_argument("--force", action="store_true",
                        help="refetch even if the destination exists")
    args = parser.parse_args(argv)
    for name in args.names:
        if name not in DATASETS:
            parser.error(f"unknown dataset {name!r}; choose from: "
                         + ", ".join(DATASETS))
    names = args.names or list(DATASETS)
    ok = all([fetch(name, args.force) for name in names])
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
