"""Download UCI datasets and build binned, categorical copies of them.

For every config in data/uci/<name>.json this fetches the raw file into
data/uci/raw/<name>.data (skipped when already present) and writes one
directory per binning variant under data/uci/build/<name>-<variant>/ with
schema.txt and data.csv (label column `label`, 1 = undesired outcome).

    python scripts/fetch_uci.py                 # all datasets
    python scripts/fetch_uci.py car german      # a subset
    python scripts/fetch_uci.py --offline car   # only prepare existing raw files
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import urllib.request
from pathlib import Path

from cogs.binning import apply_binning, load_binning
from cogs.bench import average_feature_values
from cogs.data import DatasetTable, write_csv

ROOT = Path(__file__).resolve().parent.parent / "data" / "uci"


def fetch(url: str, target: Path) -> None:
    target.parent.mkdir(parents=True, exist_ok=True)
    with urllib.request.urlopen(url, timeout=60) as resp:
        target.write_bytes(resp.read())


def read_records(path: Path, separator: str) -> list[list[str]]:
    lines = path.read_text().splitlines()
    if separator == " ":
        return [ln.split() for ln in lines if ln.strip()]
    return [r for r in csv.reader(lines, skipinitialspace=True) if r]


def prepare(name: str, config_dir: Path, raw_dir: Path, out_dir: Path) -> list[Path]:
    cfg = json.loads((config_dir / f"{name}.json").read_text())
    records = read_records(raw_dir / f"{name}.data", cfg.get("separator", ","))
    built = []
    for variant in cfg["variants"]:
        schema, rows, labels = apply_binning(records, load_binning(cfg, variant))
        target = out_dir / f"{name}-{variant}"
        target.mkdir(parents=True, exist_ok=True)
        (target / "schema.txt").write_text(schema.to_text())
        table = DatasetTable(schema, [schema.state(r) for r in rows], labels)
        with open(target / "data.csv", "w", newline="") as fh:
            write_csv(table, fh)
        print(f"{target.name}: {len(rows)} rows, {len(schema)} features, "
              f"avg values {average_feature_values(schema):.2f}, {sum(labels)} undesired")
        built.append(target)
    return built


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", help="datasets (default: every config)")
    ap.add_argument("--offline", action="store_true", help="never download")
    ap.add_argument("--config-dir", type=Path, default=ROOT)
    ap.add_argument("--raw-dir", type=Path, default=ROOT / "raw")
    ap.add_argument("--out-dir", type=Path, default=ROOT / "build")
    args = ap.parse_args(argv)
    names = args.names or sorted(p.stem for p in args.config_dir.glob("*.json"))
    status = 0
    for name in names:
        raw = args.raw_dir / f"{name}.data"
        if not raw.exists():
            if args.offline:
                print(f"{name}: no raw file at {raw}", file=sys.stderr)
                status = 1
                continue
            url = json.loads((args.config_dir / f"{name}.json").read_text())["url"]
            try:
                fetch(url, raw)
            except OSError as exc:
                print(f"{name}: download failed ({exc})", file=sys.stderr)
                status = 1
                continue
        prepare(name, args.config_dir, args.raw_dir, args.out_dir)
    return status


if __name__ == "__main__":
    sys.exit(main())
