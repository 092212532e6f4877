"""Surrogate-extraction quality: fidelity and classification metrics.

Synthetic mode (default) draws a hidden rule program per seed, labels random
rows with it, flips a fraction of labels to play the imperfect black box, and
learns rules from those predictions. Fidelity is agreement with the black
box on held-out rows; the other metrics score against the hidden program.

UCI mode (--uci) treats each built dataset's label column as the model's
predictions (run scripts/fetch_uci.py first).

    python scripts/table1_protocol.py --seeds 20 --noise 0.05
    python scripts/table1_protocol.py --uci
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
from pathlib import Path

from cogs.data import DatasetTable, read_csv, train_test_split
from cogs.learner import LearnParams, classification_metrics, fidelity, learn_rules
from cogs.schema import load_schema
from cogs.synth import concept_schema, flip_labels, random_concept, random_rows
from cogs.inference import decision

BUILD = Path(__file__).resolve().parent.parent / "data" / "uci" / "build"
COLUMNS = ["fidelity", "accuracy", "precision", "recall", "f1"]


def synthetic_run(seed: int, rows: int, noise: float, params: LearnParams) -> dict:
    rng = random.Random(seed)
    schema = concept_schema()
    states = random_rows(rng, schema, rows)
    hidden = random_concept(rng, schema, states, rng.randint(1, 3))
    truth = [decision(hidden, s) for s in states]
    model = flip_labels(rng, truth, noise)
    train, test = train_test_split(DatasetTable(schema, states, model), 0.2, seed)
    _, test_truth = train_test_split(DatasetTable(schema, states, truth), 0.2, seed)
    rules = learn_rules(train, params)
    out = {"fidelity": fidelity(rules, test), "rules": len(rules.decision_rules)}
    out.update(classification_metrics(rules, test_truth).as_dict())
    return out


def dataset_run(directory: Path, seed: int, params: LearnParams) -> dict:
    schema = load_schema((directory / "schema.txt").read_text())
    data, _ = read_csv(directory / "data.csv", "label", schema)
    train, test = train_test_split(data, 0.2, seed)
    rules = learn_rules(train, params)
    out = {"fidelity": fidelity(rules, test), "rules": len(rules.decision_rules)}
    out.update(classification_metrics(rules, test).as_dict())
    return out


def summary(runs: list[dict]) -> list[str]:
    cells = []
    for key in COLUMNS:
        vals = [r[key] for r in runs if r[key] is not None]
        if not vals:
            cells.append("n/a")
        elif len(vals) == 1:
            cells.append(f"{vals[0]:.3f}")
        else:
            cells.append(f"{statistics.mean(vals):.3f} ± {statistics.stdev(vals):.3f}")
    return cells


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--rows", type=int, default=1000)
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--max-rules", type=int, default=10)
    ap.add_argument("--uci", action="store_true", help="score built UCI datasets instead")
    args = ap.parse_args(argv)
    params = LearnParams(max_rules=args.max_rules)
    print("| setting | " + " | ".join(COLUMNS) + " |")
    print("|---" * (len(COLUMNS) + 1) + "|")
    if args.uci:
        dirs = sorted(p for p in BUILD.glob("*") if (p / "data.csv").exists())
        if not dirs:
            print("no built datasets; run scripts/fetch_uci.py", file=sys.stderr)
            return 1
        for d in dirs:
            print(f"| {d.name} | " + " | ".join(summary([dataset_run(d, 0, params)])) + " |")
        return 0
    runs = [synthetic_run(s, args.rows, args.noise, params) for s in range(args.seeds)]
    print(f"| synthetic, noise {args.noise} | " + " | ".join(summary(runs)) + " |")
    return 0


if __name__ == "__main__":
    sys.exit(main())
