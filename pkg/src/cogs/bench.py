"""Runtime of path finding as categorical domains grow."""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

from .actions import ActionSpace
from .planner import NoSolution, PlanConfig, find_path
from .rules import DecisionRule, Literal, Op, RuleSet, parse_ruleset
from .schema import CategoricalDomain, Feature, Schema, State, load_schema, parse_instance


def average_feature_values(schema: Schema) -> float | None:
    """Total categorical value count divided by categorical feature count."""
    cats = [f for f in schema if isinstance(f.domain, CategoricalDomain)]
    if not cats:
        return None
    return sum(len(f.domain.values) for f in cats) / len(cats)


@dataclass(frozen=True)
class BenchVariant:
    name: str
    schema: Schema
    Q: RuleSet
    C: RuleSet
    instance: State


@dataclass(frozen=True)
class BenchRow:
    name: str
    avg_feature_values: float | None
    times: tuple[float, ...] = field(repr=False)
    path_len: int | None

    @property
    def mean_s(self) -> float:
        return statistics.fmean(self.times)

    @property
    def std_s(self) -> float:
        return statistics.stdev(self.times) if len(self.times) > 1 else 0.0

    def as_dict(self) -> dict:
        return {"name": self.name, "avg_feature_values": self.avg_feature_values,
                "mean_s": self.mean_s, "std_s": self.std_s, "path_len": self.path_len}


def synthetic_variant(value_counts: list[int], name: str | None = None) -> BenchVariant:
    """One categorical feature per entry of ``value_counts``.

    The instance holds every feature at its first value and is rejected
    while any feature is off its last value, so every feature must move.
    """
    feats = [Feature(f"f{j}", CategoricalDomain(tuple(f"v{m}" for m in range(k))))
             for j, k in enumerate(value_counts)]
    schema = Schema(feats)
    rules = tuple(DecisionRule(f"q{j + 1}", "reject", (Literal(f.name, Op.NE, f.domain.values[-1]),))
                  for j, f in enumerate(feats))
    instance = schema.state({f.name: f.domain.values[0] for f in feats})
    label = name or f"synthetic-{'-'.join(map(str, value_counts))}"
    return BenchVariant(label, schema, RuleSet(rules), RuleSet(), instance)


def load_variant(entry: dict, base: Path) -> BenchVariant:
    """A variant from a spec entry: ``synthetic`` value counts, or file paths."""
    if "synthetic" in entry:
        return synthetic_variant(list(entry["synthetic"]), entry.get("name"))
    schema = load_schema((base / entry["schema"]).read_text())
    rules = parse_ruleset((base / entry["rules"]).read_text(), schema)
    if entry.get("causal"):
        rules = rules.merge(parse_ruleset((base / entry["causal"]).read_text(), schema))
    instance = parse_instance((base / entry["instance"]).read_text(), schema)
    return BenchVariant(entry.get("name", entry["schema"]), schema, rules.only_decisions(), rules.only_causal(),
                        instance)


def load_spec(path: str | Path) -> tuple[list[BenchVariant], dict]:
    path = Path(path)
    spec = json.loads(path.read_text())
    variants = [load_variant(e, path.parent) for e in spec.get("variants", [])]
    return variants, spec.get("config", {})


def run_variant(v: BenchVariant, reps: int, cfg: PlanConfig) -> BenchRow:
    A = ActionSpace(v.schema, v.Q.merge(v.C))
    times, length = [], None
    for _ in range(reps):
        start = time.perf_counter()
        try:
            length = len(find_path(v.instance, v.C, v.Q, A, cfg))
        except NoSolution:
            length = None
        times.append(time.perf_counter() - start)
    return BenchRow(v.name, average_feature_values(v.schema), tuple(times), length)


def run_bench(variants: list[BenchVariant], reps: int, cfg: PlanConfig) -> list[BenchRow]:
    """Repetitions run sequentially, one variant after another."""
    if reps <= 0:
        return []
    return [run_variant(v, reps, cfg) for v in variants]
