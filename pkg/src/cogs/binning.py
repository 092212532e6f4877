"""Turn raw tabular records into a categorical schema via a binning config.

A config names the label column and its undesired values, columns to drop,
per-column mutability, and one or more variants. A variant bins numeric
columns at fixed edges and may merge categorical values, which is how the
average number of values per categorical feature is varied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ._lexer import format_number
from .schema import CategoricalDomain, Feature, Mutability, Schema


@dataclass(frozen=True)
class Binning:
    columns: tuple[str, ...]
    label: str
    positive: frozenset[str]
    drop: frozenset[str] = frozenset()
    mutability: dict = field(default_factory=dict)
    order: dict = field(default_factory=dict)
    bins: dict = field(default_factory=dict)
    merge: dict = field(default_factory=dict)
    missing: str = "?"


def load_binning(source: str | Path | dict, variant: str) -> Binning:
    cfg = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    try:
        var = cfg["variants"][variant]
    except KeyError:
        raise ValueError(f"no variant {variant!r}; have {sorted(cfg.get('variants', {}))}") from None
    return Binning(
        columns=tuple(cfg["columns"]),
        label=cfg["label"],
        positive=frozenset(cfg["positive"]),
        drop=frozenset(cfg.get("drop", ())),
        mutability=dict(cfg.get("mutability", {})),
        order=dict(cfg.get("order", {})),
        bins={k: [Fraction(str(e)) for e in v] for k, v in var.get("bins", {}).items()},
        merge=dict(var.get("merge", {})),
        missing=cfg.get("missing", "?"),
    )


def bin_labels(edges: list[Fraction]) -> list[str]:
    """Ordered interval names for sorted cut points."""
    e = [format_number(x) for x in edges]
    return [f"lt{e[0]}"] + [f"{a}to{b}" for a, b in zip(e, e[1:])] + [f"ge{e[-1]}"]


def bin_value(edges: list[Fraction], raw: str) -> str:
    v = Fraction(raw.strip())
    k = sum(v >= x for x in edges)
    return bin_labels(edges)[k]


def apply_binning(records: list[list[str]], spec: Binning) -> tuple[Schema, list[dict[str, str]], list[bool]]:
    """Binned rows, the schema they induce, and the label column (True = undesired).

    Rows with a missing value in any kept column are skipped.
    """
    index = {c: j for j, c in enumerate(spec.columns)}
    if spec.label not in index:
        raise ValueError(f"label {spec.label!r} is not a column")
    keep = [c for c in spec.columns if c != spec.label and c not in spec.drop]
    rows, labels = [], []
    for rec in records:
        if len(rec) != len(spec.columns):
            continue
        rec = [v.strip() for v in rec]
        if any(rec[index[c]] == spec.missing for c in keep):
            continue
        row = {}
        for c in keep:
            v = rec[index[c]]
            if c in spec.bins:
                v = bin_value(spec.bins[c], v)
            v = spec.merge.get(c, {}).get(v, v)
            row[c] = v
        rows.append(row)
        labels.append(rec[index[spec.label]].rstrip(".") in spec.positive)
    feats = []
    for c in keep:
        seen = {r[c] for r in rows}
        if c in spec.bins:
            values = [b for b in bin_labels(spec.bins[c]) if b in seen]
        elif c in spec.order:
            ordered = [spec.merge.get(c, {}).get(v, v) for v in spec.order[c]]
            values = [v for v in dict.fromkeys(ordered) if v in seen] + sorted(seen - set(ordered))
        else:
            values = sorted(seen)
        if not values:
            raise ValueError(f"column {c!r} has no values after filtering")
        feats.append(Feature(_ident(c), CategoricalDomain(tuple(values)),
                             Mutability(spec.mutability.get(c, "free"))))
    renamed = [{_ident(c): r[c] for c in keep} for r in rows]
    return Schema(feats), renamed, labels


def _ident(name: str) -> str:
    return name.replace("-", "_").replace(".", "_")
