"""Tabular datasets: CSV ingestion, schema inference and train/test splits."""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from ._lexer import format_number
from .schema import CategoricalDomain, Feature, NumericDomain, Schema, State, validate_state

TRUE_LABELS = frozenset({"1", "true", "yes", "y", "t"})


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetTable:
    schema: Schema
    rows: tuple[State, ...]
    labels: tuple[bool, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(bool(v) for v in self.labels))
            if len(self.labels) != len(self.rows):
                raise DataError(f"{len(self.labels)} labels for {len(self.rows)} rows")

    def __len__(self) -> int:
        return len(self.rows)

    def with_labels(self, labels) -> "DatasetTable":
        return DatasetTable(self.schema, self.rows, tuple(labels))

    def subset(self, indices) -> "DatasetTable":
        rows = [self.rows[k] for k in indices]
        labels = None if self.labels is None else [self.labels[k] for k in indices]
        return DatasetTable(self.schema, rows, labels)


def train_test_split(data: DatasetTable, test_fraction: float = 0.2, seed: int = 0) -> tuple[DatasetTable, DatasetTable]:
    order = list(range(len(data)))
    random.Random(seed).shuffle(order)
    n_test = int(round(len(order) * test_fraction))
    return data.subset(sorted(order[n_test:])), data.subset(sorted(order[:n_test]))


def _is_number(text: str) -> bool:
    try:
        Fraction(text)
    except (ValueError, ZeroDivisionError):
        return False
    return True


def infer_schema(header: list[str], records: list[list[str]]) -> Schema:
    """Numeric columns become [min,max] domains with the finest step that
    represents every value; everything else is categorical in order of
    first appearance."""
    feats = []
    for j, name in enumerate(header):
        col = [r[j] for r in records]
        if col and all(_is_number(v) for v in col):
            nums = [Fraction(v) for v in col]
            denom = 1
            for v in nums:
                denom = denom * v.denominator // gcd(denom, v.denominator)
            feats.append(Feature(name, NumericDomain(min(nums), max(nums), Fraction(1, denom))))
        else:
            feats.append(Feature(name, CategoricalDomain(tuple(dict.fromkeys(col)))))
    return Schema(feats)


def read_csv(source, label: str | None, schema: Schema | None = None, positive: str | None = None,
             extra_columns=()) -> tuple[DatasetTable, dict[str, list[str]]]:
    """Load a CSV with a header row.

    ``label`` names the prediction column (binary; ``positive`` or one of
    1/true/yes marks the undesired outcome). Columns listed in
    ``extra_columns`` are returned raw and excluded from the features;
    other columns not in ``schema`` are ignored.
    """
    text = source.read() if hasattr(source, "read") else open(source, newline="").read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("CSV is empty") from None
    records = [[v.strip() for v in r] for r in reader if r and any(v.strip() for v in r)]
    for k, r in enumerate(records, 2):
        if len(r) != len(header):
            raise DataError(f"line {k}: expected {len(header)} fields, found {len(r)}")
    if label is not None and label not in header:
        raise DataError(f"label column {label!r} not found")
    for col in extra_columns:
        if col not in header:
            raise DataError(f"column {col!r} not found")
    skip = {label, *extra_columns}
    feature_cols = [j for j, h in enumerate(header) if h not in skip]
    if schema is None:
        schema = infer_schema([header[j] for j in feature_cols], [[r[j] for j in feature_cols] for r in records])
    else:
        missing = [f.name for f in schema if f.name not in header]
        if missing:
            raise DataError(f"CSV lacks schema features {missing}")
    index = {h: j for j, h in enumerate(header)}
    rows = []
    for k, r in enumerate(records, 2):
        try:
            values = {f.name: f.coerce(r[index[f.name]]) for f in schema}
        except (ValueError, ZeroDivisionError) as exc:
            raise DataError(f"line {k}: {exc}") from None
        problems = validate_state(schema, values)
        if problems:
            raise DataError(f"line {k}: " + "; ".join(problems))
        rows.append(schema.state(values))
    labels = None
    if label is not None:
        col = [r[index[label]] for r in records]
        labels = [truthy(v, positive) for v in col]
    extras = {c: [r[index[c]] for r in records] for c in extra_columns}
    return DatasetTable(schema, rows, labels), extras


def truthy(value: str, positive: str | None) -> bool:
    if positive is not None:
        return value == positive
    return value.strip().lower() in TRUE_LABELS


def write_csv(data: DatasetTable, target, label: str = "label") -> None:
    w = csv.writer(target)
    names = data.schema.names
    w.writerow(list(names) + ([label] if data.labels is not None else []))
    for k, row in enumerate(data.rows):
        vals = [format_number(row[n]) if data.schema[n].numeric else row[n] for n in names]
        if data.labels is not None:
            vals.append("1" if data.labels[k] else "0")
        w.writerow(vals)
