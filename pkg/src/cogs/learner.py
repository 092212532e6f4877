"""Surrogate rule extraction: default rules with exceptions learned by
sequential covering from a black box's predictions.

A simplified FOLD-style learner. Rules are grown one literal at a time by
information gain; once the false positives left under a rule are few
enough, they are carved out as exceptions by recursing with the labels
swapped.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass
from math import log2

from .data import DataError, DatasetTable
from .inference import decision, eval_literal, rule_fires
from .rules import DecisionRule, Literal, Op, RuleSet
from .schema import CategoricalDomain, Schema, State


@dataclass(frozen=True)
class LearnParams:
    max_rules: int = 10
    max_exception_depth: int = 2
    # minimum rule coverage, as a fraction of all positive examples
    min_coverage_ratio: float = 0.02
    improvement_threshold: float = 1e-6
    # stop specializing once false positives <= exception_ratio * true positives
    exception_ratio: float = 1.0
    max_literals: int = 8

    def __post_init__(self):
        if self.max_rules < 1:
            raise ValueError("max_rules must be positive")
        if self.max_exception_depth < 0:
            raise ValueError("max_exception_depth must be non-negative")
        if not 0 < self.min_coverage_ratio <= 1:
            raise ValueError("min_coverage_ratio must be in (0, 1]")
        if self.improvement_threshold < 0:
            raise ValueError("improvement_threshold must be non-negative")


def _plogp(a: int, n: int) -> float:
    return a * log2(a / n) if a else 0.0


def _split_score(tp: int, fp: int, tn: int, fn: int) -> float:
    """Negative weighted entropy of a binary split (higher is better, max 0)."""
    total = tp + fp + tn + fn
    return (_plogp(tp, tp + fp) + _plogp(fp, tp + fp) + _plogp(tn, tn + fn) + _plogp(fn, tn + fn)) / total


def _candidates(schema: Schema, pos: list[State], neg: list[State]):
    """Yield ``(literal, tp, fp)`` for every candidate literal, deterministically."""
    for feat in schema:
        name = feat.name
        if isinstance(feat.domain, CategoricalDomain):
            cp = Counter(s[name] for s in pos)
            cn = Counter(s[name] for s in neg)
            present = [v for v in feat.domain.values if cp[v] + cn[v]]
            for v in present:
                yield Literal(name, Op.EQ, v), cp[v], cn[v]
            for v in present:
                yield Literal(name, Op.NE, v), len(pos) - cp[v], len(neg) - cn[v]
            continue
        cp = Counter(s[name] for s in pos)
        cn = Counter(s[name] for s in neg)
        values = sorted(set(cp) | set(cn))
        tp = fp = 0
        for u, w in zip(values, values[1:]):
            tp += cp[u]
            fp += cn[u]
            labels = {k for k, c in (("p", cp[u]), ("n", cn[u]), ("p", cp[w]), ("n", cn[w])) if c}
            if len(labels) < 2:
                continue
            mid = (u + w) / 2
            yield Literal(name, Op.LE, mid), tp, fp
            yield Literal(name, Op.GT, mid), len(pos) - tp, len(neg) - fp


def _best_literal(schema, pos, neg, used):
    n_pos, n_neg = len(pos), len(neg)
    base = _split_score(n_pos, n_neg, 0, 0)
    best, best_score = None, None
    for lit, tp, fp in _candidates(schema, pos, neg):
        if tp == 0 or lit in used or (tp == n_pos and fp == n_neg):
            continue
        # a literal and its complement split alike; prefer the purer covered side
        score = (round(_split_score(tp, fp, n_neg - fp, n_pos - tp), 12), tp / (tp + fp))
        if best_score is None or score > best_score:
            best, best_score = lit, score
    if best is None:
        return None, 0.0
    return best, best_score[0] - base


class _Learner:
    def __init__(self, schema: Schema, params: LearnParams, n_positive: int):
        self.schema = schema
        self.p = params
        # every rule, exceptions included, must cover this many examples
        self.min_cover = max(1, params.min_coverage_ratio * n_positive)

    def fold(self, pos, neg, depth, head, prefix) -> list[DecisionRule]:
        rules: list[DecisionRule] = []
        remaining = list(pos)
        while remaining and len(rules) < self.p.max_rules and len(remaining) >= self.min_cover:
            rid = f"{prefix}{len(rules) + 1}"
            rule = self.learn_rule(remaining, neg, depth, head, rid)
            if rule is None:
                break
            covered = [s for s in remaining if rule_fires(rule, s)]
            new_fp = [s for s in neg if rule_fires(rule, s) and not any(rule_fires(q, s) for q in rules)]
            if len(covered) < self.min_cover or len(covered) <= len(new_fp):
                break
            rules.append(rule)
            remaining = [s for s in remaining if not rule_fires(rule, s)]
        return rules

    def learn_rule(self, pos, neg, depth, head, rid) -> DecisionRule | None:
        can_except = depth < self.p.max_exception_depth
        body: list[Literal] = []
        exceptions: list[DecisionRule] = []
        early_stop = can_except
        while True:
            while neg and len(body) < self.p.max_literals:
                if body and early_stop and len(neg) <= self.p.exception_ratio * len(pos):
                    break
                lit, gain = _best_literal(self.schema, pos, neg, body)
                if lit is None or gain < self.p.improvement_threshold:
                    break
                body.append(lit)
                pos = [s for s in pos if eval_literal(lit, s)]
                neg = [s for s in neg if eval_literal(lit, s)]
            if not body and neg:
                return None
            if neg and can_except:
                exceptions = self.fold(neg, pos, depth + 1, f"ab_{rid}", f"{rid}_e")
            if exceptions or not early_stop or 2 * len(neg) < len(pos):
                break
            # no usable exception and too impure to keep: go back to specializing
            early_stop = False
        return DecisionRule(rid, head, tuple(body), tuple(exceptions))


def learn_rules(data: DatasetTable, params: LearnParams = LearnParams(), atom: str = "reject") -> RuleSet:
    """Learn a decision program whose rules fire on the positive label."""
    if data.labels is None:
        raise DataError("learning needs labels")
    pos = [s for s, y in zip(data.rows, data.labels) if y]
    neg = [s for s, y in zip(data.rows, data.labels) if not y]
    if not pos:
        return RuleSet()
    rules = _Learner(data.schema, params, len(pos)).fold(pos, neg, 0, atom, "r")
    return RuleSet(tuple(rules))


def extract_logic(model, params: LearnParams = LearnParams(), data: DatasetTable | None = None,
                  atom: str = "reject") -> RuleSet:
    """Decision rules for a model.

    A :class:`RuleSet` is already rule-based and is returned unchanged. A
    labelled :class:`DatasetTable` is taken as the model's predictions on
    its rows. A callable is queried on every row of ``data`` first.
    """
    if isinstance(model, RuleSet):
        return model
    if callable(model):
        if data is None or not len(data):
            raise DataError("a callable model needs a non-empty data table")
        table = data.with_labels([bool(model(s)) for s in data.rows])
    elif isinstance(model, DatasetTable):
        table = model
    else:
        raise TypeError(f"cannot extract rules from {type(model).__name__}")
    if not len(table):
        raise DataError("empty table")
    if table.labels is None:
        raise DataError("table has no prediction column")
    return learn_rules(table, params, atom)


def predictions(rules: RuleSet, data: DatasetTable) -> list[bool]:
    return [decision(rules, s) for s in data.rows]


def fidelity(rules: RuleSet, data: DatasetTable) -> float:
    """Fraction of rows where the rules agree with the model's predictions."""
    if not len(data):
        raise DataError("empty table")
    if data.labels is None:
        raise DataError("table has no prediction column")
    agree = sum(p == y for p, y in zip(predictions(rules, data), data.labels))
    return agree / len(data)


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None

    def as_dict(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision, "recall": self.recall, "f1": self.f1}


def classification_metrics(rules: RuleSet, data: DatasetTable) -> Metrics:
    """Binary metrics on the positive (rejected) class; None where undefined."""
    if not len(data):
        raise DataError("empty table")
    if data.labels is None:
        raise DataError("table has no labels")
    tp = fp = fn = tn = 0
    for p, y in zip(predictions(rules, data), data.labels):
        if p and y:
            tp += 1
        elif p:
            fp += 1
        elif y:
            fn += 1
        else:
            tn += 1
    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    f1 = None
    if precision is not None and recall is not None:
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics((tp + tn) / len(data), precision, recall, f1)


Model = Callable[[State], bool]
