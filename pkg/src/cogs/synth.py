"""Seeded generators for random schemas, rule programs and problem instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .actions import ActionSpace
from .inference import decision, is_causally_consistent
from .rules import CausalRule, DecisionRule, Literal, Op, RuleSet
from .schema import CategoricalDomain, Feature, Mutability, NumericDomain, Schema, State

_MUTABILITY_WEIGHTS = [
    (Mutability.FREE, 6),
    (Mutability.IMMUTABLE, 1),
    (Mutability.MONOTONE_INCREASING, 1),
    (Mutability.MONOTONE_DECREASING, 1),
    (Mutability.CAUSAL_ONLY, 1),
]


@dataclass(frozen=True)
class Problem:
    schema: Schema
    Q: RuleSet
    C: RuleSet
    initial: State

    @property
    def rules(self) -> RuleSet:
        return self.Q.merge(self.C)

    def action_space(self) -> ActionSpace:
        return ActionSpace(self.schema, self.rules)


def random_schema(rng: random.Random, max_features: int = 6, max_values: int = 4) -> Schema:
    feats = []
    for j in range(rng.randint(1, max_features)):
        k = rng.randint(2, max_values)
        if rng.random() < 0.6:
            dom = CategoricalDomain(tuple(f"v{m}" for m in range(k)))
        else:
            dom = NumericDomain(Fraction(0), Fraction(k - 1), Fraction(1))
        mut = rng.choices([m for m, _ in _MUTABILITY_WEIGHTS], [w for _, w in _MUTABILITY_WEIGHTS])[0]
        feats.append(Feature(f"f{j}", dom, mut))
    return Schema(feats)


def random_literal(rng: random.Random, feat: Feature, ops=None) -> Literal:
    dom = feat.domain
    if isinstance(dom, CategoricalDomain):
        op = rng.choice(ops or [Op.EQ, Op.EQ, Op.NE])
        if op not in (Op.EQ, Op.NE):
            op = Op.EQ
        return Literal(feat.name, op, rng.choice(dom.values))
    op = rng.choice(ops or [Op.EQ, Op.NE, Op.LT, Op.LE, Op.GT, Op.GE, Op.IN])
    top = int(dom.max)
    if op is Op.IN:
        lo = rng.randint(0, top)
        hi = rng.randint(lo + 1, top + 1)
        return Literal(feat.name, op, (Fraction(lo), Fraction(hi)))
    return Literal(feat.name, op, Fraction(rng.randint(0, top)))


def _body(rng, feats, max_len) -> tuple[Literal, ...]:
    chosen = rng.sample(feats, min(len(feats), rng.randint(1, max_len)))
    return tuple(random_literal(rng, f) for f in chosen)


def random_ruleset(rng: random.Random, schema: Schema, max_decision: int = 4, max_causal: int = 3,
                   exception_prob: float = 0.3, max_body: int = 2, atom: str = "reject") -> tuple[RuleSet, RuleSet]:
    """Return ``(Q, C)``; exceptions are nested at most one level."""
    feats = list(schema)
    decisions = []
    for r in range(rng.randint(1, max_decision)):
        rid = f"q{r + 1}"
        excs = ()
        if rng.random() < exception_prob:
            excs = (DecisionRule(f"{rid}_e1", f"ab_{rid}", _body(rng, feats, max_body)),)
        decisions.append(DecisionRule(rid, atom, _body(rng, feats, max_body), excs))
    causal = []
    if len(feats) >= 2:
        for r in range(rng.randint(0, max_causal)):
            effect = rng.choice(feats)
            others = [f for f in feats if f is not effect]
            if effect.numeric:
                head = random_literal(rng, effect, [Op.EQ, Op.EQ, Op.GE, Op.LE])
            else:
                head = random_literal(rng, effect, [Op.EQ])
            causal.append(CausalRule(f"c{r + 1}", head, _body(rng, others, max_body)))
    return RuleSet(tuple(decisions)), RuleSet((), tuple(causal))


def random_state(rng: random.Random, schema: Schema) -> State:
    vals = []
    for f in schema:
        if isinstance(f.domain, CategoricalDomain):
            vals.append((f.name, rng.choice(f.domain.values)))
        else:
            vals.append((f.name, rng.choice(f.domain.grid())))
    return State(vals)


def random_problem(seed: int, max_features: int = 6, max_values: int = 4, max_decision: int = 4,
                   max_causal: int = 3, exception_prob: float = 0.3) -> Problem:
    """A random instance whose initial state is causally consistent and rejected."""
    rng = random.Random(seed)
    while True:
        schema = random_schema(rng, max_features, max_values)
        Q, C = random_ruleset(rng, schema, max_decision, max_causal, exception_prob)
        for _ in range(50):
            s = random_state(rng, schema)
            if is_causally_consistent(C, s) and decision(Q, s):
                return Problem(schema, Q, C, s)


def concept_schema() -> Schema:
    """Mixed schema used for surrogate-learning experiments."""
    cat = ("red", "green", "blue", "grey")
    return Schema([
        Feature("a", NumericDomain(Fraction(0), Fraction(100), Fraction(1))),
        Feature("b", NumericDomain(Fraction(0), Fraction(100), Fraction(1))),
        Feature("c", NumericDomain(Fraction(0), Fraction(1000), Fraction(1))),
        Feature("d", CategoricalDomain(cat)),
        Feature("e", CategoricalDomain(("x", "y", "z"))),
        Feature("g", CategoricalDomain(("p", "q"))),
    ])


def random_rows(rng: random.Random, schema: Schema, n: int) -> list[State]:
    return [random_state(rng, schema) for _ in range(n)]


def random_concept(rng: random.Random, schema: Schema, rows: list[State], n_rules: int,
                   min_cover: float = 0.05, max_cover: float = 0.6) -> RuleSet:
    """A hidden decision program of ``n_rules`` rules (1-2 literals each),
    each firing on between ``min_cover`` and ``max_cover`` of ``rows``.
    Numeric thresholds stay within the central 80% of the range."""
    feats = list(schema)
    rules = []
    while len(rules) < n_rules:
        body = []
        for f in rng.sample(feats, rng.randint(1, 2)):
            if f.numeric:
                op = rng.choice([Op.LT, Op.GE])
                lo, hi = int(f.domain.min), int(f.domain.max)
                # keep thresholds off the edges so both sides hold real mass
                cut = rng.randint(lo + (hi - lo) // 10, hi - (hi - lo) // 10)
                body.append(Literal(f.name, op, Fraction(cut)))
            else:
                body.append(Literal(f.name, Op.EQ, rng.choice(f.domain.values)))
        rule = DecisionRule(f"h{len(rules) + 1}", "reject", tuple(body))
        cover = sum(decision(RuleSet((rule,)), s) for s in rows) / len(rows)
        if min_cover <= cover <= max_cover:
            rules.append(rule)
    return RuleSet(tuple(rules))


def loan_rows(rng: random.Random, schema: Schema, n: int) -> list[State]:
    """Applicants spread around the loan rules' thresholds."""
    return [schema.state(age=rng.randint(18, 99), debt=rng.randint(0, 20000),
                         bank_balance=rng.randint(0, 120000), credit_score=rng.randint(300, 850))
            for _ in range(n)]


def flip_labels(rng: random.Random, labels, rate: float) -> list[bool]:
    return [(not y) if rng.random() < rate else y for y in labels]
