"""Evaluation of decision and causal rules over complete states.

States assign every feature, so negation as failure inside exceptions is
ordinary boolean negation and no resolution engine is needed.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .rules import CausalRule, DecisionRule, Literal, Op, RuleSet
from .schema import State


def eval_literal(lit: Literal, s: State) -> bool:
    v = s[lit.feature]
    op, c = lit.op, lit.value
    if op is Op.EQ:
        return v == c
    if op is Op.NE:
        return v != c
    if op is Op.LT:
        return v < c
    if op is Op.LE:
        return v <= c
    if op is Op.GT:
        return v > c
    if op is Op.GE:
        return v >= c
    lo, hi = c
    return lo <= v < hi


def body_holds(body: Iterable[Literal], s: State) -> bool:
    return all(eval_literal(lit, s) for lit in body)


def rule_fires(r: DecisionRule, s: State) -> bool:
    return body_holds(r.body, s) and not any(rule_fires(e, s) for e in r.exceptions)


def decision(Q: RuleSet, s: State) -> bool:
    return any(rule_fires(r, s) for r in Q.decision_rules)


def causal_rule_holds(c: CausalRule, s: State) -> bool:
    return not body_holds(c.body, s) or eval_literal(c.head, s)


def violated_causal_rules(C: RuleSet, s: State) -> list[CausalRule]:
    return [c for c in C.causal_rules if not causal_rule_holds(c, s)]


def is_causally_consistent(C: RuleSet, s: State) -> bool:
    return all(causal_rule_holds(c, s) for c in C.causal_rules)


def is_counterfactual(s: State, C: RuleSet, Q: RuleSet) -> bool:
    """Goal test: causally consistent and not rejected."""
    return is_causally_consistent(C, s) and not decision(Q, s)


def filter_consistent(states: Iterable[State], C: RuleSet) -> list[State]:
    return [s for s in states if is_causally_consistent(C, s)]


def negate_literal(lit: Literal) -> tuple[Literal, ...]:
    """Literals whose disjunction is the complement of ``lit``."""
    f, v = lit.feature, lit.value
    flips = {Op.EQ: Op.NE, Op.NE: Op.EQ, Op.LT: Op.GE, Op.GE: Op.LT, Op.LE: Op.GT, Op.GT: Op.LE}
    if lit.op is Op.IN:
        lo, hi = v
        return (Literal(f, Op.LT, lo), Literal(f, Op.GE, hi))
    return (Literal(f, flips[lit.op], v),)


@dataclass(frozen=True)
class GoalCondition:
    """CNF over rules: each conjunct is a tuple of disjuncts, each disjunct a
    conjunction of literals. Satisfied exactly when no decision rule fires."""

    conjuncts: tuple[tuple[tuple[Literal, ...], ...], ...]

    def satisfied_by(self, s: State) -> bool:
        return all(self.conjunct_holds(i, s) for i in range(len(self.conjuncts)))

    def conjunct_holds(self, i: int, s: State) -> bool:
        return any(body_holds(d, s) for d in self.conjuncts[i])


def goal_conditions(Q: RuleSet) -> GoalCondition:
    """Dual of the decision program: one conjunct per rule, stating that some
    body literal fails or some exception fires.

    Exceptions with their own exceptions are rejected with ``ValueError``.
    """
    conjuncts = []
    for r in Q.decision_rules:
        disjuncts = [(neg,) for lit in r.body for neg in negate_literal(lit)]
        for e in r.exceptions:
            if e.exceptions:
                raise ValueError(f"rule {r.id}: nested exceptions below {e.id} are not supported")
            disjuncts.append(tuple(e.body))
        conjuncts.append(tuple(disjuncts))
    return GoalCondition(tuple(conjuncts))


def satisfies(cond: GoalCondition, s: State) -> bool:
    return cond.satisfied_by(s)
