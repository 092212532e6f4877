"""Direct and causal-repair actions available in a state."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .inference import body_holds, eval_literal, is_causally_consistent
from .rules import CausalRule, Literal, Op, RuleSet
from .schema import CategoricalDomain, Feature, Mutability, NumericDomain, Schema, State, Value

DIRECT = "direct"
CAUSAL = "causal"


class ActionError(ValueError):
    pass


class PlausibilityError(ActionError):
    pass


class DomainError(ActionError):
    pass


@dataclass(frozen=True)
class Action:
    """A direct change of one feature, or the repair step of one causal rule.

    For repairs, ``feature``/``value`` record the effect being forced.
    """

    kind: str
    feature: str
    value: Value
    rule_id: str | None = None

    @classmethod
    def direct(cls, feature: str, value: Value) -> "Action":
        return cls(DIRECT, feature, value)

    def __str__(self) -> str:
        from ._lexer import format_number
        v = format_number(self.value) if isinstance(self.value, Fraction) else self.value
        if self.kind == DIRECT:
            return f"Direct({self.feature}->{v})"
        return f"CausalRepair({self.rule_id}: {self.feature}->{v})"


def canonical_value(lit: Literal, feat: Feature) -> Value | None:
    """The representative value that makes ``lit`` true, or None if no
    in-domain value does."""
    dom = feat.domain
    if isinstance(dom, CategoricalDomain):
        if lit.op is Op.EQ:
            return lit.value if lit.value in dom else None
        return next((v for v in dom.values if v != lit.value), None)
    step = dom.step
    op, c = lit.op, lit.value
    if op is Op.EQ:
        v = c
    elif op is Op.NE:
        v = c + step if c + step <= dom.max else c - step
    elif op is Op.GE:
        v = c
    elif op is Op.GT:
        v = c + step
    elif op is Op.LE:
        v = c
    elif op is Op.LT:
        v = c - step
    else:
        v = c[0]
    v = dom.clip(v)
    return v if eval_literal(lit, State({lit.feature: v})) else None


def _boundary_values(lit: Literal, dom: NumericDomain, want_true: bool) -> list[Fraction]:
    """Values just on the requested side of a literal's decision boundary."""
    step, c = dom.step, lit.value
    op = lit.op
    if op is Op.IN:
        lo, hi = c
        return [lo] if want_true else [lo - step, hi]
    if not want_true:
        # falsifying a literal = satisfying its complement
        op = {Op.EQ: Op.NE, Op.NE: Op.EQ, Op.LT: Op.GE, Op.GE: Op.LT, Op.LE: Op.GT, Op.GT: Op.LE}[op]
    return {
        Op.EQ: [c],
        Op.NE: [c - step, c + step],
        Op.LT: [c - step],
        Op.LE: [c],
        Op.GT: [c + step],
        Op.GE: [c],
    }[op]


class ActionSpace:
    """The action set for one schema and rule program.

    Numeric candidate values come from rule thresholds: literals the
    planner wants false (decision bodies, exceptions of exceptions, ...)
    contribute their nearest falsifying value; exception and causal-body
    literals their nearest satisfying value; causal heads their canonical
    repair value.
    """

    def __init__(self, schema: Schema, rules: RuleSet):
        self.schema = schema
        self.rules = rules
        self._candidates: dict[str, tuple[Value, ...]] = {}
        self._targets: dict[str, list[tuple[Literal, bool]]] = {f.name: [] for f in schema}
        for top in rules.decision_rules:
            self._collect(top, want_true=False)
        for c in rules.causal_rules:
            for lit in c.body:
                self._add_target(lit, True)
        self._repair_values = {}
        for c in rules.causal_rules:
            if c.effect in schema:
                self._repair_values[c.id] = canonical_value(c.head, schema[c.effect])

    def _collect(self, rule, want_true):
        for lit in rule.body:
            self._add_target(lit, want_true)
        for e in rule.exceptions:
            self._collect(e, not want_true)

    def _add_target(self, lit, want_true):
        if lit.feature in self._targets:
            self._targets[lit.feature].append((lit, want_true))

    def candidate_values(self, feature: str) -> tuple[Value, ...]:
        if feature not in self.schema:
            raise KeyError(f"unknown feature {feature!r}")
        cached = self._candidates.get(feature)
        if cached is not None:
            return cached
        feat = self.schema[feature]
        if isinstance(feat.domain, CategoricalDomain):
            out = feat.domain.values
        else:
            vals = set()
            for lit, want_true in self._targets[feature]:
                vals.update(feat.domain.clip(v) for v in _boundary_values(lit, feat.domain, want_true))
            for c in self.rules.causal_rules:
                if c.effect == feature and self._repair_values.get(c.id) is not None:
                    vals.add(self._repair_values[c.id])
            out = tuple(sorted(vals))
        self._candidates[feature] = out
        return out

    def repair_value(self, rule: CausalRule):
        return self._repair_values.get(rule.id)

    def _plausible_change(self, feat: Feature, old: Value, new: Value) -> bool:
        m = feat.mutability
        if m is Mutability.IMMUTABLE:
            return False
        if m is Mutability.MONOTONE_INCREASING:
            return feat.domain.order(new) >= feat.domain.order(old)
        if m is Mutability.MONOTONE_DECREASING:
            return feat.domain.order(new) <= feat.domain.order(old)
        return True

    def causal_repairs(self, s: State) -> list[Action]:
        out = []
        for c in self.rules.causal_rules:
            if not body_holds(c.body, s) or eval_literal(c.head, s):
                continue
            value = self._repair_values.get(c.id)
            if value is None:
                continue
            feat = self.schema[c.effect]
            if value not in feat.domain or not self._plausible_change(feat, s[c.effect], value):
                continue
            out.append(Action(CAUSAL, c.effect, value, c.id))
        return out

    def direct_actions(self, s: State) -> list[Action]:
        out = []
        for feat in self.schema:
            if not feat.mutability.directly_actionable:
                continue
            cur = s[feat.name]
            for v in self.candidate_values(feat.name):
                if v != cur and self._plausible_change(feat, cur, v):
                    out.append(Action(DIRECT, feat.name, v))
        return out

    def enumerate(self, s: State) -> list[Action]:
        return self.causal_repairs(s) + self.direct_actions(s)

    def repair_options(self, s: State) -> list[Action]:
        """Moves allowed from an inconsistent state: causal repairs when any
        apply, otherwise direct actions."""
        return self.causal_repairs(s) or self.direct_actions(s)

    def apply(self, s: State, a: Action, checked: bool = True) -> State:
        feat = self.schema[a.feature] if a.feature in self.schema else None
        if feat is None:
            raise ActionError(f"unknown feature {a.feature!r}")
        if a.value not in feat.domain:
            raise DomainError(f"{a}: value outside the domain of {feat.name}")
        if checked:
            if a.kind == DIRECT:
                if not feat.mutability.directly_actionable:
                    raise PlausibilityError(f"{a}: {feat.name} is {feat.mutability.value}")
            elif a.kind == CAUSAL:
                try:
                    rule = self.rules.causal(a.rule_id)
                except KeyError:
                    raise ActionError(f"{a}: no causal rule {a.rule_id!r}") from None
                if rule.effect != a.feature or self._repair_values.get(rule.id) != a.value:
                    raise ActionError(f"{a} does not match causal rule {rule.id}")
                if not body_holds(rule.body, s) or eval_literal(rule.head, s):
                    raise ActionError(f"{a}: causal rule {rule.id} is not violated in this state")
            else:
                raise ActionError(f"unknown action kind {a.kind!r}")
            if not self._plausible_change(feat, s[feat.name], a.value):
                raise PlausibilityError(f"{a}: {feat.name} is {feat.mutability.value}")
        return s.set(a.feature, a.value)

    def consistent(self, s: State) -> bool:
        return is_causally_consistent(self.rules, s)


def candidate_values(schema: Schema, feature: str, rules: RuleSet) -> tuple[Value, ...]:
    return ActionSpace(schema, rules).candidate_values(feature)


def enumerate_actions(s: State, schema: Schema, rules: RuleSet) -> list[Action]:
    return ActionSpace(schema, rules).enumerate(s)


def apply_action(s: State, a: Action, schema: Schema, rules: RuleSet = RuleSet()) -> State:
    return ActionSpace(schema, rules).apply(s, a)
