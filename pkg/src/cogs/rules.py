"""Rule ASTs and the textual rule language.

Decision rules are default rules with inline exceptions::

    q1: decision reject :- x == 1 except { e1: decision ab_q1 :- y == 1. }.

Causal rules have a single-literal head::

    c1: causal credit_score == 620 :- debt == 0.

Rule ids are optional in source; missing ones are generated.
"""

from __future__ import annotations

import enum
from collections.abc import Iterator
from dataclasses import dataclass, field
from fractions import Fraction

from ._lexer import IDENT_RE, ParseError, TokenStream, format_number, quote_symbol, symbol_text
from .schema import CategoricalDomain, NumericDomain, Schema, Value


class Op(str, enum.Enum):
    EQ = "=="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    IN = "in"


ORDERING_OPS = frozenset({Op.LT, Op.LE, Op.GT, Op.GE, Op.IN})


@dataclass(frozen=True)
class Literal:
    """``feature op value``; for ``Op.IN`` the value is a half-open ``(lo, hi)`` pair."""

    feature: str
    op: Op
    value: Value | tuple[Fraction, Fraction]

    def to_text(self, schema: Schema | None = None) -> str:
        if self.op is Op.IN:
            lo, hi = self.value
            return f"{self.feature} in [{format_number(lo)},{format_number(hi)})"
        return f"{self.feature} {self.op.value} {_format_value(self.value)}"

    def __str__(self) -> str:
        return self.to_text()


def _format_value(value) -> str:
    if isinstance(value, Fraction):
        return format_number(value)
    if isinstance(value, int):
        return str(value)
    text = quote_symbol(value)
    # a bare categorical symbol that lexes as a number must stay a string
    if text == value and _looks_numeric(value):
        return '"' + value + '"'
    return text


def _looks_numeric(text: str) -> bool:
    try:
        Fraction(text)
    except (ValueError, ZeroDivisionError):
        return False
    return True


@dataclass(frozen=True)
class DecisionRule:
    id: str
    head: str
    body: tuple[Literal, ...] = ()
    exceptions: tuple["DecisionRule", ...] = ()

    def walk(self) -> Iterator["DecisionRule"]:
        yield self
        for exc in self.exceptions:
            yield from exc.walk()

    def depth(self) -> int:
        """Exception nesting depth; 0 for a rule with no exceptions."""
        return 1 + max((e.depth() for e in self.exceptions), default=-1)

    def to_text(self) -> str:
        text = f"{self.id}: decision {self.head}"
        if self.body:
            text += " :- " + ", ".join(lit.to_text() for lit in self.body)
        if self.exceptions:
            text += " except { " + " ".join(e.to_text() for e in self.exceptions) + " }"
        return text + "."


@dataclass(frozen=True)
class CausalRule:
    id: str
    head: Literal
    body: tuple[Literal, ...]

    @property
    def effect(self) -> str:
        return self.head.feature

    def to_text(self) -> str:
        return f"{self.id}: causal {self.head.to_text()} :- " + ", ".join(lit.to_text() for lit in self.body) + "."


@dataclass(frozen=True)
class RuleSet:
    decision_rules: tuple[DecisionRule, ...] = ()
    causal_rules: tuple[CausalRule, ...] = ()
    _causal_index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "decision_rules", tuple(self.decision_rules))
        object.__setattr__(self, "causal_rules", tuple(self.causal_rules))
        object.__setattr__(self, "_causal_index", {c.id: c for c in self.causal_rules})

    @property
    def decision_atom(self) -> str | None:
        return self.decision_rules[0].head if self.decision_rules else None

    def causal(self, rule_id: str) -> CausalRule:
        return self._causal_index[rule_id]

    def merge(self, other: "RuleSet") -> "RuleSet":
        return RuleSet(self.decision_rules + other.decision_rules, self.causal_rules + other.causal_rules)

    def only_decisions(self) -> "RuleSet":
        return RuleSet(self.decision_rules, ())

    def only_causal(self) -> "RuleSet":
        return RuleSet((), self.causal_rules)

    def literals(self) -> Iterator[Literal]:
        for rule in self.decision_rules:
            for r in rule.walk():
                yield from r.body
        for c in self.causal_rules:
            yield from c.body
            yield c.head

    def rule_ids(self) -> list[str]:
        ids = [r.id for rule in self.decision_rules for r in rule.walk()]
        return ids + [c.id for c in self.causal_rules]


class RuleError(ValueError):
    """Raised by :func:`parse_ruleset` when validation finds errors."""

    def __init__(self, diagnostics: list["Diagnostic"]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class Diagnostic:
    code: str  # unknown_feature, type_error, duplicate_id, effect_in_body, head_mismatch, causal_conflict
    message: str
    rule_id: str | None = None
    severity: str = "error"

    def __str__(self) -> str:
        where = f"[{self.rule_id}] " if self.rule_id else ""
        return f"{self.severity}: {where}{self.message}"


# -- parsing ---------------------------------------------------------------

class _RuleParser:
    def __init__(self, text: str, schema: Schema | None):
        self.ts = TokenStream(text)
        self.schema = schema
        self.counts = {"decision": 0, "causal": 0}

    def program(self) -> RuleSet:
        decisions, causal = [], []
        while not self.ts.done:
            rule = self.rule(parent=None, sibling_index=0)
            (decisions if isinstance(rule, DecisionRule) else causal).append(rule)
        return RuleSet(tuple(decisions), tuple(causal))

    def rule(self, parent: str | None, sibling_index: int):
        ts = self.ts
        rule_id = None
        if ts.peek().kind == "WORD" and ts.peek(1).text == ":" and ts.peek(1).kind == "PUNCT":
            rule_id = ts.ident("rule id").text
            ts.expect(":")
        kw = ts.peek()
        if ts.accept("decision"):
            return self.decision(rule_id, parent, sibling_index)
        if ts.accept("causal"):
            if parent is not None:
                ts.fail("causal rules cannot appear inside an except block", kw)
            return self.causal(rule_id)
        ts.fail(f"expected 'decision' or 'causal', found {kw.text or 'end of input'!r}", kw)

    def decision(self, rule_id, parent, sibling_index) -> DecisionRule:
        ts = self.ts
        if rule_id is None:
            if parent is None:
                self.counts["decision"] += 1
                rule_id = f"q{self.counts['decision']}"
            else:
                rule_id = f"{parent}_e{sibling_index + 1}"
        head = ts.ident("decision atom").text
        body: tuple[Literal, ...] = ()
        if ts.accept(":-"):
            body = self.literals()
        exceptions = []
        if ts.accept("except"):
            ts.expect("{")
            while not ts.at("}"):
                if ts.done:
                    ts.fail("unterminated except block", ts.peek())
                exc = self.rule(parent=rule_id, sibling_index=len(exceptions))
                exceptions.append(exc)
            ts.expect("}")
        ts.expect(".")
        return DecisionRule(rule_id, head, body, tuple(exceptions))

    def causal(self, rule_id) -> CausalRule:
        ts = self.ts
        if rule_id is None:
            self.counts["causal"] += 1
            rule_id = f"c{self.counts['causal']}"
        head = self.literal()
        ts.expect(":-")
        body = self.literals()
        ts.expect(".")
        return CausalRule(rule_id, head, body)

    def literals(self) -> tuple[Literal, ...]:
        lits = [self.literal()]
        while self.ts.accept(","):
            lits.append(self.literal())
        return tuple(lits)

    def literal(self) -> Literal:
        ts = self.ts
        name_tok = ts.ident("feature name")
        feature = name_tok.text
        if ts.accept("in"):
            ts.expect("[")
            lo = ts.number()
            ts.expect(",")
            hi = ts.number()
            ts.expect(")")
            return Literal(feature, Op.IN, (lo, hi))
        op_tok = ts.peek()
        if op_tok.kind != "OP" or op_tok.text == ":-":
            ts.fail(f"expected comparison operator, found {op_tok.text or 'end of input'!r}", op_tok)
        ts.next()
        op = Op(op_tok.text)
        val_tok = ts.symbol()
        numeric = None
        if self.schema is not None and feature in self.schema:
            numeric = self.schema[feature].numeric
        if numeric is None:
            numeric = val_tok.kind == "NUMBER"
        if numeric:
            if val_tok.kind != "NUMBER":
                ts.fail(f"numeric feature {feature} compared with non-number {val_tok.text}", val_tok)
            value: Value = Fraction(val_tok.text)
        else:
            value = symbol_text(val_tok)
        return Literal(feature, op, value)


def parse_ruleset(text: str, schema: Schema | None = None) -> RuleSet:
    """Parse rule source; with a schema, also validate and raise on errors."""
    rs = _RuleParser(text, schema).program()
    if schema is not None:
        errors = [d for d in validate_ruleset(rs, schema) if d.severity == "error"]
        if errors:
            raise RuleError(errors)
    return rs


def serialize_ruleset(rs: RuleSet) -> str:
    lines = ["# rules: %d decision, %d causal" % (len(rs.decision_rules), len(rs.causal_rules))]
    lines += [r.to_text() for r in rs.decision_rules]
    lines += [c.to_text() for c in rs.causal_rules]
    return "\n".join(lines) + "\n"


# -- validation ------------------------------------------------------------

def _check_literal(lit: Literal, schema: Schema, rule_id: str) -> list[Diagnostic]:
    if lit.feature not in schema:
        return [Diagnostic("unknown_feature", f"unknown feature {lit.feature!r}", rule_id)]
    feat = schema[lit.feature]
    if isinstance(feat.domain, CategoricalDomain):
        if lit.op in ORDERING_OPS:
            return [Diagnostic("type_error", f"operator {lit.op.value} not defined on categorical {feat.name}", rule_id)]
        if lit.value not in feat.domain:
            return [Diagnostic("type_error", f"{lit.value!r} is not a value of categorical {feat.name}", rule_id)]
        return []
    if lit.op is Op.IN:
        lo, hi = lit.value
        if not (isinstance(lo, Fraction) and isinstance(hi, Fraction)) or lo >= hi:
            return [Diagnostic("type_error", f"empty or malformed range in {lit}", rule_id)]
        return []
    if not isinstance(lit.value, Fraction):
        return [Diagnostic("type_error", f"numeric {feat.name} compared with {lit.value!r}", rule_id)]
    return []


def validate_ruleset(rs: RuleSet, schema: Schema) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    seen: set[str] = set()
    for rid in rs.rule_ids():
        if not IDENT_RE.match(rid):
            diags.append(Diagnostic("bad_id", f"rule id {rid!r} is not an identifier", rid))
        if rid in seen:
            diags.append(Diagnostic("duplicate_id", f"rule id {rid!r} used more than once", rid))
        seen.add(rid)
    atom = rs.decision_atom
    for top in rs.decision_rules:
        if top.head != atom:
            diags.append(Diagnostic("head_mismatch", f"decision head {top.head!r} differs from {atom!r}", top.id))
        for r in top.walk():
            for lit in r.body:
                diags += _check_literal(lit, schema, r.id)
    for c in rs.causal_rules:
        for lit in c.body + (c.head,):
            diags += _check_literal(lit, schema, c.id)
        if any(lit.feature == c.effect for lit in c.body):
            diags.append(Diagnostic("effect_in_body", f"effect {c.effect!r} appears in its own body", c.id))
    if not any(d.severity == "error" for d in diags):
        diags += _causal_conflicts(rs, schema)
    return diags


def _causal_conflicts(rs: RuleSet, schema: Schema) -> list[Diagnostic]:
    out = []
    rules = rs.causal_rules
    for i, a in enumerate(rules):
        for b in rules[i + 1:]:
            if a.effect != b.effect:
                continue
            if conjunction_satisfiable(a.body + b.body, schema) and not conjunction_satisfiable((a.head, b.head), schema):
                out.append(Diagnostic(
                    "causal_conflict",
                    f"{a.id} and {b.id} can fire together but force incompatible values of {a.effect}",
                    a.id, severity="warning"))
    return out


def conjunction_satisfiable(literals, schema: Schema) -> bool:
    """Whether some in-domain value assignment satisfies every literal."""
    by_feature: dict[str, list[Literal]] = {}
    for lit in literals:
        by_feature.setdefault(lit.feature, []).append(lit)
    return all(_feature_satisfiable(schema[name], lits) for name, lits in by_feature.items())


def _feature_satisfiable(feat, lits) -> bool:
    dom = feat.domain
    if isinstance(dom, CategoricalDomain):
        allowed = set(dom.values)
        for lit in lits:
            allowed = {v for v in allowed if (v == lit.value) == (lit.op is Op.EQ)}
        return bool(allowed)
    assert isinstance(dom, NumericDomain)
    lo, lo_open, hi, hi_open = dom.min, False, dom.max, False
    excluded = set()
    for lit in lits:
        v = lit.value
        if lit.op is Op.EQ:
            lo, lo_open, hi, hi_open = _tighten_lo(lo, lo_open, v, False) + _tighten_hi(hi, hi_open, v, False)
        elif lit.op is Op.NE:
            excluded.add(v)
        elif lit.op in (Op.GT, Op.GE):
            lo, lo_open = _tighten_lo(lo, lo_open, v, lit.op is Op.GT)
        elif lit.op in (Op.LT, Op.LE):
            hi, hi_open = _tighten_hi(hi, hi_open, v, lit.op is Op.LT)
        else:  # IN [a, b)
            a, b = v
            lo, lo_open = _tighten_lo(lo, lo_open, a, False)
            hi, hi_open = _tighten_hi(hi, hi_open, b, True)
    if lo > hi or (lo == hi and (lo_open or hi_open)):
        return False
    if lo == hi:
        return lo not in excluded
    return True  # a non-degenerate rational interval minus finitely many points


def _tighten_lo(lo, lo_open, v, strict):
    if v > lo or (v == lo and strict):
        return v, strict
    return lo, lo_open


def _tighten_hi(hi, hi_open, v, strict):
    if v < hi or (v == hi and strict):
        return v, strict
    return hi, hi_open
