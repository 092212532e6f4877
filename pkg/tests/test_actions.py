import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cogs.actions import (CAUSAL, DIRECT, Action, ActionError, ActionSpace, DomainError, PlausibilityError,
                          apply_action, candidate_values, canonical_value, enumerate_actions)
from cogs.inference import body_holds, eval_literal
from cogs.rules import Literal, Op, RuleSet, parse_ruleset
from cogs.schema import Feature, Mutability, NumericDomain, load_schema
from cogs.synth import random_problem, random_state


def test_threshold_candidates(loan, loan_q1):
    assert candidate_values(loan_q1.schema, "bank_balance", loan_q1.rules) == (60000,)
    assert candidate_values(loan.schema, "debt", loan.C) == (0,)
    assert candidate_values(loan.schema, "age", loan.rules) == ()
    # credit_score: falsify "< 600", reach the repair value 620
    assert loan.A.candidate_values("credit_score") == (600, 620)


def test_candidates_unknown_feature(loan):
    with pytest.raises(KeyError):
        loan.A.candidate_values("income")


def test_candidates_categorical_are_whole_domain():
    schema = load_schema("feature c: categorical {a, b, c}.")
    assert candidate_values(schema, "c", RuleSet()) == ("a", "b", "c")


@pytest.mark.parametrize("rule, expected", [
    ("decision r :- v < 5.", (5,)),
    ("decision r :- v <= 5.", (6,)),
    ("decision r :- v > 5.", (5,)),
    ("decision r :- v >= 5.", (4,)),
    ("decision r :- v == 5.", (4, 6)),
    ("decision r :- v != 5.", (5,)),
    ("decision r :- v in [3,6).", (2, 6)),
    ("decision r :- v < 0.", (0,)),
    ("decision r :- v > 10.", (10,)),
    # an exception is wanted true, so its satisfying side is used
    ("decision r :- w == 1 except { decision ab :- v >= 5. }.", (5,)),
])
def test_candidate_side_of_boundary(rule, expected):
    schema = load_schema("feature v: numeric [0,10] step 1.\nfeature w: numeric [0,1] step 1.")
    assert candidate_values(schema, "v", parse_ruleset(rule, schema)) == tuple(Fraction(x) for x in expected)


@pytest.mark.parametrize("op, value, expected", [
    (Op.EQ, 3, 3), (Op.GE, 3, 3), (Op.GT, 3, Fraction(7, 2)), (Op.LE, 3, 3), (Op.LT, 3, Fraction(5, 2)),
    (Op.NE, 3, Fraction(7, 2)), (Op.NE, 10, Fraction(19, 2)), (Op.IN, (Fraction(2), Fraction(4)), 2),
    (Op.GT, 10, None), (Op.LT, 0, None), (Op.EQ, 11, None),
])
def test_canonical_repair_values(op, value, expected):
    feat = Feature("v", NumericDomain(Fraction(0), Fraction(10), Fraction(1, 2)))
    v = value if isinstance(value, tuple) else Fraction(value)
    assert canonical_value(Literal("v", op, v), feat) == expected


def test_john_actions(loan):
    acts = enumerate_actions(loan.i, loan.schema, loan.rules)
    assert Action.direct("bank_balance", Fraction(60000)) in acts
    assert Action.direct("debt", Fraction(0)) in acts
    assert not any(a.feature == "credit_score" and a.kind == DIRECT for a in acts)


def test_repair_listed_first(toy):
    acts = toy.A.enumerate(toy.state(1, 0))
    assert acts[0] == Action(CAUSAL, "y", "1", "c1")
    assert [a.kind for a in acts[1:]] == [DIRECT] * (len(acts) - 1)


def test_all_immutable_has_no_actions():
    schema = load_schema("feature a: numeric [0,5] step 1, immutable.\nfeature b: categorical {p, q}, immutable.")
    rules = parse_ruleset("decision r :- a < 3, b == p.", schema)
    assert enumerate_actions(schema.state(a=1, b="p"), schema, rules) == []


def test_order_is_schema_then_value():
    schema = load_schema("feature a: numeric [0,9] step 1.\nfeature b: categorical {p, q, r}.")
    rules = parse_ruleset("decision r :- a == 4.\ndecision r :- a > 7.", schema)
    acts = enumerate_actions(schema.state(a=4, b="q"), schema, rules)
    assert [(a.feature, a.value) for a in acts] == [("a", 3), ("a", 5), ("a", 7), ("b", "p"), ("b", "r")]


def test_monotone_directions():
    schema = load_schema("feature a: numeric [0,9] step 1, monotone_increasing.\n"
                         "feature b: categorical {lo, mid, hi}, monotone_decreasing.")
    rules = parse_ruleset("decision r :- a == 4.", schema)
    acts = enumerate_actions(schema.state(a=4, b="mid"), schema, rules)
    assert [(a.feature, a.value) for a in acts] == [("a", 5), ("b", "lo")]


def test_apply_examples(loan):
    assert loan.A.apply(loan.i, Action.direct("bank_balance", Fraction(60000))) == loan.state(31, 5000, 60000, 599)
    s = loan.state(31, 0, 60000, 599)
    (repair,) = loan.A.causal_repairs(s)
    assert loan.A.apply(s, repair) == loan.state(31, 0, 60000, 620)
    with pytest.raises(PlausibilityError):
        apply_action(loan.i, Action.direct("age", Fraction(30)), loan.schema, loan.rules)


@pytest.mark.parametrize("action, error", [
    (Action.direct("credit_score", Fraction(700)), PlausibilityError),
    (Action.direct("debt", Fraction(-1)), DomainError),
    (Action.direct("income", Fraction(1)), ActionError),
    (Action(CAUSAL, "credit_score", Fraction(620), "C1"), ActionError),  # C1 body does not hold for John
    (Action(CAUSAL, "credit_score", Fraction(620), "C9"), ActionError),
    (Action("teleport", "debt", Fraction(0)), ActionError),
])
def test_apply_rejects(loan, action, error):
    with pytest.raises(error):
        loan.A.apply(loan.i, action)


def test_unchecked_apply_skips_legality(loan):
    s = loan.A.apply(loan.i, Action.direct("credit_score", Fraction(700)), checked=False)
    assert s["credit_score"] == 700


@given(st.integers(0, 2**32 - 1))
def test_emitted_actions_are_legal(seed):
    p = random_problem(seed)
    A = p.action_space()
    s = random_state(random.Random(seed), p.schema)
    acts = A.enumerate(s)
    assert acts == A.enumerate(s)
    for a in acts:
        f = p.schema[a.feature]
        t = A.apply(s, a)
        assert [n for n in p.schema.names if t[n] != s[n]] == [a.feature]
        assert f.mutability is not Mutability.IMMUTABLE
        if f.mutability is Mutability.MONOTONE_INCREASING:
            assert f.domain.order(t[a.feature]) > f.domain.order(s[a.feature])
        if f.mutability is Mutability.MONOTONE_DECREASING:
            assert f.domain.order(t[a.feature]) < f.domain.order(s[a.feature])
        if a.kind == DIRECT:
            assert f.mutability.directly_actionable
        else:
            rule = p.C.causal(a.rule_id)
            assert body_holds(rule.body, s) and not eval_literal(rule.head, s)
            assert eval_literal(rule.head, t)
