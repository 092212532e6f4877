import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cogs.actions import CAUSAL, Action, ActionSpace
from cogs.inference import is_counterfactual
from cogs.oracle import (OracleCapExceeded, bfs_shortest_path, brute_force_counterfactuals, enumerate_space,
                         plausibility_violations, successors, verify_path)
from cogs.planner import CandidatePath, VisitedEntry, find_path
from cogs.rules import RuleSet, parse_ruleset
from cogs.schema import load_schema
from cogs.synth import random_problem

BOOLS4 = load_schema("\n".join(f"feature b{k}: numeric [0,1] step 1." for k in range(4)))
BOOL_RULES = parse_ruleset("\n".join(f"decision r :- b{k} == 0." for k in range(4)), BOOLS4)


def test_toy_space(toy):
    assert len(enumerate_space(toy.schema, toy.rules)) == 4


def test_example_two_grid(loan):
    space = enumerate_space(loan.schema, loan.rules, extra_states=[loan.i])
    assert len(space) == 12
    assert {s["credit_score"] for s in space} == {599, 600, 620}
    assert {s["debt"] for s in space} == {0, 5000} and {s["age"] for s in space} == {31}


def test_cap():
    assert len(enumerate_space(BOOLS4, BOOL_RULES)) == 16
    with pytest.raises(OracleCapExceeded):
        enumerate_space(BOOLS4, BOOL_RULES, cap=10)


def test_toy_counterfactuals(toy):
    assert brute_force_counterfactuals(toy.schema, toy.C, toy.Q) == {toy.state(1, 1)}
    everything = set(enumerate_space(toy.schema, RuleSet()))
    assert brute_force_counterfactuals(toy.schema, RuleSet(), RuleSet()) == everything


def test_no_counterfactuals():
    schema = load_schema("feature x: numeric [0,1] step 1.\nfeature y: numeric [0,1] step 1.")
    rules = parse_ruleset("decision r :- x == 0.\ndecision r :- y == 1.\ncausal y == 1 :- x == 1.", schema)
    assert brute_force_counterfactuals(schema, rules.only_causal(), rules.only_decisions()) == set()


def test_toy_shortest_path(toy):
    path = bfs_shortest_path(toy.i, toy.C, toy.Q, toy.A, 5)
    assert path.states == [toy.state(0, 0), toy.state(1, 1)]
    assert bfs_shortest_path(toy.state(1, 1), toy.C, toy.Q, toy.A, 5).states == [toy.state(1, 1)]


def test_example_two_shortest(loan):
    path = bfs_shortest_path(loan.i, loan.C, loan.Q, loan.A, 10)
    assert len(path) == 3 and path.goal == loan.state(31, 0, 60000, 620)
    assert verify_path(path, loan.i, loan.C, loan.Q, loan.A) == []
    assert bfs_shortest_path(loan.i, loan.C, loan.Q, loan.A, 2) is None


def test_toy_successors(toy):
    succ = successors(toy.i, toy.C, toy.A)
    assert set(succ) == {toy.state(0, 1), toy.state(1, 1)}
    assert [a for _, a in succ[toy.state(1, 1)]] == [Action.direct("x", "1"), Action(CAUSAL, "y", "1", "c1")]


def test_planner_example_one_verifies(loan_q1):
    path = find_path(loan_q1.i, RuleSet(), loan_q1.Q, loan_q1.A)
    assert verify_path(path, loan_q1.i, RuleSet(), loan_q1.Q, loan_q1.A) == []
    assert plausibility_violations(path, loan_q1.schema) == []


def _codes(path, p):
    return {v.code for v in verify_path(path, p.i, p.C, p.Q, p.A)}


def test_interior_goal_detected(loan_q1):
    goal = loan_q1.state(31, 5000, 60000, 599)
    far = loan_q1.state(31, 5000, 60000, 599).set("debt", Fraction(0))
    path = CandidatePath((VisitedEntry(loan_q1.i),
                          VisitedEntry(goal, (Action.direct("bank_balance", Fraction(60000)),)),
                          VisitedEntry(far, (Action.direct("debt", Fraction(0)),))))
    loan_q1.C = RuleSet()
    assert "interior_goal" in _codes(path, loan_q1)


def test_broken_transition_detected(loan):
    path = find_path(loan.i, loan.C, loan.Q, loan.A)
    last = path.entries[-1]
    forged = CandidatePath(path.entries[:-1] + (VisitedEntry(last.state, last.actions_taken[:1]),))
    assert _codes(forged, loan) == {"broken_transition"}
    wrong_value = CandidatePath(path.entries[:-1] + (VisitedEntry(last.state, (Action.direct("debt", Fraction(1)),)
                                                                  + last.actions_taken[1:]),))
    assert "broken_transition" in _codes(wrong_value, loan)


def test_structural_violations(loan):
    good = find_path(loan.i, loan.C, loan.Q, loan.A)
    assert _codes(CandidatePath(()), loan) == {"empty_path"}
    assert "bad_start" in _codes(CandidatePath(good.entries[1:]), loan)
    assert "bad_end" in _codes(CandidatePath(good.entries[:-1]), loan)
    bad = loan.state(31, 0, 40000, 599)
    assert "inconsistent_state" in _codes(CandidatePath((VisitedEntry(bad),)), loan)


def test_plausibility_checker_catches_violations(loan):
    up = loan.i.set("age", Fraction(30))
    path = CandidatePath((VisitedEntry(loan.i), VisitedEntry(up, (Action.direct("credit_score", Fraction(700)),))))
    found = plausibility_violations(path, loan.schema)
    assert any("age" in m for m in found) and any("credit_score" in m for m in found)


@given(st.integers(0, 2**32 - 1))
def test_counterfactual_set_is_filtered_space(seed):
    p = random_problem(seed)
    space = enumerate_space(p.schema, p.rules)
    assert brute_force_counterfactuals(p.schema, p.C, p.Q) == {s for s in space if is_counterfactual(s, p.C, p.Q)}


@given(st.integers(0, 2**32 - 1))
def test_bfs_paths_are_sound(seed):
    p = random_problem(seed)
    A = p.action_space()
    path = bfs_shortest_path(p.initial, p.C, p.Q, A, 6)
    if path is not None:
        assert verify_path(path, p.initial, p.C, p.Q, A) == []
