import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cogs import ParseError
from cogs.schema import (CategoricalDomain, Feature, Mutability, NumericDomain, Schema, SchemaError, State,
                         format_instance, load_schema, parse_instance, state_distance, validate_state)


def test_numeric_monotone_feature():
    s = load_schema("feature age: numeric [18,99] step 1, monotone_increasing.")
    (f,) = list(s)
    assert f.name == "age" and f.numeric
    assert f.domain == NumericDomain(Fraction(18), Fraction(99), Fraction(1))
    assert f.mutability is Mutability.MONOTONE_INCREASING


def test_causal_only_not_directly_actionable():
    s = load_schema("feature credit_score: numeric [300,850] step 1, causal_only.")
    assert not s["credit_score"].mutability.directly_actionable


def test_categorical_and_comments():
    s = load_schema("# colours\nfeature c: categorical {red, green, \"dark blue\"}.  # trailing\n")
    assert s["c"].domain.values == ("red", "green", "dark blue")
    assert s["c"].mutability is Mutability.FREE


def test_empty_domain_rejected():
    with pytest.raises(ParseError, match="empty"):
        load_schema("feature x: categorical {}.")


@pytest.mark.parametrize("text, line, col", [
    ("feature a: numeric [0,1] step 1.\nfeature a: numeric [0,1] step 1.", 2, 9),
    ("feature a: numeric [0,1] step 1\n", 2, 1),
    ("feature a: numeric [0,1] stride 1.", 1, 26),
    ("feature a: numeric [5,1] step 1.", 1, 12),
    ("feature a: numeric [0,1] step 0.", 1, 12),
    ("feature a: numeric [0,1] step 1, sometimes.", 1, 34),
    ("feature a: ordinal {x}.", 1, 12),
])
def test_parse_errors_carry_location(text, line, col):
    with pytest.raises(ParseError) as info:
        load_schema(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_duplicate_categorical_values_rejected():
    with pytest.raises(ParseError, match="duplicate"):
        load_schema("feature c: categorical {a, b, a}.")


def test_schema_text_round_trip(loan):
    assert load_schema(loan.schema.to_text()) == loan.schema


def test_validate_john(loan):
    assert validate_state(loan.schema, loan.i) == []


def test_validate_missing_feature(loan):
    partial = {"age": Fraction(31), "debt": Fraction(5000), "bank_balance": Fraction(40000)}
    assert validate_state(loan.schema, partial) == ["credit_score: unassigned"]


def test_validate_out_of_domain(loan):
    bad = dict(loan.i, age=Fraction(17))
    (msg,) = validate_state(loan.schema, bad)
    assert msg.startswith("age:") and "outside domain" in msg


def test_validate_extra_feature(loan):
    bad = dict(loan.i, months=Fraction(12))
    assert validate_state(loan.schema, bad) == ["months: not declared in schema"]


def test_membership_ignores_step():
    dom = NumericDomain(Fraction(0), Fraction(10), Fraction(2))
    assert Fraction(3) in dom and Fraction(1, 3) in dom
    assert Fraction(11) not in dom and "3" not in dom


def test_distances(loan):
    john = loan.i
    assert state_distance(john, john) == 0
    assert state_distance(john, loan.state(31, 5000, 60000, 599)) == 1
    assert state_distance(john, loan.state(31, 0, 60000, 620)) == 3


def test_distance_schema_mismatch():
    with pytest.raises(SchemaError):
        state_distance(State({"a": 1}), State({"b": 1}))


def test_states_are_values(loan):
    a = loan.state(31, 5000, 40000, 599)
    assert a == loan.i and hash(a) == hash(loan.i)
    b = a.set("debt", Fraction(0))
    assert a["debt"] == 5000 and b["debt"] == 0
    with pytest.raises(TypeError):
        a["debt"] = 1


def test_instance_round_trip(loan):
    assert parse_instance(format_instance(loan.i, loan.schema), loan.schema) == loan.i


@pytest.mark.parametrize("text", ["age = 31\n", "age 31\n", "age = x\ndebt=1\nbank_balance=1\ncredit_score=300\n",
                                  "nope = 1\n"])
def test_bad_instances(loan, text):
    with pytest.raises((ParseError, SchemaError)):
        parse_instance(text, loan.schema)


SMALL = Schema([
    Feature("a", NumericDomain(Fraction(0), Fraction(2), Fraction(1))),
    Feature("b", CategoricalDomain(("p", "q"))),
    Feature("c", NumericDomain(Fraction(-1), Fraction(1), Fraction(1, 2))),
])
ALL_SMALL = [SMALL.state(dict(zip(SMALL.names, combo)))
             for combo in itertools.product(*(f.domain.values if not f.numeric else f.domain.grid() for f in SMALL))]


def test_distance_is_a_metric_exhaustively():
    for x, y in itertools.product(ALL_SMALL, repeat=2):
        d = state_distance(x, y)
        assert d == state_distance(y, x) and (d == 0) == (x == y)
    for x, y, z in itertools.product(ALL_SMALL[::3], ALL_SMALL[::2], ALL_SMALL):
        assert state_distance(x, z) <= state_distance(x, y) + state_distance(y, z)


assignments = st.fixed_dictionaries({
    "a": st.fractions(-3, 5),
    "b": st.sampled_from(["p", "q", "r"]),
    "c": st.fractions(-2, 2),
})


@given(assignments)
def test_accepted_states_are_in_domain(values):
    if not validate_state(SMALL, values):
        assert all(values[f.name] in f.domain for f in SMALL)
    else:
        assert any(values[f.name] not in f.domain for f in SMALL)
