from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from cogs.actions import ActionSpace
from cogs.rules import parse_ruleset
from cogs.schema import load_schema, parse_instance

DATA = Path(__file__).resolve().parent.parent / "data"

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def F(x):
    return Fraction(x)


class Loaded:
    """Schema, decision rules, causal rules and instance of one shipped problem."""

    def __init__(self, folder, schema, rules, causal=None, instance=None):
        base = DATA / folder
        self.schema = load_schema((base / schema).read_text())
        rs = parse_ruleset((base / rules).read_text(), self.schema)
        if causal:
            rs = rs.merge(parse_ruleset((base / causal).read_text(), self.schema))
        self.Q = rs.only_decisions()
        self.C = rs.only_causal()
        self.rules = rs
        self.A = ActionSpace(self.schema, rs)
        self.i = parse_instance((base / instance).read_text(), self.schema) if instance else None

    def state(self, *values):
        return self.schema.state(dict(zip(self.schema.names, values)))


@pytest.fixture
def loan_q1():
    return Loaded("loan", "schema.txt", "decision_q1.rules", instance="john.instance")


@pytest.fixture
def loan():
    return Loaded("loan", "schema.txt", "decision.rules", "causal.rules", "john.instance")


@pytest.fixture
def toy():
    return Loaded("toy", "schema.txt", "decision.rules", "causal.rules", "start.instance")


@pytest.fixture
def toy_exception():
    return Loaded("toy", "schema.txt", "exception.rules")


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
