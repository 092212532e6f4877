import json
import random
import subprocess
import sys

import jsonschema
import pytest

from cogs.cli import main
from cogs.data import DatasetTable, write_csv
from cogs.inference import decision
from cogs.report import BENCH_SCHEMA, EXPLAIN_SCHEMA, VERIFY_SCHEMA
from cogs.rules import parse_ruleset
from cogs.schema import load_schema
from cogs.synth import loan_rows
from conftest import DATA

LOAN = DATA / "loan"
TOY = DATA / "toy"


def loan_args(cmd, rules="decision.rules", causal=True, *extra):
    args = [cmd, "--schema", str(LOAN / "schema.txt"), "--rules", str(LOAN / rules),
            "--instance", str(LOAN / "john.instance")]
    if causal:
        args += ["--causal", str(LOAN / "causal.rules")]
    return args + list(extra)


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def table_rows(text):
    lines = text.splitlines()
    return {ln.split()[0]: ln.split()[1:] for ln in lines[2:] if ln and not ln.startswith(("step", "path"))}


def test_explain_example_one(capsys):
    code, out, _ = run(capsys, loan_args("explain", "decision_q1.rules", False))
    assert code == 0
    rows = table_rows(out)
    assert rows["bank_balance"] == ["40000", "Direct", "60000"]
    assert rows["age"][1] == rows["debt"][1] == rows["credit_score"][1] == "N/A"


def test_explain_example_two(capsys):
    code, out, _ = run(capsys, loan_args("explain"))
    assert code == 0
    rows = table_rows(out)
    assert rows["debt"] == ["5000", "Direct", "0"]
    assert rows["credit_score"] == ["599", "Causal", "620"]


def test_explain_json_matches_text(capsys):
    _, text, _ = run(capsys, loan_args("explain"))
    code, out, _ = run(capsys, loan_args("explain", "decision.rules", True, "--format", "json"))
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, EXPLAIN_SCHEMA)
    rows = table_rows(text)
    assert {k: str(v) for k, v in doc["goal"].items()} == {k: r[2] for k, r in rows.items()}
    assert doc["stats"]["path_len"] == len(doc["path"]) == 3
    kinds = [(a["kind"], a["feature"], a["from"], a["to"]) for step in doc["path"] for a in step["actions"]]
    assert ("direct", "debt", 5000, 0) in kinds and ("causal", "credit_score", 599, 620) in kinds


def test_explain_already_approved(capsys, tmp_path):
    inst = tmp_path / "ok.instance"
    inst.write_text("age = 31\ndebt = 0\nbank_balance = 60000\ncredit_score = 620\n")
    args = loan_args("explain", "decision.rules", True, "--format", "json")
    args[args.index("--instance") + 1] = str(inst)
    code, out, _ = run(capsys, args)
    doc = json.loads(out)
    assert code == 0 and len(doc["path"]) == 1 and doc["path"][0]["actions"] == []


def test_explain_exit_codes(capsys, tmp_path):
    assert run(capsys, loan_args("explain", "decision.rules", True, "--max-path-len", "2"))[0] == 2
    assert run(capsys, loan_args("explain", "decision.rules", True, "--max-expansions", "1"))[0] == 4
    bad = tmp_path / "bad.rules"
    bad.write_text("decision reject :- income < 5.")
    code, _, err = run(capsys, loan_args("explain", str(bad)))
    assert code == 1 and "income" in err
    code, _, err = run(capsys, loan_args("explain", "missing.rules"))
    assert code == 1 and "missing.rules" in err
    inconsistent = tmp_path / "i.instance"
    inconsistent.write_text("age = 31\ndebt = 0\nbank_balance = 1\ncredit_score = 500\n")
    args = loan_args("explain")
    args[args.index("--instance") + 1] = str(inconsistent)
    code, _, err = run(capsys, args)
    assert code == 1 and "causal rule" in err
    assert run(capsys, ["explain"])[0] == 1
    assert run(capsys, ["bogus"])[0] == 1


def test_verify_toy(capsys):
    code, out, _ = run(capsys, ["verify", "--schema", str(TOY / "schema.txt"), "--rules", str(TOY / "decision.rules"),
                                "--causal", str(TOY / "causal.rules"), "--instance", str(TOY / "start.instance")])
    assert (code, out.strip()) == (0, "sound, minimal (2 == 2)")


def test_verify_example_two(capsys):
    code, out, _ = run(capsys, loan_args("verify"))
    assert (code, out.strip()) == (0, "sound, minimal (3 == 3)")
    code, out, _ = run(capsys, loan_args("verify", "decision.rules", True, "--format", "json"))
    doc = json.loads(out)
    jsonschema.validate(doc, VERIFY_SCHEMA)
    assert doc["verdict"] == "sound, minimal (3 == 3)" and doc["sound"] and doc["minimal"]
    jsonschema.validate(doc["path"], EXPLAIN_SCHEMA)


def test_verify_cap_and_no_solution(capsys):
    assert run(capsys, loan_args("verify", "decision.rules", True, "--cap", "5"))[0] == 3
    code, out, _ = run(capsys, loan_args("verify", "decision.rules", True, "--max-path-len", "2"))
    assert code == 2 and "agree" in out


@pytest.fixture
def q1_csv(tmp_path):
    schema = load_schema((LOAN / "schema.txt").read_text())
    q1 = parse_ruleset((LOAN / "decision_q1.rules").read_text(), schema)
    rows = loan_rows(random.Random(0), schema, 400)
    path = tmp_path / "q1.csv"
    with path.open("w", newline="") as fh:
        write_csv(DatasetTable(schema, rows, [decision(q1, s) for s in rows]), fh, "pred")
    return path


def test_extract_learns_q1(capsys, q1_csv, tmp_path):
    out_rules = tmp_path / "learned.rules"
    code, out, _ = run(capsys, ["extract", "--data", str(q1_csv), "--label", "pred",
                                "--schema", str(LOAN / "schema.txt"), "--out", str(out_rules)])
    assert code == 0
    metrics = dict(ln.split(": ") for ln in out.strip().splitlines())
    assert metrics["train fidelity"] == "1.0000"
    assert set(metrics) == {"train fidelity", "test fidelity", "accuracy", "precision", "recall", "f1"}
    learned = parse_ruleset(out_rules.read_text(), load_schema((LOAN / "schema.txt").read_text()))
    assert len(learned.decision_rules) == 1


def test_extract_to_stdout_is_a_rules_file(capsys, q1_csv):
    code, out, _ = run(capsys, ["extract", "--data", str(q1_csv), "--label", "pred"])
    assert code == 0
    rules = parse_ruleset(out)  # metric lines are comments
    assert rules.decision_rules


def test_extract_errors(capsys, q1_csv):
    code, _, err = run(capsys, ["extract", "--data", str(q1_csv), "--label", "nope"])
    assert code == 1 and "nope" in err
    assert run(capsys, ["extract", "--label", "pred"])[0] == 1


def test_extract_pass_through(capsys):
    code, out, _ = run(capsys, ["extract", "--rules-in", str(LOAN / "decision.rules")])
    assert code == 0
    assert parse_ruleset(out) == parse_ruleset((LOAN / "decision.rules").read_text())


def test_bench_synthetic(capsys):
    code, out, _ = run(capsys, ["bench", "--synthetic", "2,2", "--synthetic", "3,3", "--reps", "2",
                                "--minimal", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, BENCH_SCHEMA)
    assert [r["avg_feature_values"] for r in doc["rows"]] == [2.0, 3.0]


def test_bench_zero_reps(capsys):
    code, out, _ = run(capsys, ["bench", "--spec", str(DATA / "bench" / "loan.json"), "--reps", "0"])
    assert code == 0
    assert len(out.strip().splitlines()) == 2  # header and rule only
    code, out, _ = run(capsys, ["bench", "--spec", str(DATA / "bench" / "loan.json"), "--reps", "0", "--format", "json"])
    assert json.loads(out) == {"reps": 0, "rows": []}


def test_bench_file_variants(capsys):
    code, out, _ = run(capsys, ["bench", "--spec", str(DATA / "bench" / "loan.json"), "--reps", "1", "--format", "json"])
    doc = json.loads(out)
    assert code == 0 and [r["path_len"] for r in doc["rows"]] == [2, 3]
    assert all(r["avg_feature_values"] is None for r in doc["rows"])


def test_bench_bad_inputs(capsys, tmp_path):
    spec = tmp_path / "b.json"
    spec.write_text("{not json")
    assert run(capsys, ["bench", "--spec", str(spec)])[0] == 1
    spec.write_text('{"variants": [{"name": "x"}]}')
    assert run(capsys, ["bench", "--spec", str(spec)])[0] == 1
    assert run(capsys, ["bench", "--synthetic", "2,a"])[0] == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cogs.cli", *loan_args("verify")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "sound, minimal (3 == 3)"
