"""Command-line entry point.

Exit codes:
  0  success
  1  input error (unreadable or malformed files, invalid instance, bad flags)
  2  no solution within the path-length bound
  3  oracle state space over the cap
  4  expansion budget exhausted
  5  verification failed (unsound path or planner/oracle disagreement)
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ._lexer import ParseError
from .actions import ActionSpace
from .bench import BenchRow, load_spec, run_bench, synthetic_variant
from .data import DataError, truthy, read_csv, train_test_split
from .inference import is_causally_consistent
from .learner import LearnParams, classification_metrics, extract_logic, fidelity
from .oracle import DEFAULT_CAP, OracleCapExceeded, bfs_shortest_path, plausibility_violations, verify_path
from .planner import BudgetExhausted, NoSolution, PlanConfig, find_path
from .report import format_table, path_json, path_text
from .rules import RuleError, RuleSet, parse_ruleset, serialize_ruleset, validate_ruleset
from .schema import Schema, SchemaError, load_schema, parse_instance

EXIT_OK, EXIT_INPUT, EXIT_NO_SOLUTION, EXIT_CAP, EXIT_BUDGET, EXIT_UNSOUND = 0, 1, 2, 3, 4, 5

INPUT_ERRORS = (ParseError, RuleError, SchemaError, DataError, OSError, ValueError, KeyError)

log = logging.getLogger("cogs")


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _load_schema(path: str) -> Schema:
    try:
        return load_schema(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}:{exc}") from None


def _load_rules(path: str, schema: Schema | None) -> RuleSet:
    try:
        return parse_ruleset(_read(path), schema)
    except ParseError as exc:
        raise InputError(f"{path}:{exc}") from None
    except RuleError as exc:
        raise InputError("\n".join(f"{path}: {d}" for d in exc.diagnostics)) from None


def _load_problem(args) -> tuple[Schema, RuleSet, RuleSet]:
    schema = _load_schema(args.schema)
    rules = _load_rules(args.rules, schema)
    if args.causal:
        rules = rules.merge(_load_rules(args.causal, schema))
    for d in validate_ruleset(rules, schema):
        if d.severity == "error":
            raise InputError(str(d))
        log.warning("%s", d)
    return schema, rules.only_decisions(), rules.only_causal()


def _load_instance(path: str, schema: Schema, C: RuleSet):
    try:
        s = parse_instance(_read(path), schema)
    except ParseError as exc:
        raise InputError(f"{path}:{exc}") from None
    except SchemaError as exc:
        raise InputError(f"{path}: {exc}") from None
    if not is_causally_consistent(C, s):
        raise InputError(f"{path}: instance violates a causal rule")
    return s


def _plan_config(args, minimal: bool | None = None) -> PlanConfig:
    return PlanConfig(max_path_len=args.max_path_len,
                      minimal=args.minimal if minimal is None else minimal,
                      max_expansions=args.max_expansions, seed=args.seed)


def cmd_explain(args) -> int:
    schema, Q, C = _load_problem(args)
    i = _load_instance(args.instance, schema, C)
    A = ActionSpace(schema, Q.merge(C))
    try:
        path = find_path(i, C, Q, A, _plan_config(args))
    except NoSolution as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.format == "json":
        print(json.dumps(path_json(path, schema), indent=2))
    else:
        print(path_text(path, schema))
    return EXIT_OK


def _verdict(path, violations, oracle) -> tuple[str, int, dict]:
    p_len = len(path) if path is not None else None
    o_len = len(oracle) if oracle is not None else None
    doc = {"sound": None, "violations": [str(v) for v in violations], "planner_len": p_len,
           "oracle_len": o_len, "minimal": None}
    if path is None and oracle is None:
        return "no solution (planner and oracle agree)", EXIT_NO_SOLUTION, doc
    if path is None:
        return f"disagreement: planner found no path, oracle found length {o_len}", EXIT_UNSOUND, doc
    doc["sound"] = not violations
    if oracle is None:
        return f"disagreement: oracle found no path, planner found length {p_len}", EXIT_UNSOUND, doc
    doc["minimal"] = p_len == o_len
    if violations:
        return "unsound: " + "; ".join(doc["violations"]), EXIT_UNSOUND, doc
    if p_len == o_len:
        return f"sound, minimal ({p_len} == {o_len})", EXIT_OK, doc
    return f"sound, not minimal ({p_len} > {o_len})", EXIT_UNSOUND, doc


def cmd_verify(args) -> int:
    schema, Q, C = _load_problem(args)
    i = _load_instance(args.instance, schema, C)
    A = ActionSpace(schema, Q.merge(C))
    try:
        oracle = bfs_shortest_path(i, C, Q, A, args.max_path_len, cap=args.cap)
    except OracleCapExceeded as exc:
        print(f"oracle cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    try:
        path = find_path(i, C, Q, A, _plan_config(args, minimal=True))
    except NoSolution:
        path = None
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    violations = []
    if path is not None:
        violations = [str(v) for v in verify_path(path, i, C, Q, A)]
        violations += [f"plausibility: {m}" for m in plausibility_violations(path, schema)]
    verdict, code, doc = _verdict(path, violations, oracle)
    if args.format == "json":
        doc["verdict"] = verdict
        doc["path"] = path_json(path, schema) if path is not None else None
        print(json.dumps(doc, indent=2))
    else:
        print(verdict)
    return code


def _metric(v) -> str:
    return "undefined" if v is None else f"{v:.4f}"


def cmd_extract(args) -> int:
    schema = _load_schema(args.schema) if args.schema else None
    if args.rules_in:
        rules = _load_rules(args.rules_in, schema)
        text = serialize_ruleset(rules)
        if not args.data:
            _emit_rules(text, args.out)
            return EXIT_OK
    if not args.data or not args.label:
        raise InputError("--data and --label are required unless --rules-in is given")
    extra = [args.truth] if args.truth else []
    try:
        table, extras = read_csv(args.data, args.label, schema, args.positive, extra)
    except OSError as exc:
        raise InputError(f"{args.data}: {exc.strerror or exc}") from None
    if not len(table):
        raise InputError(f"{args.data}: no data rows")
    train, test = train_test_split(table, args.test_fraction, args.seed)
    if not args.rules_in:
        params = LearnParams(max_rules=args.max_rules, max_exception_depth=args.max_exception_depth,
                             min_coverage_ratio=args.min_coverage)
        rules = extract_logic(train, params)
        text = serialize_ruleset(rules)
    _emit_rules(text, args.out)
    lines = [f"train fidelity: {fidelity(rules, train):.4f}"]
    if len(test):
        lines.append(f"test fidelity: {fidelity(rules, test):.4f}")
        truth_test = test
        if args.truth:
            truth = [truthy(v, args.positive) for v in extras[args.truth]]
            # same length and seed, so the same held-out rows
            truth_test = train_test_split(table.with_labels(truth), args.test_fraction, args.seed)[1]
        m = classification_metrics(rules, truth_test)
        lines += [f"{k}: {_metric(v)}" for k, v in m.as_dict().items()]
    prefix = "# " if not args.out else ""
    print("\n".join(prefix + ln for ln in lines))
    return EXIT_OK


def _emit_rules(text: str, out: str | None):
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise InputError(f"{out}: {exc.strerror or exc}") from None
    else:
        sys.stdout.write(text)


def _bench_text(rows: list[BenchRow]) -> str:
    table = [[r.name, "-" if r.avg_feature_values is None else f"{r.avg_feature_values:g}",
              f"{r.mean_s:.4f} ± {r.std_s:.4f}", "-" if r.path_len is None else str(r.path_len)] for r in rows]
    return format_table(["Variant", "Average # Feature Values", "Time (s)", "Path length"], table)


def cmd_bench(args) -> int:
    config = {}
    variants = []
    if args.spec:
        try:
            variants, config = load_spec(args.spec)
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.spec}: {exc}") from None
        except (KeyError, TypeError) as exc:
            raise InputError(f"{args.spec}: malformed variant entry ({exc})") from None
    for counts in args.synthetic or []:
        try:
            variants.append(synthetic_variant([int(c) for c in counts.split(",")]))
        except ValueError:
            raise InputError(f"--synthetic expects comma-separated value counts, got {counts!r}") from None
    cfg = PlanConfig(max_path_len=config.get("max_path_len", args.max_path_len),
                     minimal=config.get("minimal", args.minimal),
                     max_expansions=config.get("max_expansions", args.max_expansions), seed=args.seed)
    rows = run_bench(variants, args.reps, cfg)
    if args.format == "json":
        print(json.dumps({"reps": max(args.reps, 0), "rows": [r.as_dict() for r in rows]}, indent=2))
    else:
        print(_bench_text(rows))
    return EXIT_OK


def _add_search_flags(p: argparse.ArgumentParser, max_len: int = 10):
    p.add_argument("--max-path-len", type=int, default=max_len, help="path length bound, in states")
    p.add_argument("--max-expansions", type=int, default=1_000_000, help="search budget")
    p.add_argument("--format", choices=["text", "json"], default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cogs", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log search progress to stderr")
    parser.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("explain", cmd_explain, "find a counterfactual path for one instance"),
                            ("verify", cmd_verify, "check the planner's path against the brute-force oracle")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--schema", required=True)
        p.add_argument("--rules", required=True, help="decision rules (may also hold causal rules)")
        p.add_argument("--causal", help="causal rules")
        p.add_argument("--instance", required=True, help="one 'feature = value' per line")
        _add_search_flags(p)
        if name == "explain":
            p.add_argument("--minimal", action="store_true", help="iterative deepening for a shortest path")
        else:
            p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest state space the oracle enumerates")
        p.set_defaults(func=fn)

    p = sub.add_parser("extract", help="learn decision rules from a model's predictions")
    p.add_argument("--data", help="CSV with a header row")
    p.add_argument("--label", help="column holding the model's predictions")
    p.add_argument("--positive", help="label value meaning the undesired outcome (default 1/true/yes)")
    p.add_argument("--truth", help="column with ground-truth labels for accuracy/precision/recall/F1")
    p.add_argument("--schema", help="schema file (inferred from the CSV when omitted)")
    p.add_argument("--rules-in", help="rule-based model: pass its rules through unchanged")
    p.add_argument("--out", help="write rules here instead of stdout")
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--max-rules", type=int, default=10)
    p.add_argument("--max-exception-depth", type=int, default=2)
    p.add_argument("--min-coverage", type=float, default=0.02, help="minimum rule coverage, fraction of positives")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("bench", help="time path finding across schema variants")
    p.add_argument("--spec", help="JSON file listing variants")
    p.add_argument("--synthetic", action="append", metavar="K1,K2,...",
                   help="add a synthetic variant with these categorical value counts")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--minimal", action="store_true")
    _add_search_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
