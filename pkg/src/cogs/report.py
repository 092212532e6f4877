"""Text tables and JSON documents for paths, verdicts and timings."""

from __future__ import annotations

from fractions import Fraction

from ._lexer import format_number
from .actions import CAUSAL, DIRECT
from .planner import CandidatePath
from .schema import Schema, State

_KIND_LABEL = {DIRECT: "Direct", CAUSAL: "Causal"}


def json_value(v):
    """Integers stay exact; other rationals become floats."""
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else float(v)
    return v


def text_value(v) -> str:
    return format_number(v) if isinstance(v, Fraction) else str(v)


def state_json(s: State, schema: Schema) -> dict:
    return {f.name: json_value(s[f.name]) for f in schema}


def path_json(path: CandidatePath, schema: Schema) -> dict:
    steps = []
    prev = None
    for e in path.entries:
        actions = []
        cur = dict(prev) if prev is not None else None
        for a in e.actions_taken:
            actions.append({
                "kind": a.kind,
                "feature": a.feature,
                "from": json_value(cur[a.feature]),
                "to": json_value(a.value),
                "rule_id": a.rule_id,
            })
            cur[a.feature] = a.value
        steps.append({"state": state_json(e.state, schema), "actions": actions})
        prev = e.state
    stats = path.stats
    return {
        "initial": state_json(path.initial, schema),
        "goal": state_json(path.goal, schema),
        "path": steps,
        "stats": {
            "expansions": stats.expansions if stats else 0,
            "elapsed_ms": round(stats.elapsed_ms, 3) if stats else 0.0,
            "path_len": len(path),
        },
    }


def action_marks(path: CandidatePath) -> dict[str, str]:
    """Per feature: how it was changed along the path, in order of first use."""
    marks: dict[str, list[str]] = {}
    for a in path.actions():
        kinds = marks.setdefault(a.feature, [])
        if _KIND_LABEL[a.kind] not in kinds:
            kinds.append(_KIND_LABEL[a.kind])
    return {name: "+".join(k) for name, k in marks.items()}


def format_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)] if rows else [len(h) for h in header]
    line = lambda cells: "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(header), line(["-" * w for w in widths])]
    out.extend(line(r) for r in rows)
    return "\n".join(out)


def path_text(path: CandidatePath, schema: Schema) -> str:
    marks = action_marks(path)
    rows = [[f.name, text_value(path.initial[f.name]), marks.get(f.name, "N/A"), text_value(path.goal[f.name])]
            for f in schema]
    out = [format_table(["Feature", "Initial", "Action", "Goal"], rows), ""]
    for k, e in enumerate(path.entries[1:], 1):
        out.append(f"step {k}: " + ", ".join(str(a) for a in e.actions_taken))
    st = path.stats
    tail = f"path length {len(path)}"
    if st is not None:
        tail += f", {st.expansions} expansions, {st.elapsed_ms:.1f} ms"
    out.append(tail)
    return "\n".join(out)


_VALUE = {"type": ["integer", "number", "string"]}
_STATE = {"type": "object", "additionalProperties": _VALUE}

EXPLAIN_SCHEMA = {
    "type": "object",
    "required": ["initial", "goal", "path", "stats"],
    "properties": {
        "initial": _STATE,
        "goal": _STATE,
        "path": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["state", "actions"],
                "properties": {
                    "state": _STATE,
                    "actions": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["kind", "feature", "from", "to", "rule_id"],
                            "properties": {
                                "kind": {"enum": [DIRECT, CAUSAL]},
                                "feature": {"type": "string"},
                                "from": _VALUE,
                                "to": _VALUE,
                                "rule_id": {"type": ["string", "null"]},
                            },
                        },
                    },
                },
            },
        },
        "stats": {
            "type": "object",
            "required": ["expansions", "elapsed_ms", "path_len"],
            "properties": {
                "expansions": {"type": "integer", "minimum": 0},
                "elapsed_ms": {"type": "number", "minimum": 0},
                "path_len": {"type": "integer", "minimum": 1},
            },
        },
    },
}

VERIFY_SCHEMA = {
    "type": "object",
    "required": ["verdict", "sound", "violations", "planner_len", "oracle_len", "minimal"],
    "properties": {
        "verdict": {"type": "string"},
        "sound": {"type": ["boolean", "null"]},
        "violations": {"type": "array", "items": {"type": "string"}},
        "planner_len": {"type": ["integer", "null"]},
        "oracle_len": {"type": ["integer", "null"]},
        "minimal": {"type": ["boolean", "null"]},
        "path": {"type": ["object", "null"]},
    },
}

BENCH_SCHEMA = {
    "type": "object",
    "required": ["reps", "rows"],
    "properties": {
        "reps": {"type": "integer", "minimum": 0},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "avg_feature_values", "mean_s", "std_s", "path_len"],
                "properties": {
                    "name": {"type": "string"},
                    "avg_feature_values": {"type": ["number", "null"]},
                    "mean_s": {"type": "number", "minimum": 0},
                    "std_s": {"type": "number", "minimum": 0},
                    "path_len": {"type": ["integer", "null"]},
                },
            },
        },
    },
}
