"""Feature declarations, domains, mutability classes and complete states.

Numeric values are exact :class:`fractions.Fraction` instances so rule
thresholds compare bit-exactly; categorical values are plain strings.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ._lexer import IDENT_RE, ParseError, TokenStream, format_number, parse_number, quote_symbol, symbol_text

Value = Union[Fraction, str]


class SchemaError(ValueError):
    """A schema that parses but violates a declaration invariant."""


class Mutability(enum.Enum):
    FREE = "free"
    IMMUTABLE = "immutable"
    MONOTONE_INCREASING = "monotone_increasing"
    MONOTONE_DECREASING = "monotone_decreasing"
    CAUSAL_ONLY = "causal_only"

    @property
    def directly_actionable(self) -> bool:
        return self not in (Mutability.IMMUTABLE, Mutability.CAUSAL_ONLY)


@dataclass(frozen=True)
class NumericDomain:
    min: Fraction
    max: Fraction
    step: Fraction

    kind = "numeric"

    def __post_init__(self):
        for name in ("min", "max", "step"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.min > self.max:
            raise SchemaError(f"numeric domain has min {self.min} > max {self.max}")
        if self.step <= 0:
            raise SchemaError("numeric domain step must be positive")

    def __contains__(self, value) -> bool:
        return isinstance(value, Fraction) and self.min <= value <= self.max

    def clip(self, value: Fraction) -> Fraction:
        return min(max(value, self.min), self.max)

    def order(self, value: Fraction) -> Fraction:
        return value

    def grid(self) -> list[Fraction]:
        """Every step-aligned value from min to max."""
        out, v = [], self.min
        while v <= self.max:
            out.append(v)
            v += self.step
        return out

    def to_text(self) -> str:
        return f"numeric [{format_number(self.min)},{format_number(self.max)}] step {format_number(self.step)}"


@dataclass(frozen=True)
class CategoricalDomain:
    values: tuple[str, ...]

    kind = "categorical"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise SchemaError("categorical domain is empty")
        if len(set(self.values)) != len(self.values):
            raise SchemaError("categorical domain has duplicate values")

    def __contains__(self, value) -> bool:
        return isinstance(value, str) and value in self.values

    def order(self, value: str) -> int:
        return self.values.index(value)

    def to_text(self) -> str:
        return "categorical {" + ", ".join(quote_symbol(v) for v in self.values) + "}"


Domain = Union[NumericDomain, CategoricalDomain]


@dataclass(frozen=True)
class Feature:
    name: str
    domain: Domain
    mutability: Mutability = Mutability.FREE

    @property
    def numeric(self) -> bool:
        return isinstance(self.domain, NumericDomain)

    def to_text(self) -> str:
        text = f"feature {self.name}: {self.domain.to_text()}"
        if self.mutability is not Mutability.FREE:
            text += f", {self.mutability.value}"
        return text + "."

    def format_value(self, value: Value) -> str:
        if self.numeric:
            return format_number(value)
        return quote_symbol(value)

    def coerce(self, raw) -> Value:
        """Convert user input (text or number) to this feature's value type."""
        if self.numeric:
            if isinstance(raw, Fraction):
                return raw
            if isinstance(raw, float):
                return Fraction(str(raw))
            return parse_number(str(raw))
        return str(raw)


class Schema:
    """Ordered, name-unique collection of features."""

    def __init__(self, features: Iterable[Feature]):
        self.features = tuple(features)
        self._by_name = {}
        for f in self.features:
            if not IDENT_RE.match(f.name):
                raise SchemaError(f"invalid feature name {f.name!r}")
            if f.name in self._by_name:
                raise SchemaError(f"duplicate feature {f.name!r}")
            self._by_name[f.name] = f

    def __getitem__(self, name: str) -> Feature:
        return self._by_name[name]

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Feature]:
        return iter(self.features)

    def __len__(self) -> int:
        return len(self.features)

    def __eq__(self, other) -> bool:
        return isinstance(other, Schema) and self.features == other.features

    def __hash__(self) -> int:
        return hash(self.features)

    def __repr__(self) -> str:
        return f"Schema({[f.name for f in self.features]})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def state(self, assignment: Mapping | None = None, **values) -> "State":
        """Build a state in schema order, coercing raw values."""
        merged = dict(assignment or {}, **values)
        unknown = set(merged) - set(self._by_name)
        if unknown:
            raise SchemaError(f"unknown features: {sorted(unknown)}")
        missing = [n for n in self.names if n not in merged]
        if missing:
            raise SchemaError(f"unassigned features: {missing}")
        return State((f.name, f.coerce(merged[f.name])) for f in self.features)

    def to_text(self) -> str:
        return "\n".join(f.to_text() for f in self.features) + ("\n" if self.features else "")


class State(Mapping):
    """Immutable, hashable total assignment feature name -> value."""

    __slots__ = ("_data", "_hash")

    def __init__(self, items: Iterable[tuple[str, Value]] | Mapping):
        data = dict(items.items() if isinstance(items, Mapping) else items)
        self._data = data
        self._hash = hash(frozenset(data.items()))

    def __getitem__(self, name: str) -> Value:
        return self._data[name]

    def __iter__(self):
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, State):
            return self._hash == other._hash and self._data == other._data
        return NotImplemented

    def set(self, name: str, value: Value) -> "State":
        data = dict(self._data)
        data[name] = value
        return State(data)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={format_number(v) if isinstance(v, Fraction) else v}" for k, v in self._data.items())
        return f"State({inner})"


def load_schema(text: str) -> Schema:
    """Parse the line-oriented schema grammar.

    ``feature <name>: numeric [<min>,<max>] step <step>[, <mutability>].``
    ``feature <name>: categorical {<v1>, <v2>, ...}[, <mutability>].``
    """
    ts = TokenStream(text)
    features: list[Feature] = []
    seen: dict[str, int] = {}
    while not ts.done:
        start = ts.expect("feature")
        name_tok = ts.ident("feature name")
        ts.expect(":")
        kind_tok = ts.ident("domain kind")
        try:
            if kind_tok.text == "numeric":
                ts.expect("[")
                lo = ts.number()
                ts.expect(",")
                hi = ts.number()
                ts.expect("]")
                ts.expect("step")
                step = ts.number()
                domain: Domain = NumericDomain(lo, hi, step)
            elif kind_tok.text == "categorical":
                ts.expect("{")
                values = []
                if not ts.at("}"):
                    values.append(symbol_text(ts.symbol()))
                    while ts.accept(","):
                        values.append(symbol_text(ts.symbol()))
                ts.expect("}")
                domain = CategoricalDomain(tuple(values))
            else:
                ts.fail(f"unknown domain kind {kind_tok.text!r}", kind_tok)
        except SchemaError as exc:
            raise ParseError(f"feature {name_tok.text}: {exc}", kind_tok.line, kind_tok.col) from None
        mutability = Mutability.FREE
        if ts.accept(","):
            mtok = ts.ident("mutability")
            try:
                mutability = Mutability(mtok.text)
            except ValueError:
                ts.fail(f"unknown mutability {mtok.text!r}", mtok)
        ts.expect(".")
        if name_tok.text in seen:
            raise ParseError(f"duplicate feature {name_tok.text!r} (first declared on line {seen[name_tok.text]})",
                             name_tok.line, name_tok.col)
        seen[name_tok.text] = start.line
        features.append(Feature(name_tok.text, domain, mutability))
    return Schema(features)


def validate_state(schema: Schema, state: Mapping) -> list[str]:
    """Return violations; an empty list means the state is valid."""
    problems = []
    for f in schema:
        if f.name not in state:
            problems.append(f"{f.name}: unassigned")
        elif state[f.name] not in f.domain:
            problems.append(f"{f.name}: value {state[f.name]!r} outside domain")
    for name in state:
        if name not in schema:
            problems.append(f"{name}: not declared in schema")
    return problems


def state_distance(a: State, b: State) -> int:
    """Number of features on which two states differ."""
    if set(a) != set(b):
        raise SchemaError("states are over different feature sets")
    return sum(1 for name in a if a[name] != b[name])


def parse_instance(text: str, schema: Schema) -> State:
    """Parse ``feature = value`` lines into a validated state."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'feature = value'", lineno, 1)
        name, value = (part.strip() for part in line.split("=", 1))
        if name not in schema:
            raise ParseError(f"unknown feature {name!r}", lineno, 1)
        if name in values:
            raise ParseError(f"feature {name!r} assigned twice", lineno, 1)
        if len(value) >= 2 and value[0] == value[-1] == '"':
            value = value[1:-1]
        try:
            values[name] = schema[name].coerce(value)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad numeric value {value!r} for {name}", lineno, 1) from None
    problems = validate_state(schema, values)
    if problems:
        raise SchemaError("; ".join(problems))
    return schema.state(values)


def format_instance(state: State, schema: Schema) -> str:
    return "".join(f"{f.name} = {f.format_value(state[f.name])}\n" for f in schema)
