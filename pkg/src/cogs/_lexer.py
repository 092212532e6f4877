"""Tokenizer shared by the schema and rule grammars."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


class ParseError(ValueError):
    """Syntax error with a 1-based source location."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER, WORD, STRING, OP, PUNCT, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<STRING>"(?:[^"\\]|\\.)*")
  | (?P<NUMBER>-?\d+(?:\.\d+)?(?:/\d+)?(?![A-Za-z0-9_\-]))
  | (?P<WORD>[A-Za-z_0-9][A-Za-z0-9_\-]*)
  | (?P<OP>==|!=|<=|>=|<|>|:-)
  | (?P<PUNCT>[:,.\[\](){}])
    """,
    re.VERBOSE,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_BARE_RE = re.compile(r"[A-Za-z_0-9][A-Za-z0-9_\-]*\Z")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("OP", "PUNCT", "WORD") and tok.text == text

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if not self.at(text):
            self.fail(f"expected {text!r}, found {describe(tok)}", tok)
        return self.next()

    def ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind != "WORD" or not IDENT_RE.match(tok.text):
            self.fail(f"expected {what}, found {describe(tok)}", tok)
        return self.next()

    def number(self) -> Fraction:
        tok = self.peek()
        if tok.kind != "NUMBER":
            self.fail(f"expected number, found {describe(tok)}", tok)
        return parse_number(self.next().text)

    def symbol(self) -> Token:
        """A categorical value: bare word, number text, or quoted string."""
        tok = self.peek()
        if tok.kind not in ("WORD", "NUMBER", "STRING"):
            self.fail(f"expected value, found {describe(tok)}", tok)
        return self.next()

    @property
    def done(self) -> bool:
        return self.peek().kind == "EOF"

    @staticmethod
    def fail(message: str, tok: Token):
        raise ParseError(message, tok.line, tok.col)


def describe(tok: Token) -> str:
    return "end of input" if tok.kind == "EOF" else repr(tok.text)


def parse_number(text: str) -> Fraction:
    return Fraction(text.strip())


def symbol_text(tok: Token) -> str:
    if tok.kind == "STRING":
        return tok.text[1:-1].replace('\\"', '"').replace("\\\\", "\\")
    return tok.text


def quote_symbol(value: str) -> str:
    if _BARE_RE.match(value) and not value.startswith("-"):
        return value
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_number(value: Fraction) -> str:
    """Exact text for a rational: integer, terminating decimal, or p/q."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    d = value.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    scaled = abs(value) * 10**places
    digits = str(scaled.numerator).rjust(places + 1, "0")
    sign = "-" if value < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"
