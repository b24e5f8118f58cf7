"""Recursive-descent parser for the arithmetic expression language.

Grammar (whitespace insignificant)::

    expr   := ('+'|'-')? term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' ('-')? integer)?
    base   := integer | symbol | '(' expr ')'

Expressions parse to a small tree of tuples and are evaluated against an
environment mapping symbol names to values of any ring-like type.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Mapping


class ParseError(ValueError):
    def __init__(self, message: str, column: int, line: int | None = None, text: str = ""):
        self.message = message
        self.column = column
        self.line = line
        self.text = text
        loc = f"line {line}, column {column}" if line is not None else f"column {column}"
        super().__init__(f"{message} at {loc}")

    def to_dict(self) -> dict:
        return {"error": "ParseError", "message": self.message, "line": self.line, "column": self.column}


class UndeclaredSymbol(ValueError):
    def __init__(self, name: str, column: int | None = None):
        self.name = name
        self.column = column
        super().__init__(f"undeclared symbol {name!r}" + (f" at column {column}" if column else ""))


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<sym>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    column: int  # 1-based


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - 1]!r}", col, text=text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), start + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, after: Token | None = None):
        tok = self.peek()
        if tok is not None:
            raise ParseError(message, tok.column, text=self.text)
        # at end of input: blame the last token consumed
        col = after.column if after is not None else (self.tokens[-1].column if self.tokens else 1)
        raise ParseError(message, col, text=self.text)

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression", 1, text=self.text)
        node = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"unexpected {tok.text!r}", tok.column, text=self.text)
        return node

    def expr(self):
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text in "+-":
            self.take()
            node = self.term(after=tok)
            if tok.text == "-":
                node = ("neg", node)
        else:
            node = self.term()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.text not in "+-":
                return node
            self.take()
            rhs = self.term(after=tok)
            node = ("add" if tok.text == "+" else "sub", node, rhs)

    def term(self, after: Token | None = None):
        node = self.factor(after)
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.text not in "*/":
                return node
            self.take()
            rhs = self.factor(after=tok)
            node = ("mul" if tok.text == "*" else "div", node, rhs)

    def factor(self, after: Token | None = None):
        node = self.base(after)
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == "^":
            self.take()
            sign = 1
            nxt = self.peek()
            if nxt is not None and nxt.kind == "op" and nxt.text == "-":
                self.take()
                sign = -1
            nxt = self.peek()
            if nxt is None or nxt.kind != "int":
                self.fail("expected integer exponent", after=tok)
            node = ("pow", node, sign * int(self.take().text))
        return node

    def base(self, after: Token | None = None):
        tok = self.peek()
        if tok is None:
            self.fail("expected operand", after=after)
        if tok.kind == "int":
            self.take()
            return ("num", int(tok.text))
        if tok.kind == "sym":
            self.take()
            return ("sym", tok.text, tok.column)
        if tok.text == "(":
            self.take()
            node = self.expr()
            close = self.peek()
            if close is None or close.text != ")":
                self.fail("expected ')'", after=tok)
            self.take()
            return node
        self.fail(f"unexpected {tok.text!r}")


def parse_expression(text: str):
    """Parse ``text`` into an expression tree; raises :class:`ParseError`."""
    return _Parser(text).parse()


def free_symbols(node) -> list[tuple[str, int]]:
    kind = node[0]
    if kind == "sym":
        return [(node[1], node[2])]
    if kind == "num":
        return []
    if kind in ("neg",):
        return free_symbols(node[1])
    if kind == "pow":
        return free_symbols(node[1])
    return free_symbols(node[1]) + free_symbols(node[2])


def evaluate(node, env: Mapping[str, Any], number: Callable[[int], Any] = Fraction):
    """Evaluate an expression tree; ``number`` lifts integer literals."""
    kind = node[0]
    if kind == "num":
        return number(node[1])
    if kind == "sym":
        try:
            return env[node[1]]
        except KeyError:
            raise UndeclaredSymbol(node[1], node[2]) from None
    if kind == "neg":
        return -evaluate(node[1], env, number)
    if kind == "pow":
        base = evaluate(node[1], env, number)
        e = node[2]
        if e < 0:
            return number(1) / (base ** (-e))
        return base**e
    a = evaluate(node[1], env, number)
    b = evaluate(node[2], env, number)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if b == 0:
        raise ZeroDivisionError("division by zero in expression")
    return a / b


def check_symbols(node, allowed) -> None:
    for name, col in free_symbols(node):
        if name not in allowed:
            raise UndeclaredSymbol(name, col)
