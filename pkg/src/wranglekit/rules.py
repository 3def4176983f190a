"""Declarative predicate language for custom cell detectors.

Grammar (whitespace-insensitive, keywords case-sensitive)::

    expr     := or_expr
    or_expr  := and_expr ('or' and_expr)*
    and_expr := unary ('and' unary)*
    unary    := 'not' unary | atom
    atom     := '(' expr ')' | 'value is missing' | operand cmp operand
    operand  := number | 'value' | 'group_mean'
    cmp      := '<' | '<=' | '>' | '>=' | '==' | '!='

Evaluation is total: a numeric comparison touching a Missing or Text cell
(or an undefined group mean) is simply false, and ``value is missing`` is
true exactly for Missing cells. Rules therefore never raise at detection
time, which is what lets the engine run user-supplied rules as black boxes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .errors import RuleSyntaxError, RuleTypeError
from .groups import GroupStats
from .table import CellValue, format_number


@dataclass(frozen=True)
class Value:
    pass


@dataclass(frozen=True)
class GroupMean:
    pass


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class IsMissing:
    pass


@dataclass(frozen=True)
class Cmp:
    left: "Operand"
    op: str  # one of < <= > >= == !=
    right: "Operand"


@dataclass(frozen=True)
class Not:
    expr: "RuleExpr"


@dataclass(frozen=True)
class And:
    left: "RuleExpr"
    right: "RuleExpr"


@dataclass(frozen=True)
class Or:
    left: "RuleExpr"
    right: "RuleExpr"


Operand = Union[Value, GroupMean, Number]
RuleExpr = Union[IsMissing, Cmp, Not, And, Or]

_TOKEN_RE = re.compile(
    r"(?P<num>-?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|==|!=|<|>)"
    r"|(?P<paren>[()])"
)

_OPERAND_EXPECTED = {"number", "'value'", "'group_mean'"}


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        if source[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise RuleSyntaxError(i, {"number", "identifier", "comparison operator", "'('"}, source[i])
        kind = m.lastgroup
        text = m.group(0)
        tokens.append((kind, text, i))
        i = m.end()
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: set[str]):
        kind, text, offset = self.peek()
        raise RuleSyntaxError(offset, expected, text if kind != "eof" else "end of input")

    def parse(self) -> RuleExpr:
        expr = self.or_expr()
        if self.peek()[0] != "eof":
            self.fail({"'and'", "'or'", "end of input"})
        return expr

    def or_expr(self) -> RuleExpr:
        expr = self.and_expr()
        while self.peek()[:2] == ("ident", "or"):
            self.advance()
            expr = Or(expr, self.and_expr())
        return expr

    def and_expr(self) -> RuleExpr:
        expr = self.unary()
        while self.peek()[:2] == ("ident", "and"):
            self.advance()
            expr = And(expr, self.unary())
        return expr

    def unary(self) -> RuleExpr:
        if self.peek()[:2] == ("ident", "not"):
            self.advance()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> RuleExpr:
        kind, text, _ = self.peek()
        if kind == "paren" and text == "(":
            self.advance()
            expr = self.or_expr()
            if self.peek()[:2] != ("paren", ")"):
                self.fail({"')'", "'and'", "'or'"})
            self.advance()
            return expr
        left = self.operand()
        kind, text, offset = self.peek()
        if kind == "ident" and text == "is":
            if not isinstance(left, Value):
                raise RuleTypeError(f"at offset {offset}: 'is missing' applies only to 'value'")
            self.advance()
            if self.peek()[:2] != ("ident", "missing"):
                self.fail({"'missing'"})
            self.advance()
            return IsMissing()
        if kind != "op":
            expected = {"comparison operator"}
            if isinstance(left, Value):
                expected.add("'is'")
            self.fail(expected)
        op = self.advance()[1]
        right = self.operand()
        return Cmp(left, op, right)

    def operand(self) -> Operand:
        kind, text, _ = self.peek()
        if kind == "num":
            self.advance()
            return Number(float(text))
        if kind == "ident" and text == "value":
            self.advance()
            return Value()
        if kind == "ident" and text == "group_mean":
            self.advance()
            return GroupMean()
        self.fail(_OPERAND_EXPECTED)


def parse_rule(source: str) -> RuleExpr:
    """Parse rule source text into an AST, or raise RuleSyntaxError / RuleTypeError."""
    return _Parser(source).parse()


def eval_rule(rule: RuleExpr, cell: CellValue, stats: GroupStats) -> bool:
    """Evaluate a parsed rule against one cell and its group statistics."""
    if isinstance(rule, IsMissing):
        return cell is None
    if isinstance(rule, Cmp):
        left = _operand_value(rule.left, cell, stats)
        right = _operand_value(rule.right, cell, stats)
        if left is None or right is None:
            return False
        return _COMPARE[rule.op](left, right)
    if isinstance(rule, Not):
        return not eval_rule(rule.expr, cell, stats)
    if isinstance(rule, And):
        return eval_rule(rule.left, cell, stats) and eval_rule(rule.right, cell, stats)
    if isinstance(rule, Or):
        return eval_rule(rule.left, cell, stats) or eval_rule(rule.right, cell, stats)
    raise TypeError(f"not a rule expression: {rule!r}")


def _operand_value(operand: Operand, cell: CellValue, stats: GroupStats) -> Optional[float]:
    if isinstance(operand, Number):
        return operand.value
    if isinstance(operand, Value):
        return cell if type(cell) is float else None
    return stats.mean


_COMPARE = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}

# Precedence levels for minimal-paren printing: or < and < not < atom.
_PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = 1, 2, 3, 4


def _prec(expr: RuleExpr) -> int:
    if isinstance(expr, Or):
        return _PREC_OR
    if isinstance(expr, And):
        return _PREC_AND
    if isinstance(expr, Not):
        return _PREC_NOT
    return _PREC_ATOM


def format_rule(expr: RuleExpr) -> str:
    """Canonical text form; ``parse_rule(format_rule(e)) == e`` for any AST."""
    if isinstance(expr, IsMissing):
        return "value is missing"
    if isinstance(expr, Cmp):
        return f"{_format_operand(expr.left)} {expr.op} {_format_operand(expr.right)}"
    if isinstance(expr, Not):
        return "not " + _wrap(expr.expr, minimum=_PREC_NOT)
    if isinstance(expr, And):
        return _wrap(expr.left, minimum=_PREC_AND) + " and " + _wrap(expr.right, minimum=_PREC_AND + 1)
    if isinstance(expr, Or):
        return _wrap(expr.left, minimum=_PREC_OR) + " or " + _wrap(expr.right, minimum=_PREC_OR + 1)
    raise TypeError(f"not a rule expression: {expr!r}")


def _wrap(expr: RuleExpr, minimum: int) -> str:
    text = format_rule(expr)
    if _prec(expr) < minimum:
        return f"({text})"
    return text


def _format_operand(operand: Operand) -> str:
    if isinstance(operand, Number):
        return format_number(operand.value)
    if isinstance(operand, Value):
        return "value"
    return "group_mean"
