"""Sentence parser and canonical printer.

Grammar (keywords are case-sensitive, ``#`` starts a comment)::

    sentence   := prefix* formula
    prefix     := ("exists" | "forall") ident ("," ident)* "."
    formula    := conj ("or" conj)*
    conj       := unary ("and" unary)*
    unary      := "not" unary | "(" formula ")" | "true" | "false"
                | "div" "(" integer "," term ")" | term cmp term
    cmp        := "<" | "<=" | ">" | ">=" | "=" | "!="
    term       := ["+" | "-"] product (("+" | "-") product)*
    product    := factor (("*" factor) | ("/" factor) | factor)*
    factor     := number | ident | "sin" "(" term ")" | "(" term ")"

Products may scale a term by rational constants only. ``<=``, ``>=`` and
negation are eliminated while parsing so the matrix only carries the
literal kinds of the formulas module.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from errors import (
    GrammarError,
    LexicalError,
    MalformedRationalError,
    NonAffineDivisibilityError,
    UnboundIdentifierError,
)
from formulas import (
    FALSE,
    TRUE,
    And,
    Div,
    Formula,
    Leaf,
    LinEq,
    LinNeq,
    LinSineEq,
    LinSineLess,
    LinSineNeq,
    Literal,
    OscLess,
    conjunction,
    disequality_literal,
    disjunction,
    divisibility,
    equality_literal,
    equation_term,
    less_literal,
    negate_formula,
)
from terms import (
    Const,
    NormalTerm,
    RawTerm,
    Scale,
    Sine,
    Sum,
    Var,
    Vector,
    _Expansion,
    affine_term,
    normalize,
    sub,
)

logger = logging.getLogger(__name__)

EXISTS = "exists"
FORALL = "forall"
KEYWORDS = {EXISTS, FORALL, "and", "or", "not", "sin", "div", "true", "false"}

_ALIASES = {"≤": "<=", "≥": ">=", "≠": "!=", "∃": EXISTS, "∀": FORALL, "¬": "not", "∧": "and", "∨": "or"}

_TOKEN = re.compile(
    r"(?P<space>[ \t\r]+)"
    r"|(?P<newline>\n)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<number>\d+(?:\.\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<op><=|>=|!=|[<>=+\-*/(),.]|[≤≥≠∃∀¬∧∨])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class Sentence:
    """Prenex sentence: quantifier prefix and quantifier-free matrix."""

    prefix: Tuple[Tuple[str, str], ...]
    matrix: Formula

    @property
    def arity(self) -> int:
        return len(self.prefix)

    @property
    def names(self) -> List[str]:
        return [name for _, name in self.prefix]

    @property
    def is_existential(self) -> bool:
        return all(quantifier == EXISTS for quantifier, _ in self.prefix)


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start, position = 1, 0, 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        column = position - line_start + 1
        if match is None:
            raise LexicalError(line, column, f"unexpected character {text[position]!r}")
        kind = match.lastgroup
        value = match.group()
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind == "ident":
            tokens.append(Token("keyword" if value in KEYWORDS else "ident", value, line, column))
        elif kind == "op":
            value = _ALIASES.get(value, value)
            tokens.append(Token("keyword" if value in KEYWORDS else "op", value, line, column))
        elif kind == "number":
            tokens.append(Token("number", value, line, column))
        position = match.end()
    tokens.append(Token("end", "", line, position - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.position = 0
        self.variables: Dict[str, int] = {}
        self.prefix: List[Tuple[str, str]] = []

    # ----- token helpers -----

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def advance(self) -> Token:
        token = self.current
        if token.kind != "end":
            self.position += 1
        return token

    def at(self, *texts: str) -> bool:
        return self.current.kind != "end" and self.current.text in texts

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, message: str, token: Optional[Token] = None) -> None:
        token = token or self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise GrammarError(token.line, token.column, f"{message}, found {found}")

    # ----- sentence level -----

    def sentence(self) -> Sentence:
        while self.at(EXISTS, FORALL):
            quantifier = self.advance().text
            while True:
                token = self.advance()
                if token.kind != "ident":
                    self.fail("expected a variable name", token)
                if token.text in self.variables:
                    raise GrammarError(token.line, token.column, f"variable {token.text!r} bound twice")
                self.variables[token.text] = len(self.prefix)
                self.prefix.append((quantifier, token.text))
                if not self.at(","):
                    break
                self.advance()
            self.expect(".")
        matrix = self.formula()
        if self.current.kind != "end":
            self.fail("unexpected trailing input")
        return Sentence(tuple(self.prefix), matrix)

    @property
    def arity(self) -> int:
        return len(self.prefix)

    def formula(self) -> Formula:
        parts = [self.conj()]
        while self.at("or"):
            self.advance()
            parts.append(self.conj())
        return disjunction(*parts)

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.at("and"):
            self.advance()
            parts.append(self.unary())
        return conjunction(*parts)

    def unary(self) -> Formula:
        if self.at("not"):
            self.advance()
            return negate_formula(self.unary())
        if self.at("true"):
            self.advance()
            return TRUE
        if self.at("false"):
            self.advance()
            return FALSE
        if self.at("div"):
            return self.div()
        if self.at("("):
            # "(" may open a sub-formula or a parenthesized term; try the formula first
            saved = self.position
            self.advance()
            try:
                inner = self.formula()
                self.expect(")")
            except GrammarError:
                self.position = saved
            else:
                if not self.at("<", "<=", ">", ">=", "=", "!="):
                    return inner
                self.position = saved
        return self.comparison()

    def div(self) -> Formula:
        self.advance()
        self.expect("(")
        token = self.advance()
        if token.kind != "number" or "." in token.text:
            self.fail("expected an integer modulus", token)
        modulus = int(token.text)
        if modulus < 1:
            raise GrammarError(token.line, token.column, "divisibility modulus must be positive")
        self.expect(",")
        start = self.current
        term = normalize(self.term()[0], self.arity)
        self.expect(")")
        if term.summands:
            raise NonAffineDivisibilityError(start.line, start.column, "div needs an affine term")
        if modulus == 1:
            return TRUE
        return Leaf(divisibility(modulus, term.linear))

    def comparison(self) -> Formula:
        left = self.term()[0]
        token = self.current
        if not self.at("<", "<=", ">", ">=", "=", "!="):
            self.fail("expected a comparison")
        self.advance()
        right = self.term()[0]
        if self.at("<", "<=", ">", ">=", "=", "!="):
            self.fail("comparisons do not chain")
        a = normalize(left, self.arity)
        b = normalize(right, self.arity)
        op = token.text
        if op == "<":
            return Leaf(less_literal(sub(a, b)))
        if op == ">":
            return Leaf(less_literal(sub(b, a)))
        if op == "<=":
            return disjunction(Leaf(less_literal(sub(a, b))), Leaf(equality_literal(sub(a, b))))
        if op == ">=":
            return disjunction(Leaf(less_literal(sub(b, a))), Leaf(equality_literal(sub(a, b))))
        if op == "=":
            return Leaf(equality_literal(sub(a, b)))
        return Leaf(disequality_literal(sub(a, b)))

    # ----- terms -----
    # Each term helper returns (raw term, rational value if the term is a constant scalar).

    def term(self) -> Tuple[RawTerm, Optional[Fraction]]:
        sign = 1
        if self.at("+", "-"):
            sign = -1 if self.advance().text == "-" else 1
        raw, value = self.product()
        parts = [(raw, value, sign)]
        while self.at("+", "-"):
            sign = -1 if self.advance().text == "-" else 1
            raw, value = self.product()
            parts.append((raw, value, sign))
        raws = tuple(r if s > 0 else Scale(Fraction(-1), r) for r, _, s in parts)
        total: Optional[Fraction] = Fraction(0)
        for _, v, s in parts:
            total = None if total is None or v is None else total + s * v
        if len(raws) == 1:
            return raws[0], total
        return Sum(raws), total

    def product(self) -> Tuple[RawTerm, Optional[Fraction]]:
        raw, value = self.factor()
        while True:
            if self.at("*"):
                operator = self.advance()
                right = self.factor()
                raw, value = self._multiply((raw, value), right, operator)
            elif self.at("/"):
                operator = self.advance()
                right_raw, right_value = self.factor()
                if right_value is None:
                    raise GrammarError(operator.line, operator.column, "division by a non-constant term")
                if right_value == 0:
                    raise MalformedRationalError(operator.line, operator.column, "division by zero")
                raw, value = self._multiply((raw, value), (Const(1 / right_value), 1 / right_value), operator)
            elif self.current.kind in ("ident", "number") or self.at("sin", "("):
                operator = self.current
                right = self.factor()
                raw, value = self._multiply((raw, value), right, operator)
            else:
                return raw, value

    @staticmethod
    def _multiply(left, right, operator: Token) -> Tuple[RawTerm, Optional[Fraction]]:
        (left_raw, left_value), (right_raw, right_value) = left, right
        if left_value is not None:
            value = None if right_value is None else left_value * right_value
            return Scale(left_value, right_raw), value
        if right_value is not None:
            return Scale(right_value, left_raw), None
        raise GrammarError(operator.line, operator.column, "only rational constants may multiply terms")

    def factor(self) -> Tuple[RawTerm, Optional[Fraction]]:
        token = self.current
        if token.kind == "number":
            self.advance()
            value = Fraction(token.text)
            return Const(value), value
        if token.kind == "ident":
            self.advance()
            if token.text not in self.variables:
                raise UnboundIdentifierError(token.line, token.column, f"unbound identifier {token.text!r}")
            return Var(self.variables[token.text]), None
        if self.at("sin"):
            self.advance()
            self.expect("(")
            argument, _ = self.term()
            self.expect(")")
            return Sine(argument), None
        if self.at("("):
            self.advance()
            inner = self.term()
            self.expect(")")
            return inner
        self.fail("expected a term")
        raise AssertionError("unreachable")


def parse(text: str) -> Sentence:
    """Parse a sentence; errors carry the line and column of the offending token."""
    sentence = _Parser(tokenize(text)).sentence()
    logger.debug("Parsed sentence with %d variables", sentence.arity)
    return sentence


def _bound_parser(text: str, names: Sequence[str]) -> _Parser:
    parser = _Parser(tokenize(text))
    for name in names:
        parser.variables[name] = len(parser.prefix)
        parser.prefix.append((EXISTS, name))
    return parser


def parse_formula(text: str, names: Sequence[str]) -> Formula:
    """Parse a quantifier-free formula over the given variable names."""
    parser = _bound_parser(text, names)
    formula = parser.formula()
    if parser.current.kind != "end":
        parser.fail("unexpected trailing input")
    return formula


def parse_term(text: str, names: Sequence[str]) -> NormalTerm:
    """Parse a lone term over the given variable names."""
    parser = _bound_parser(text, names)
    raw, _ = parser.term()
    if parser.current.kind != "end":
        parser.fail("unexpected trailing input")
    return normalize(raw, len(names))


# ============= PRINTING =============


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _join_signed(parts: Sequence[Tuple[Fraction, str]]) -> str:
    """Render sum of coefficient * body pairs; an empty body marks a constant."""
    pieces: List[str] = []
    for coefficient, body in parts:
        magnitude = abs(coefficient)
        if not body:
            text = format_rational(magnitude)
        elif magnitude == 1:
            text = body
        else:
            text = f"{format_rational(magnitude)}*{body}"
        if not pieces:
            pieces.append(f"-{text}" if coefficient < 0 else text)
        else:
            pieces.append(f" - {text}" if coefficient < 0 else f" + {text}")
    return "".join(pieces) if pieces else "0"


def _format_expansion(expansion: _Expansion, names: Sequence[str]) -> str:
    parts: List[Tuple[Fraction, str]] = []
    for j, coefficient in enumerate(expansion.linear[:-1]):
        if coefficient:
            parts.append((coefficient, names[j]))
    if expansion.linear[-1]:
        parts.append((expansion.linear[-1], ""))
    for argument, coefficient in expansion.sines:
        parts.append((coefficient, f"sin({_format_expansion(argument, names)})"))
    return _join_signed(parts)


def format_term(term: NormalTerm, names: Sequence[str]) -> str:
    return _format_expansion(term.expansion, names)


def format_affine(q: Vector, names: Sequence[str]) -> str:
    return format_term(affine_term(q), names)


def format_literal(literal: Literal, names: Sequence[str]) -> str:
    if isinstance(literal, OscLess):
        return f"{format_rational(literal.c)} < {format_term(literal.t, names)}"
    if isinstance(literal, LinSineLess):
        return f"{format_affine(literal.q, names)} < {format_term(literal.t, names)}"
    if isinstance(literal, (LinSineEq, LinSineNeq)):
        relation = "=" if isinstance(literal, LinSineEq) else "!="
        body = format_term(equation_term(literal), names)
        return f"{body} {relation} 0"
    if isinstance(literal, (LinEq, LinNeq)):
        relation = "=" if isinstance(literal, LinEq) else "!="
        return f"{format_affine(literal.q, names)} {relation} 0"
    if isinstance(literal, Div):
        p = tuple(Fraction(value) for value in literal.p)
        return f"div({literal.k}, {format_affine(p, names)})"
    raise TypeError(f"not a literal: {literal!r}")


def format_formula(formula: Formula, names: Sequence[str]) -> str:
    if isinstance(formula, Leaf):
        return format_literal(formula.literal, names)
    if not formula.children:
        return "true" if isinstance(formula, And) else "false"
    joiner = " and " if isinstance(formula, And) else " or "
    pieces = []
    for child in formula.children:
        text = format_formula(child, names)
        pieces.append(text if isinstance(child, Leaf) else f"({text})")
    return joiner.join(pieces)


def format_sentence(sentence: Sentence) -> str:
    groups: List[Tuple[str, List[str]]] = []
    for quantifier, name in sentence.prefix:
        if groups and groups[-1][0] == quantifier:
            groups[-1][1].append(name)
        else:
            groups.append((quantifier, [name]))
    head = "".join(f"{quantifier} {', '.join(names)}. " for quantifier, names in groups)
    return head + format_formula(sentence.matrix, sentence.names)
