"""Shared fixtures: brute-force integer oracles evaluated with mpmath."""

import itertools
import random
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

import mpmath
import pytest

import decision_store
from formulas import (
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
)
from terms import Const, RawTerm, Scale, Sine, Sum, Var, affine_term, evaluate

ORACLE_DPS = 60
ORACLE_EPSILON = mpmath.mpf(10) ** -40


def _affine_value(q, point) -> mpmath.mpf:
    return evaluate(affine_term(q), point, ORACLE_DPS)


def oracle_literal(literal: Literal, point: Sequence[int]) -> bool:
    """Numeric truth value of a literal at an integer point (high precision)."""
    with mpmath.workdps(ORACLE_DPS):
        if isinstance(literal, Div):
            value = sum(c * v for c, v in zip(literal.p, point)) + literal.p[-1]
            return value % literal.k == 0
        if isinstance(literal, (LinEq, LinNeq)):
            zero = abs(_affine_value(literal.q, point)) < ORACLE_EPSILON
            return zero if isinstance(literal, LinEq) else not zero
        if isinstance(literal, OscLess):
            return mpmath.mpf(literal.c.numerator) / literal.c.denominator < evaluate(literal.t, point, ORACLE_DPS)
        if isinstance(literal, LinSineLess):
            return _affine_value(literal.q, point) < evaluate(literal.t, point, ORACLE_DPS)
        if isinstance(literal, (LinSineEq, LinSineNeq)):
            value = _affine_value(literal.q, point) + evaluate(literal.t, point, ORACLE_DPS)
            zero = abs(value) < ORACLE_EPSILON
            return zero if isinstance(literal, LinSineEq) else not zero
    raise TypeError(f"not a literal: {literal!r}")


def oracle_formula(formula: Formula, point: Sequence[int]) -> bool:
    if isinstance(formula, Leaf):
        return oracle_literal(formula.literal, point)
    if isinstance(formula, And):
        return all(oracle_formula(child, point) for child in formula.children)
    return any(oracle_formula(child, point) for child in formula.children)


def grid(arity: int, bound: int) -> Iterable[Tuple[int, ...]]:
    return itertools.product(range(-bound, bound + 1), repeat=arity)


def brute_force_witness(formula: Formula, arity: int, bound: int) -> Optional[Tuple[int, ...]]:
    for point in grid(arity, bound):
        if oracle_formula(formula, point):
            return point
    return None


def random_raw_term(rng: random.Random, arity: int, depth: int) -> RawTerm:
    """Random raw term with at most ``depth`` nested sines."""
    choice = rng.randrange(5 if depth > 0 else 3)
    if choice == 0:
        return Const(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
    if choice == 1:
        return Var(rng.randrange(arity))
    if choice == 2:
        return Scale(Fraction(rng.randint(-3, 3), rng.randint(1, 3)), Var(rng.randrange(arity)))
    if choice == 3:
        return Sine(random_raw_term(rng, arity, depth - 1))
    parts = tuple(random_raw_term(rng, arity, depth - 1) for _ in range(rng.randint(2, 3)))
    return Sum(parts)


def signed_sum(parts) -> str:
    """Source text of sum(c * body); an empty body stands for the constant 1."""
    text = ""
    for coefficient, body in parts:
        if not coefficient:
            continue
        magnitude = abs(coefficient)
        piece = str(magnitude) if not body else body if magnitude == 1 else f"{magnitude}*{body}"
        if not text:
            text = piece if coefficient > 0 else f"-{piece}"
        else:
            text += (" + " if coefficient > 0 else " - ") + piece
    return text or "0"


def random_affine(rng: random.Random, names, denominators) -> str:
    parts = [(Fraction(rng.randint(-3, 3), rng.choice(denominators)), name) for name in names]
    parts.append((Fraction(rng.randint(-2, 2), rng.choice(denominators)), ""))
    return signed_sum(parts)


def random_integer_affine(rng: random.Random, names) -> str:
    coefficients = [rng.randint(-3, 3) for _ in names]
    if not any(coefficients):
        coefficients[0] = rng.choice([-1, 1])
    parts = [(Fraction(c), name) for c, name in zip(coefficients, names)]
    parts.append((Fraction(rng.randint(-3, 3)), ""))
    return signed_sum(parts)


def random_wave(rng: random.Random, names) -> str:
    parts = []
    for _ in range(rng.randint(1, 2)):
        argument = random_affine(rng, names, (1, 2, 4))
        if rng.random() < 0.3:
            argument += f" + sin({random_affine(rng, names, (1, 2))})"
        coefficient = Fraction(rng.choice([-2, -1, 1, 2]), rng.choice([1, 2]))
        parts.append((coefficient, f"sin({argument})"))
    return signed_sum(parts)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(autouse=True)
def empty_decision_store():
    decision_store.clear_decisions()
    yield
    decision_store.clear_decisions()
