"""Literals, quantifier-free formulas and disjunctive normal form."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, FrozenSet, Iterator, List, Sequence, Set, Tuple, Union

from errors import ArityError, NonOscillatoryError
from terms import (
    NormalTerm,
    Number,
    Vector,
    add,
    affine_term,
    as_vector,
    canonical_sign,
    constant_vector,
    is_oscillatory,
    linear_part,
    negate,
    occurring_variables,
    oscillatory_part,
    substitute_affine,
    substitute_term,
    sub,
    zero_term,
)

logger = logging.getLogger(__name__)


def _check_oscillatory(term: NormalTerm) -> None:
    if not is_oscillatory(term):
        raise NonOscillatoryError("inequality right-hand sides must have zero linear part")


def _has_variables(q: Vector) -> bool:
    return any(q[:-1])


@dataclass(frozen=True)
class LinSineLess:
    """q . (x, 1) < t with t oscillatory and q mentioning a variable."""

    q: Vector
    t: NormalTerm

    def __post_init__(self) -> None:
        if len(self.q) != self.t.arity + 1:
            raise ArityError("affine part and term disagree on arity")
        _check_oscillatory(self.t)

    @property
    def arity(self) -> int:
        return self.t.arity


@dataclass(frozen=True)
class OscLess:
    """c < t with t oscillatory."""

    c: Fraction
    t: NormalTerm

    def __post_init__(self) -> None:
        _check_oscillatory(self.t)

    @property
    def arity(self) -> int:
        return self.t.arity


@dataclass(frozen=True)
class LinSineEq:
    """q . (x, 1) + t = 0 with t oscillatory and nonzero."""

    q: Vector
    t: NormalTerm

    def __post_init__(self) -> None:
        if len(self.q) != self.t.arity + 1:
            raise ArityError("affine part and term disagree on arity")
        _check_oscillatory(self.t)

    @property
    def arity(self) -> int:
        return self.t.arity


@dataclass(frozen=True)
class LinSineNeq:
    """q . (x, 1) + t != 0 with t oscillatory and nonzero."""

    q: Vector
    t: NormalTerm

    def __post_init__(self) -> None:
        if len(self.q) != self.t.arity + 1:
            raise ArityError("affine part and term disagree on arity")
        _check_oscillatory(self.t)

    @property
    def arity(self) -> int:
        return self.t.arity


@dataclass(frozen=True)
class LinEq:
    q: Vector

    @property
    def arity(self) -> int:
        return len(self.q) - 1


@dataclass(frozen=True)
class LinNeq:
    q: Vector

    @property
    def arity(self) -> int:
        return len(self.q) - 1


@dataclass(frozen=True)
class Div:
    """k divides p . (x, 1) with integer p and k >= 2."""

    k: int
    p: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"divisibility modulus must be at least 2, got {self.k}")

    @property
    def arity(self) -> int:
        return len(self.p) - 1


Literal = Union[LinSineLess, OscLess, LinSineEq, LinSineNeq, LinEq, LinNeq, Div]
INEQUALITY_KINDS = (LinSineLess, OscLess)


# ============= LITERAL CONSTRUCTORS =============


def lin_sine_less(q: Sequence[Number], t: NormalTerm) -> Literal:
    """q . (x, 1) < t, stored as OscLess when q has no variable."""
    q = as_vector(q)
    if _has_variables(q):
        return LinSineLess(q, t)
    return OscLess(q[-1], t)


def less_literal(term: NormalTerm) -> Literal:
    """term < 0."""
    return lin_sine_less(linear_part(term), negate(oscillatory_part(term)))


def _canonical(term: NormalTerm) -> NormalTerm:
    return negate(term) if canonical_sign(term) < 0 else term


def equality_literal(term: NormalTerm) -> Literal:
    """term = 0, as LinEq when no sine remains."""
    term = _canonical(term)
    t = oscillatory_part(term)
    if not t.summands:
        return LinEq(term.linear)
    return LinSineEq(term.linear, t)


def disequality_literal(term: NormalTerm) -> Literal:
    """term != 0, as LinNeq when no sine remains."""
    term = _canonical(term)
    t = oscillatory_part(term)
    if not t.summands:
        return LinNeq(term.linear)
    return LinSineNeq(term.linear, t)


def divisibility(k: int, p: Sequence[Number]) -> Div:
    """k | p . (x, 1); rational coefficients are cleared by scaling k and p together."""
    p = as_vector(p)
    scale = math.lcm(*(value.denominator for value in p)) if p else 1
    return Div(k * scale, tuple(int(value * scale) for value in p))


def canonical_true(arity: int) -> OscLess:
    return OscLess(Fraction(-1), zero_term(arity))


def canonical_false(arity: int) -> OscLess:
    return OscLess(Fraction(1), zero_term(arity))


def equation_term(literal: Union[LinSineEq, LinSineNeq, LinEq, LinNeq]) -> NormalTerm:
    """The term whose vanishing the literal asserts or denies."""
    if isinstance(literal, (LinEq, LinNeq)):
        return affine_term(literal.q)
    return add(affine_term(literal.q), literal.t)


def gap_term(literal: Union[LinSineLess, OscLess]) -> NormalTerm:
    """rhs - lhs, positive exactly when the inequality holds."""
    if isinstance(literal, OscLess):
        return sub(literal.t, affine_term(constant_vector(literal.arity, literal.c)))
    return sub(literal.t, affine_term(literal.q))


def literal_variables(literal: Literal) -> Set[int]:
    if isinstance(literal, Div):
        return {j for j, value in enumerate(literal.p[:-1]) if value}
    if isinstance(literal, (LinEq, LinNeq)):
        return {j for j, value in enumerate(literal.q[:-1]) if value}
    if isinstance(literal, OscLess):
        return occurring_variables(literal.t)
    return occurring_variables(literal.t) | {j for j, value in enumerate(literal.q[:-1]) if value}


def is_ground_literal(literal: Literal) -> bool:
    return not literal_variables(literal)


def substitute_literal(literal: Literal, k: int, replacement: Sequence[Number]) -> Literal:
    """Replace x_k by ``replacement . (x, 1)`` and reclassify the result."""
    replacement = as_vector(replacement)
    if isinstance(literal, Div):
        return divisibility(literal.k, substitute_affine(as_vector(literal.p), k, replacement))
    if isinstance(literal, LinEq):
        return LinEq(substitute_affine(literal.q, k, replacement))
    if isinstance(literal, LinNeq):
        return LinNeq(substitute_affine(literal.q, k, replacement))
    if isinstance(literal, OscLess):
        return OscLess(literal.c, substitute_term(literal.t, k, replacement))
    if isinstance(literal, LinSineLess):
        return lin_sine_less(
            substitute_affine(literal.q, k, replacement), substitute_term(literal.t, k, replacement)
        )
    term = substitute_term(equation_term(literal), k, replacement)
    if isinstance(literal, LinSineEq):
        return equality_literal(term)
    return disequality_literal(term)


# ============= FORMULAS =============


@dataclass(frozen=True)
class And:
    children: Tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: Tuple["Formula", ...]


@dataclass(frozen=True)
class Leaf:
    literal: Literal


Formula = Union[And, Or, Leaf]

TRUE = And(())
FALSE = Or(())


def _join(kind: type, parts: Sequence[Formula]) -> Formula:
    children: List[Formula] = []
    for part in parts:
        if isinstance(part, kind):
            children.extend(part.children)
        else:
            children.append(part)
    unique = tuple(dict.fromkeys(children))
    if len(unique) == 1:
        return unique[0]
    return kind(unique)


def conjunction(*parts: Formula) -> Formula:
    return _join(And, parts)


def disjunction(*parts: Formula) -> Formula:
    return _join(Or, parts)


def literals(formula: Formula) -> Iterator[Literal]:
    if isinstance(formula, Leaf):
        yield formula.literal
        return
    for child in formula.children:
        yield from literals(child)


def map_leaves(formula: Formula, transform: Callable[[Literal], Formula]) -> Formula:
    if isinstance(formula, Leaf):
        return transform(formula.literal)
    parts = [map_leaves(child, transform) for child in formula.children]
    return conjunction(*parts) if isinstance(formula, And) else disjunction(*parts)


def substitute(formula: Formula, k: int, replacement: Sequence[Number]) -> Formula:
    replacement = as_vector(replacement)
    return map_leaves(formula, lambda literal: Leaf(substitute_literal(literal, k, replacement)))


def negate_literal(literal: Literal) -> Formula:
    if isinstance(literal, Div):
        p = list(literal.p)
        options = []
        for j in range(1, literal.k):
            shifted = p[:-1] + [p[-1] - j]
            options.append(Leaf(Div(literal.k, tuple(shifted))))
        return disjunction(*options)
    if isinstance(literal, LinEq):
        return Leaf(LinNeq(literal.q))
    if isinstance(literal, LinNeq):
        return Leaf(LinEq(literal.q))
    if isinstance(literal, LinSineEq):
        return Leaf(disequality_literal(equation_term(literal)))
    if isinstance(literal, LinSineNeq):
        return Leaf(equality_literal(equation_term(literal)))
    # not (d < 0)  <=>  -d < 0  or  d = 0, with d = lhs - rhs
    d = negate(gap_term(literal))
    return disjunction(Leaf(less_literal(negate(d))), Leaf(equality_literal(d)))


def negate_formula(formula: Formula) -> Formula:
    if isinstance(formula, Leaf):
        return negate_literal(formula.literal)
    parts = [negate_formula(child) for child in formula.children]
    return disjunction(*parts) if isinstance(formula, And) else conjunction(*parts)


# ============= GROUND FOLDING =============


def ground_truth(literal: Literal) -> Union[bool, None]:
    """Exact truth value of ground LinEq, LinNeq and Div literals, else None."""
    if not is_ground_literal(literal):
        return None
    if isinstance(literal, LinEq):
        return literal.q[-1] == 0
    if isinstance(literal, LinNeq):
        return literal.q[-1] != 0
    if isinstance(literal, Div):
        return literal.p[-1] % literal.k == 0
    if isinstance(literal, OscLess) and not literal.t.summands:
        return literal.c < 0
    return None


def simplify_ground(formula: Formula) -> Formula:
    """Fold ground literals that are decidable by rational arithmetic."""

    def fold(literal: Literal) -> Formula:
        truth = ground_truth(literal)
        if truth is None:
            return Leaf(literal)
        return TRUE if truth else FALSE

    return _absorb(map_leaves(formula, fold))


def _absorb(formula: Formula) -> Formula:
    if isinstance(formula, Leaf):
        return formula
    children = [_absorb(child) for child in formula.children]
    if isinstance(formula, And):
        if FALSE in children:
            return FALSE
        return conjunction(*(c for c in children if c != TRUE))
    if TRUE in children:
        return TRUE
    return disjunction(*(c for c in children if c != FALSE))


# ============= DISJUNCTIVE NORMAL FORM =============

Clause = Tuple[Literal, ...]


@dataclass(frozen=True)
class Dnf:
    clauses: Tuple[Clause, ...]

    @property
    def formula(self) -> Formula:
        return disjunction(*(conjunction(*(Leaf(lit) for lit in clause)) for clause in self.clauses))


def _dedup_clauses(clauses: Sequence[Clause]) -> List[Clause]:
    seen: Set[FrozenSet[Literal]] = set()
    result: List[Clause] = []
    for clause in clauses:
        clause = tuple(dict.fromkeys(clause))
        key = frozenset(clause)
        if key not in seen:
            seen.add(key)
            result.append(clause)
    return result


def _clauses(formula: Formula) -> List[Clause]:
    if isinstance(formula, Leaf):
        return [(formula.literal,)]
    if isinstance(formula, Or):
        collected: List[Clause] = []
        for child in formula.children:
            collected.extend(_clauses(child))
        return _dedup_clauses(collected)
    product: List[Clause] = [()]
    for child in formula.children:
        product = _dedup_clauses([left + right for left in product for right in _clauses(child)])
    return product


def to_dnf(formula: Formula) -> Dnf:
    return Dnf(tuple(_clauses(formula)))

