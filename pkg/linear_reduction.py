"""Reduction of linear structure: equalities, linear variables, divisibility.

Every operation takes one conjunctive clause and returns a list of branches.
The disjunction of the branch formulas is equisatisfiable with the clause,
and each branch carries the affine substitution that maps its variables back
to the original ones, so a witness of a branch is a witness of the input.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Sequence, Tuple

from errors import ArityError
from formulas import (
    Div,
    Formula,
    Leaf,
    LinEq,
    LinNeq,
    LinSineEq,
    LinSineLess,
    LinSineNeq,
    Literal,
    canonical_false,
    canonical_true,
    conjunction,
    disjunction,
    ground_truth,
    lin_sine_less,
    literal_variables,
    substitute,
    substitute_literal,
    to_dnf,
)
from terms import (
    Number,
    Vector,
    as_vector,
    constant_vector,
    radius,
    substitute_affine,
    unit_vector,
    vector_scale,
    zero_term,
)

logger = logging.getLogger(__name__)


# ============= AFFINE ARITHMETIC =============


@dataclass(frozen=True)
class AffineForm:
    """coeffs . (x, 1) over ``len(coeffs) - 1`` variables."""

    coeffs: Vector

    @property
    def arity(self) -> int:
        return len(self.coeffs) - 1

    @property
    def variable_part(self) -> Vector:
        return self.coeffs[:-1]

    @property
    def constant(self) -> Fraction:
        return self.coeffs[-1]

    @property
    def integral(self) -> bool:
        return all(value.denominator == 1 for value in self.coeffs)

    def value(self, point: Sequence[Number]) -> Fraction:
        if len(point) != self.arity:
            raise ArityError(f"point has {len(point)} coordinates, expected {self.arity}")
        return sum((c * v for c, v in zip(self.variable_part, point)), self.constant)


@dataclass(frozen=True)
class LevelSet:
    values: Tuple[Fraction, ...]
    lo: Fraction
    hi: Fraction


def rational_gcd(values: Sequence[Number]) -> Fraction:
    """Largest g > 0 such that every value is an integer multiple of g (0 if all vanish)."""
    if not values:
        raise ValueError("gcd of an empty list")

    def pair(a: Fraction, b: Fraction) -> Fraction:
        return Fraction(math.gcd(a.numerator, b.numerator), math.lcm(a.denominator, b.denominator))

    return reduce(pair, (abs(Fraction(v)) for v in values))


def rational_lcm(values: Sequence[Number]) -> Fraction:
    """Smallest positive common integer multiple; 1 for the empty list."""

    def pair(a: Fraction, b: Fraction) -> Fraction:
        return Fraction(math.lcm(a.numerator, b.numerator), math.gcd(a.denominator, b.denominator))

    return reduce(pair, (abs(Fraction(v)) for v in values), Fraction(1))


def level_set(form: AffineForm, lo: Fraction, hi: Fraction) -> LevelSet:
    """Values the form takes at integer points inside [lo, hi)."""
    g = rational_gcd(form.variable_part) if form.arity else Fraction(0)
    c = form.constant
    if g == 0:
        values = (c,) if lo <= c < hi else ()
        return LevelSet(values, lo, hi)
    first = math.ceil((lo - c) / g)
    last = math.ceil((hi - c) / g) - 1
    return LevelSet(tuple(c + k * g for k in range(first, last + 1)), lo, hi)


# ============= SUBSTITUTIONS AND BRANCHES =============


@dataclass(frozen=True)
class Substitution:
    """Original variable i equals ``forms[i] . (y, 1)`` in the current variables y."""

    forms: Tuple[Vector, ...]

    @classmethod
    def identity(cls, arity: int) -> "Substitution":
        return cls(tuple(unit_vector(arity + 1, i) for i in range(arity)))

    def then(self, k: int, replacement: Sequence[Number]) -> "Substitution":
        """Record that the current x_k was replaced by ``replacement . (y, 1)``."""
        replacement = as_vector(replacement)
        return Substitution(tuple(substitute_affine(form, k, replacement) for form in self.forms))

    def apply(self, point: Sequence[Number]) -> Tuple[Fraction, ...]:
        return tuple(AffineForm(form).value(point) for form in self.forms)


@dataclass(frozen=True)
class Branch:
    formula: Formula
    substitution: Substitution


def _clause_formula(clause: Sequence[Literal], arity: int) -> Formula:
    if not clause:
        return Leaf(canonical_true(arity))
    return conjunction(*(Leaf(literal) for literal in clause))


def is_false_clause(clause: Sequence[Literal]) -> bool:
    return any(ground_truth(literal) is False for literal in clause)


def branches_formula(branches: Sequence[Branch]) -> Formula:
    return disjunction(*(branch.formula for branch in branches))


# ============= EQUALITIES =============


def _integral(q: Vector) -> Tuple[int, ...]:
    scale = math.lcm(*(value.denominator for value in q))
    return tuple(int(value * scale) for value in q)


def eliminate_equalities(
    clause: Sequence[Literal], arity: int, substitution: Optional[Substitution] = None
) -> List[Branch]:
    """Solve the linear equalities of a clause and turn disequalities into inequalities."""
    substitution = substitution or Substitution.identity(arity)
    rest: List[Formula] = []
    equalities: List[Vector] = []
    for literal in clause:
        if isinstance(literal, (LinSineEq, LinSineNeq)):
            raise ValueError("sine equalities must be eliminated before linear reduction")
        if isinstance(literal, LinEq):
            equalities.append(literal.q)
        elif isinstance(literal, LinNeq):
            q = literal.q
            rest.append(
                disjunction(
                    Leaf(lin_sine_less(q, zero_term(arity))),
                    Leaf(lin_sine_less(vector_scale(-1, q), zero_term(arity))),
                )
            )
        else:
            rest.append(Leaf(literal))

    while equalities:
        p = _integral(equalities.pop(0))
        pivots = [j for j in range(arity) if p[j]]
        if not pivots:
            if p[-1]:
                return [Branch(Leaf(canonical_false(arity)), substitution)]
            continue
        k = min(pivots, key=lambda j: (abs(p[j]), j))
        replacement = tuple(
            Fraction(0) if j == k else Fraction(-p[j], p[k]) for j in range(arity + 1)
        )
        rest = [substitute(part, k, replacement) for part in rest]
        equalities = [substitute_affine(q, k, replacement) for q in equalities]
        substitution = substitution.then(k, replacement)
        if abs(p[k]) >= 2:
            residue = tuple(0 if j == k else -p[j] for j in range(arity + 1))
            rest.append(Leaf(Div(abs(p[k]), residue)))
        logger.debug("Pivoted equality on x%d with coefficient %d", k, p[k])

    if not rest:
        return [Branch(Leaf(canonical_true(arity)), substitution)]
    return [Branch(conjunction(*rest), substitution)]


# ============= LINEAR VARIABLES =============


def linear_variables(clause: Sequence[Literal]) -> List[int]:
    """Variables with a nonzero coefficient in the affine side of some inequality."""
    found = set()
    for literal in clause:
        if isinstance(literal, LinSineLess):
            found.update(j for j, value in enumerate(literal.q[:-1]) if value)
    return sorted(found)


def count_linear_variables(clause: Sequence[Literal]) -> int:
    return len(linear_variables(clause))


def divisibility_period(clause: Sequence[Literal], variable: int) -> int:
    """lcm of k / gcd(k, |p_v|) over the divisibility literals mentioning the variable."""
    period = 1
    for literal in clause:
        if isinstance(literal, Div) and literal.p[variable]:
            period = math.lcm(period, literal.k // math.gcd(literal.k, abs(literal.p[variable])))
    return period


def _candidate_levels(clause: Sequence[Literal], variable: int) -> List[Tuple[LinSineLess, LevelSet]]:
    period = divisibility_period(clause, variable)
    levels = []
    for literal in clause:
        if isinstance(literal, LinSineLess) and literal.q[variable]:
            bound = radius(literal.t)
            lo = -bound - period * abs(literal.q[variable])
            levels.append((literal, level_set(AffineForm(literal.q), lo, bound)))
    return levels


def eliminate_linear(
    clause: Sequence[Literal], arity: int, substitution: Optional[Substitution] = None
) -> List[Branch]:
    """Remove every variable that occurs outside sines, one variable per round.

    The chosen variable minimizes the number of level values to try; each
    try pins one inequality's affine side to a constant, and the resulting
    equality is solved away before the next round.
    """
    substitution = substitution or Substitution.identity(arity)
    variables = linear_variables(clause)
    if not variables:
        return [Branch(_clause_formula(clause, arity), substitution)]
    if is_false_clause(clause):
        return []

    def cost(variable: int) -> int:
        return sum(len(levels.values) for _, levels in _candidate_levels(clause, variable))

    variable = min(variables, key=lambda v: (cost(v), v))
    branches: List[Branch] = []
    for literal, levels in _candidate_levels(clause, variable):
        for value in levels.values:
            pinned = LinEq(literal.q[:-1] + (literal.q[-1] - value,))
            for reduced in eliminate_equalities(list(clause) + [pinned], arity, substitution):
                for next_clause in to_dnf(reduced.formula).clauses:
                    if is_false_clause(next_clause):
                        continue
                    assert count_linear_variables(next_clause) < len(variables), "linear variables must decrease"
                    branches.extend(eliminate_linear(next_clause, arity, reduced.substitution))
    logger.debug("Eliminated linear variable x%d into %d branches", variable, len(branches))
    return branches


# ============= DIVISIBILITY =============


def eliminate_divisibility(
    clause: Sequence[Literal], arity: int, substitution: Optional[Substitution] = None
) -> List[Branch]:
    """Split on residues so that only sine inequalities remain."""
    substitution = substitution or Substitution.identity(arity)
    divisions = [literal for literal in clause if isinstance(literal, Div)]
    others = [literal for literal in clause if not isinstance(literal, Div)]
    if any(isinstance(literal, LinSineLess) for literal in others):
        raise ValueError("linear variables must be eliminated before divisibility")
    mentioned = sorted({j for literal in divisions for j in literal_variables(literal)})
    if not mentioned:
        if all(ground_truth(literal) for literal in divisions):
            return [Branch(_clause_formula(others, arity), substitution)]
        return []

    variable = mentioned[0]
    modulus = math.lcm(*(literal.k for literal in divisions if literal.p[variable]))
    branches: List[Branch] = []
    for residue in range(modulus):
        at_residue = [substitute_literal(literal, variable, constant_vector(arity, residue)) for literal in divisions]
        if any(ground_truth(literal) is False for literal in at_residue):
            continue
        remaining = [literal for literal in at_residue if ground_truth(literal) is None]
        stretched = tuple(
            Fraction(modulus) if j == variable else Fraction(residue) if j == arity else Fraction(0)
            for j in range(arity + 1)
        )
        moved = [substitute_literal(literal, variable, stretched) for literal in others]
        branches.extend(eliminate_divisibility(remaining + moved, arity, substitution.then(variable, stretched)))
    logger.debug("Split x%d over %d residues", variable, modulus)
    return branches

