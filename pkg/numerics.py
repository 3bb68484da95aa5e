"""Certified interval arithmetic and exact sign determination.

Interval endpoints are raw mpmath values computed with directed rounding
(floor for lower endpoints, ceiling for upper ones), so every enclosure
contains the true value of the expression it encloses.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
from mpmath import libmp

from errors import ArityError
from formulas import (
    FALSE,
    TRUE,
    And,
    Formula,
    Leaf,
    LinSineEq,
    LinSineLess,
    LinSineNeq,
    Literal,
    OscLess,
    equation_term,
    gap_term,
    ground_truth,
    simplify_ground,
    substitute_literal,
)
from sine_equality import eliminate_term_equality
from terms import NormalTerm, Number, Vector, constant_vector, is_ground

logger = logging.getLogger(__name__)

FLOOR = libmp.round_floor
CEILING = libmp.round_ceiling
NEAREST = libmp.round_nearest

RawMpf = tuple
MIN_PRECISION = 16
MAX_PRECISION = 1 << 20


def to_fraction(value: RawMpf) -> Fraction:
    numerator, denominator = libmp.to_rational(value)
    return Fraction(int(numerator), int(denominator))


def _check_precision(precision: int) -> None:
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits, got {precision}")


@dataclass(frozen=True)
class Interval:
    lo: RawMpf
    hi: RawMpf

    def __post_init__(self) -> None:
        if libmp.mpf_gt(self.lo, self.hi):
            raise ValueError("interval lower endpoint exceeds upper endpoint")

    @classmethod
    def point(cls, value: Union[int, Fraction], precision: int = 53) -> "Interval":
        return from_fraction(Fraction(value), precision)

    @property
    def lower(self) -> mpmath.mpf:
        return mpmath.make_mpf(self.lo)

    @property
    def upper(self) -> mpmath.mpf:
        return mpmath.make_mpf(self.hi)

    @property
    def width(self) -> Fraction:
        return to_fraction(self.hi) - to_fraction(self.lo)

    def contains(self, value: Union[int, Fraction]) -> bool:
        value = Fraction(value)
        return to_fraction(self.lo) <= value <= to_fraction(self.hi)

    def excludes_zero(self) -> bool:
        return libmp.mpf_gt(self.lo, libmp.fzero) or libmp.mpf_lt(self.hi, libmp.fzero)

    def midpoint(self) -> RawMpf:
        return libmp.mpf_shift(libmp.mpf_add(self.lo, self.hi), -1)

    def bisect(self) -> Tuple["Interval", "Interval"]:
        middle = self.midpoint()
        return Interval(self.lo, middle), Interval(middle, self.hi)

    def __str__(self) -> str:
        return f"[{libmp.to_str(self.lo, 17)}, {libmp.to_str(self.hi, 17)}]"


ZERO = Interval(libmp.fzero, libmp.fzero)
UNIT = Interval(libmp.mpf_neg(libmp.fone), libmp.fone)


def from_fraction(value: Fraction, precision: int) -> Interval:
    if value.denominator == 1:
        exact = libmp.from_int(value.numerator)
        return Interval(exact, exact)
    return Interval(
        libmp.from_rational(value.numerator, value.denominator, precision, FLOOR),
        libmp.from_rational(value.numerator, value.denominator, precision, CEILING),
    )


def add(a: Interval, b: Interval, precision: int) -> Interval:
    return Interval(
        libmp.mpf_add(a.lo, b.lo, precision, FLOOR),
        libmp.mpf_add(a.hi, b.hi, precision, CEILING),
    )


def neg(a: Interval) -> Interval:
    return Interval(libmp.mpf_neg(a.hi), libmp.mpf_neg(a.lo))


def sub(a: Interval, b: Interval, precision: int) -> Interval:
    return add(a, neg(b), precision)


def mul(a: Interval, b: Interval, precision: int) -> Interval:
    pairs = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)]
    lows = [libmp.mpf_mul(x, y, precision, FLOOR) for x, y in pairs]
    highs = [libmp.mpf_mul(x, y, precision, CEILING) for x, y in pairs]
    lo = functools.reduce(lambda x, y: x if libmp.mpf_le(x, y) else y, lows)
    hi = functools.reduce(lambda x, y: x if libmp.mpf_ge(x, y) else y, highs)
    return Interval(lo, hi)


def scale(factor: Fraction, a: Interval, precision: int) -> Interval:
    return mul(from_fraction(factor, precision), a, precision)


def hull(a: Interval, b: Interval) -> Interval:
    lo = a.lo if libmp.mpf_le(a.lo, b.lo) else b.lo
    hi = a.hi if libmp.mpf_ge(a.hi, b.hi) else b.hi
    return Interval(lo, hi)


@functools.lru_cache(maxsize=64)
def pi_enclosure(precision: int) -> Interval:
    _check_precision(precision)
    return Interval(libmp.mpf_pi(precision, FLOOR), libmp.mpf_pi(precision, CEILING))


def period_enclosure(multiplier: int, precision: int) -> Interval:
    """Enclosure of 2 * multiplier * pi."""
    return scale(Fraction(2 * multiplier), pi_enclosure(precision), precision)


def _clamp(value: RawMpf) -> RawMpf:
    if libmp.mpf_gt(value, libmp.fone):
        return libmp.fone
    if libmp.mpf_lt(value, libmp.mpf_neg(libmp.fone)):
        return libmp.mpf_neg(libmp.fone)
    return value


def _sine_bounds(x: RawMpf, precision: int) -> Tuple[RawMpf, RawMpf]:
    value = libmp.mpf_sin(x, precision + 20, NEAREST)
    slack = libmp.mpf_shift(libmp.fone, -(precision + 10))
    lo = libmp.mpf_sub(value, slack, precision, FLOOR)
    hi = libmp.mpf_add(value, slack, precision, CEILING)
    return _clamp(lo), _clamp(hi)


def interval_sin(x: Interval, precision: int) -> Interval:
    """Enclosure of sin over x, checking the extrema at (j + 1/2) pi inside x."""
    _check_precision(precision)
    pi = pi_enclosure(precision)
    lo_frac, hi_frac = to_fraction(x.lo), to_fraction(x.hi)
    pi_lo, pi_hi = to_fraction(pi.lo), to_fraction(pi.hi)
    if hi_frac - lo_frac >= 2 * pi_lo:
        return UNIT

    lo_a, hi_a = _sine_bounds(x.lo, precision)
    lo_b, hi_b = _sine_bounds(x.hi, precision)
    lo = lo_a if libmp.mpf_le(lo_a, lo_b) else lo_b
    hi = hi_a if libmp.mpf_ge(hi_a, hi_b) else hi_b

    half = Fraction(1, 2)
    first = math.floor(min(lo_frac / pi_lo, lo_frac / pi_hi) - half) - 1
    last = math.ceil(max(hi_frac / pi_lo, hi_frac / pi_hi) - half) + 1
    for j in range(first, last + 1):
        critical = scale(Fraction(2 * j + 1, 2), pi, precision)
        if libmp.mpf_lt(critical.hi, x.lo) or libmp.mpf_gt(critical.lo, x.hi):
            continue
        if j % 2 == 0:
            hi = libmp.fone
        else:
            lo = libmp.mpf_neg(libmp.fone)
    return Interval(lo, hi)


# ============= BOXES AND TERM ENCLOSURES =============


@dataclass(frozen=True)
class Box:
    intervals: Tuple[Interval, ...]

    @property
    def dimension(self) -> int:
        return len(self.intervals)

    def widest(self, dimensions: Sequence[int]) -> int:
        return max(dimensions, key=lambda d: (self.intervals[d].width, -d))

    def split(self, dimension: int) -> Tuple["Box", "Box"]:
        """Bisect at the exact midpoint of one coordinate."""
        lower, upper = self.intervals[dimension].bisect()
        left = list(self.intervals)
        right = list(self.intervals)
        left[dimension] = lower
        right[dimension] = upper
        return Box(tuple(left)), Box(tuple(right))

    def describe(self) -> List[List[str]]:
        return [decimal_endpoints(interval) for interval in self.intervals]


def _decimal(value: Fraction, digits: int, upward: bool) -> str:
    scaled = value * 10**digits
    units = math.ceil(scaled) if upward else math.floor(scaled)
    sign = "-" if units < 0 else ""
    whole, fraction = divmod(abs(units), 10**digits)
    return f"{sign}{whole}.{fraction:0{digits}d}"


def decimal_endpoints(interval: Interval, digits: int = 20) -> List[str]:
    """Decimal strings of the endpoints, rounded outward."""
    return [
        _decimal(to_fraction(interval.lo), digits, upward=False),
        _decimal(to_fraction(interval.hi), digits, upward=True),
    ]


def point_box(point: Sequence[Number]) -> Box:
    return Box(tuple(Interval.point(value) for value in point))


def _dot(vector: Vector, box: Box, atoms: Sequence[Interval], precision: int) -> Interval:
    n = box.dimension
    total = ZERO
    for j, coefficient in enumerate(vector):
        if not coefficient:
            continue
        if j < n:
            term = scale(coefficient, box.intervals[j], precision)
        elif j == n:
            term = from_fraction(coefficient, precision)
        else:
            term = scale(coefficient, atoms[j - n - 1], precision)
        total = add(total, term, precision)
    return total


def eval_term(term: NormalTerm, box: Box, precision: int) -> Interval:
    """Enclosure of the term over the box; shared atoms are evaluated once."""
    if box.dimension != term.arity:
        raise ArityError(f"box has dimension {box.dimension}, term has arity {term.arity}")
    _check_precision(precision)
    atoms = []
    for atom in term.atoms:
        atoms.append(interval_sin(_dot(atom.coeffs, box, atoms, precision), precision))
    total = _dot(term.linear, box, atoms, precision)
    for summand in term.summands:
        wave = interval_sin(_dot(summand.vector, box, atoms, precision), precision)
        total = add(total, scale(summand.coefficient, wave, precision), precision)
    return total


# ============= EXACT SIGNS =============


class Sign(IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


def _enclosure_sign(enclosure: Interval) -> Optional[Sign]:
    if libmp.mpf_gt(enclosure.lo, libmp.fzero):
        return Sign.POSITIVE
    if libmp.mpf_lt(enclosure.hi, libmp.fzero):
        return Sign.NEGATIVE
    return None


def sign_of_ground(term: NormalTerm, precision: int = 53) -> Sign:
    """Exact sign of a variable-free term.

    A cheap enclosure settles most terms. Otherwise the term is tested for
    being zero symbolically; a nonzero term has its sign resolved by doubling
    the precision until the enclosure excludes zero.
    """
    if not is_ground(term):
        raise ValueError("sign_of_ground needs a term without variables")
    box = point_box([0] * term.arity)
    sign = _enclosure_sign(eval_term(term, box, precision))
    if sign is not None:
        return sign
    if _is_zero(term):
        return Sign.ZERO
    while precision <= MAX_PRECISION:
        precision *= 2
        sign = _enclosure_sign(eval_term(term, box, precision))
        if sign is not None:
            logger.debug("Ground sign resolved at %d bits", precision)
            return sign
    raise ArithmeticError("ground sign not resolved within the precision limit")


def _is_zero(term: NormalTerm) -> bool:
    verdict = simplify_ground(eliminate_term_equality(term))
    if verdict == TRUE:
        return True
    if verdict == FALSE:
        return False
    raise ArithmeticError("zero test left a formula with variables")


# ============= EXACT TRUTH AT INTEGER POINTS =============


def ground_literal_holds(literal: Literal) -> bool:
    truth = ground_truth(literal)
    if truth is not None:
        return truth
    if isinstance(literal, (OscLess, LinSineLess)):
        return sign_of_ground(gap_term(literal)) == Sign.POSITIVE
    if isinstance(literal, LinSineEq):
        return sign_of_ground(equation_term(literal)) == Sign.ZERO
    if isinstance(literal, LinSineNeq):
        return sign_of_ground(equation_term(literal)) != Sign.ZERO
    raise ValueError(f"literal is not ground: {literal!r}")


def literal_holds(literal: Literal, point: Sequence[Number]) -> bool:
    """Exact truth value of a literal at a point with rational coordinates."""
    if len(point) != literal.arity:
        raise ArityError(f"point has {len(point)} coordinates, expected {literal.arity}")
    for k, value in enumerate(point):
        literal = substitute_literal(literal, k, constant_vector(len(point), Fraction(value)))
    return ground_literal_holds(literal)


def formula_holds(formula: Formula, point: Sequence[Number]) -> bool:
    if isinstance(formula, Leaf):
        return literal_holds(formula.literal, point)
    if isinstance(formula, And):
        return all(formula_holds(child, point) for child in formula.children)
    return any(formula_holds(child, point) for child in formula.children)
