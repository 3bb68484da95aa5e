"""Elimination of equalities that mention sines.

An equality ``p0 . (x, 1) + sum_i r_i sin(P_i) = 0`` over the integers holds
exactly when its affine part vanishes and the sine values arrange themselves
according to one of the congruence relations on ``{0, +-1, ..., +-K}`` whose
signed coefficient sums are all zero. Each candidate relation is expressed as
equalities and disequalities between the lower-depth arguments ``P_i`` and
the sine equalities among those are eliminated recursively.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import config
from errors import ArityError, CongruenceCapExceeded
from formulas import (
    TRUE,
    Formula,
    Leaf,
    LinEq,
    LinSineEq,
    LinSineNeq,
    Literal,
    conjunction,
    disequality_literal,
    disjunction,
    equality_literal,
    equation_term,
    map_leaves,
    negate_formula,
    simplify_ground,
)
from terms import NormalTerm, add, argument_term, negate, sine_depth, sub, zero_term

logger = logging.getLogger(__name__)

Block = Tuple[int, ...]


def signed_order(index: int) -> Tuple[int, int]:
    """0 < +1 < -1 < +2 < -2 < ..."""
    return abs(index), 0 if index >= 0 else 1


@dataclass(frozen=True)
class CongruenceRelation:
    """Negation-closed partition of the signed indices ``{0, +-1, ..., +-size}``."""

    size: int
    blocks: Tuple[Block, ...]

    def __post_init__(self) -> None:
        expected = {0} | {i for j in range(1, self.size + 1) for i in (j, -j)}
        members = [index for block in self.blocks for index in block]
        if sorted(members) != sorted(expected):
            raise ValueError("blocks do not partition the signed indices")
        block_set = {frozenset(block) for block in self.blocks}
        for block in self.blocks:
            if frozenset(-index for index in block) not in block_set:
                raise ValueError("relation is not closed under negation")

    @classmethod
    def from_blocks(cls, size: int, blocks: Sequence[Sequence[int]]) -> "CongruenceRelation":
        ordered = [tuple(sorted(block, key=signed_order)) for block in blocks]
        ordered.sort(key=lambda block: signed_order(block[0]))
        return cls(size, tuple(ordered))

    @functools.cached_property
    def _class_of(self) -> Dict[int, int]:
        return {index: number for number, block in enumerate(self.blocks) for index in block}

    def class_of(self, index: int) -> int:
        return self._class_of[index]

    def related(self, a: int, b: int) -> bool:
        return self._class_of[a] == self._class_of[b]

    def encoded_blocks(self) -> List[Block]:
        """The zero block plus one block of every pair {C, -C}, ordered by representative."""
        chosen: List[Block] = []
        for block in self.blocks:
            if block[0] >= 0:
                chosen.append(block)
        return chosen


def enumerate_congruences(size: int, cap: Optional[int] = None) -> List[CongruenceRelation]:
    """All negation-closed partitions of {0, +-1, ..., +-size}, non-realizable ones included."""
    cap = config.CONGRUENCE_CAP if cap is None else cap
    if size > cap:
        raise CongruenceCapExceeded(size, cap)
    return [CongruenceRelation.from_blocks(size, blocks) for blocks in _partitions(size)]


def _partitions(size: int) -> Iterator[List[List[int]]]:
    # groups: ("zero" | "self", members) or ("pair", members of the block B, -B implied)
    def extend(i: int, groups: List[Tuple[str, List[int]]]) -> Iterator[List[List[int]]]:
        if i > size:
            blocks: List[List[int]] = []
            for kind, members in groups:
                blocks.append(list(members))
                if kind == "pair":
                    blocks.append([-m for m in members])
            yield blocks
            return
        for position, (kind, members) in enumerate(groups):
            options = [[i, -i]] if kind in ("zero", "self") else [[i], [-i]]
            for added in options:
                updated = list(groups)
                updated[position] = (kind, members + added)
                yield from extend(i + 1, updated)
        yield from extend(i + 1, groups + [("pair", [i])])
        yield from extend(i + 1, groups + [("self", [i, -i])])

    yield from extend(1, [("zero", [0])])


def brute_force_congruences(size: int) -> List[CongruenceRelation]:
    """Filter every set partition of the signed indices for negation closure."""
    elements = [0] + [i for j in range(1, size + 1) for i in (j, -j)]
    found: List[CongruenceRelation] = []
    for partition in _set_partitions(elements):
        block_set = {frozenset(block) for block in partition}
        if all(frozenset(-x for x in block) in block_set for block in partition):
            found.append(CongruenceRelation.from_blocks(size, partition))
    return found


def _set_partitions(elements: Sequence[int]) -> Iterator[List[List[int]]]:
    if not elements:
        yield []
        return
    head, rest = elements[0], elements[1:]
    for partition in _set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[head] + partition[i]] + partition[i + 1 :]
        yield [[head]] + partition


def satisfies_star(relation: CongruenceRelation, coefficients: Sequence[Fraction]) -> bool:
    """Every class carries a zero signed sum of the coefficients r_1..r_K."""
    if len(coefficients) != relation.size:
        raise ArityError(f"{len(coefficients)} coefficients for a relation of size {relation.size}")
    for i in range(1, relation.size + 1):
        total = Fraction(0)
        for j in range(1, relation.size + 1):
            if relation.related(j, i):
                total += coefficients[j - 1]
            if relation.related(-j, i):
                total -= coefficients[j - 1]
        if total:
            return False
    return True


def _signed_term(index: int, arguments: Sequence[NormalTerm], arity: int) -> NormalTerm:
    if index == 0:
        return zero_term(arity)
    term = arguments[abs(index) - 1]
    return term if index > 0 else negate(term)


def theta_formula(relation: CongruenceRelation, arguments: Sequence[NormalTerm]) -> Formula:
    """Equalities and disequalities between the arguments that pin down the relation."""
    if len(arguments) != relation.size:
        raise ArityError(f"{len(arguments)} arguments for a relation of size {relation.size}")
    if not arguments:
        return TRUE
    arity = arguments[0].arity
    encoded = relation.encoded_blocks()
    representatives = [_signed_term(block[0], arguments, arity) for block in encoded]
    parts: List[Formula] = []
    for i, block in enumerate(encoded):
        c_i = representatives[i]
        for c_j in representatives[:i]:
            parts.append(Leaf(disequality_literal(sub(c_i, c_j))))
            # c_i must also differ from the representative of -C_j
            parts.append(Leaf(disequality_literal(add(c_i, c_j))))
        for member in block[1:]:
            parts.append(Leaf(equality_literal(sub(c_i, _signed_term(member, arguments, arity)))))
    return simplify_ground(conjunction(*parts))


def eliminate_sine_equality(literal: LinSineEq, cap: Optional[int] = None) -> Formula:
    """Equivalent formula built from LinEq and LinNeq literals only."""
    return eliminate_term_equality(equation_term(literal), cap)


def eliminate_term_equality(term: NormalTerm, cap: Optional[int] = None) -> Formula:
    cap = config.CONGRUENCE_CAP if cap is None else cap
    return _eliminate(term, cap)


@functools.lru_cache(maxsize=4096)
def _eliminate(term: NormalTerm, cap: int) -> Formula:
    affine = Leaf(LinEq(term.linear))
    size = len(term.summands)
    if size == 0:
        return simplify_ground(affine)
    depth = sine_depth(term)
    arguments = [argument_term(term, i) for i in range(size)]
    coefficients = [summand.coefficient for summand in term.summands]
    options: List[Formula] = []
    accepted = 0
    for relation in enumerate_congruences(size, cap):
        if not satisfies_star(relation, coefficients):
            continue
        accepted += 1
        theta = theta_formula(relation, arguments)
        options.append(_eliminate_inside(theta, depth, cap))
    logger.debug("Sine equality with K=%d: %d congruence relations accepted", size, accepted)
    return simplify_ground(conjunction(affine, disjunction(*options)))


def _eliminate_inside(formula: Formula, depth: int, cap: int) -> Formula:
    def replace(literal: Literal) -> Formula:
        if isinstance(literal, (LinSineEq, LinSineNeq)):
            inner = equation_term(literal)
            assert sine_depth(inner) < depth, "sine depth must decrease"
            eliminated = _eliminate(inner, cap)
            return eliminated if isinstance(literal, LinSineEq) else negate_formula(eliminated)
        return Leaf(literal)

    return simplify_ground(map_leaves(formula, replace))


def eliminate_in_formula(formula: Formula, cap: Optional[int] = None) -> Tuple[Formula, bool]:
    """Replace every sine equality and disequality; the flag is set when one had K > 0."""
    cap = config.CONGRUENCE_CAP if cap is None else cap
    nontrivial = False

    def replace(literal: Literal) -> Formula:
        nonlocal nontrivial
        if isinstance(literal, (LinSineEq, LinSineNeq)):
            nontrivial = True
            eliminated = _eliminate(equation_term(literal), cap)
            return eliminated if isinstance(literal, LinSineEq) else negate_formula(eliminated)
        return Leaf(literal)

    return map_leaves(formula, replace), nontrivial

