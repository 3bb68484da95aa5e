"""Real-box search for oscillatory systems and integer witness extraction.

Once every variable only occurs inside sines, an integer solution exists
exactly when the open solution set over one period box ``[0, 2 N pi]^n``
is nonempty, because integers are dense modulo an irrational period. The
search bisects that box until some box satisfies a whole clause with
certified positive margin, or every box is refuted.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Deque, Iterator, List, Optional, Sequence, Set, Tuple

import config
from formulas import OscLess, gap_term, literal_variables
from numerics import (
    Box,
    Interval,
    Sign,
    ZERO,
    eval_term,
    from_fraction,
    mul,
    period_enclosure,
    sign_of_ground,
    sub,
    to_fraction,
)
from terms import is_ground, sine_variable_denominators

logger = logging.getLogger(__name__)

SCHEDULES = ("fifo", "lifo", "widest")


class Status(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Verdict:
    status: Status
    box: Optional[Box] = None
    clause_index: Optional[int] = None
    refuted_boxes: int = 0
    boxes_explored: int = 0
    max_precision: int = 0
    message: str = ""


def period_multiplier(clauses: Sequence[Sequence[OscLess]]) -> int:
    """lcm of the denominators of variable coefficients inside sines."""
    denominators: Set[int] = set()
    for clause in clauses:
        for literal in clause:
            denominators |= sine_variable_denominators(literal.t)
    return math.lcm(1, *denominators)


# ============= CLAUSE STATUS OVER A BOX =============


class _Status(Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    OPEN = "open"


def _literal_status(literal: OscLess, box: Box, precision: int) -> _Status:
    enclosure = eval_term(literal.t, box, precision)
    bound = from_fraction(literal.c, precision)
    if to_fraction(enclosure.lo) > to_fraction(bound.hi):
        return _Status.CERTIFIED
    if to_fraction(enclosure.hi) <= to_fraction(bound.lo):
        return _Status.REFUTED
    return _Status.OPEN


def _clause_status(clause: Sequence[OscLess], box: Box, precision: int) -> _Status:
    result = _Status.CERTIFIED
    for literal in clause:
        status = _literal_status(literal, box, precision)
        if status is _Status.REFUTED:
            return _Status.REFUTED
        if status is _Status.OPEN:
            result = _Status.OPEN
    return result


def _ground_prepass(clauses: Sequence[Sequence[OscLess]]) -> List[Optional[Tuple[OscLess, ...]]]:
    """Decide ground literals exactly; None marks a clause that is already false."""
    live: List[Optional[Tuple[OscLess, ...]]] = []
    for clause in clauses:
        remaining: List[OscLess] = []
        dead = False
        for literal in clause:
            if is_ground(literal.t):
                if sign_of_ground(gap_term(literal)) != Sign.POSITIVE:
                    dead = True
                    break
            else:
                remaining.append(literal)
        live.append(None if dead else tuple(remaining))
    return live


# ============= WORK QUEUE =============


@dataclass(order=True)
class _Item:
    priority: Tuple = field(compare=True)
    box: Box = field(compare=False)
    share: Fraction = field(compare=False)
    rung: int = field(compare=False)
    alive: Tuple[int, ...] = field(compare=False)


class _Queue:
    def __init__(self, schedule: str):
        if schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {schedule!r}; expected one of {', '.join(SCHEDULES)}")
        self.schedule = schedule
        self.items: Deque[_Item] = deque()
        self.heap: List[_Item] = []
        self.counter = itertools.count()

    def push(self, item: _Item, width: Fraction) -> None:
        if self.schedule == "widest":
            item.priority = (-width, next(self.counter))
            heapq.heappush(self.heap, item)
        else:
            self.items.append(item)

    def pop(self) -> _Item:
        if self.schedule == "widest":
            return heapq.heappop(self.heap)
        if self.schedule == "lifo":
            return self.items.pop()
        return self.items.popleft()

    def __bool__(self) -> bool:
        return bool(self.items) or bool(self.heap)


def _narrow(box: Box, active: Sequence[int], precision: int) -> bool:
    threshold = Fraction(1, 2 ** max(1, precision // 4))
    return all(box.intervals[d].width < threshold for d in active)


def decide_proxy_nonempty(
    clauses: Sequence[Sequence[OscLess]],
    arity: int,
    multiplier: int,
    budget: Optional[int] = None,
    ladder: Optional[Sequence[int]] = None,
    schedule: Optional[str] = None,
) -> Verdict:
    """SAT with a certified box, UNSAT with a full refutation cover, or UNKNOWN."""
    budget = config.BOX_BUDGET if budget is None else budget
    ladder = list(ladder or config.PRECISION_LADDER)
    schedule = schedule or config.SCHEDULE
    precision = ladder[0]

    live = _ground_prepass(clauses)
    period = period_enclosure(multiplier, precision)
    active = sorted({j for clause in live if clause for literal in clause for j in literal_variables(literal)})
    root = Box(tuple(
        Interval(ZERO.lo, period.hi) if d in active else Interval.point(0)
        for d in range(arity)
    ))

    for index, clause in enumerate(live):
        if clause is not None and not clause:
            logger.info("Clause %d holds exactly without any search", index)
            return Verdict(Status.SAT, box=root, clause_index=index, max_precision=precision)
    alive_clauses = tuple(i for i, clause in enumerate(live) if clause is not None)
    if not alive_clauses:
        return Verdict(Status.UNSAT, refuted_boxes=1, max_precision=precision)

    queue = _Queue(schedule)
    queue.push(_Item((), root, Fraction(1), 0, alive_clauses), Fraction(0))
    covered = Fraction(0)
    refuted = explored = 0
    highest = precision
    while queue:
        if explored >= budget:
            logger.warning("Box budget of %d exhausted; %d boxes refuted", budget, refuted)
            return Verdict(
                Status.UNKNOWN,
                refuted_boxes=refuted,
                boxes_explored=explored,
                max_precision=highest,
                message=f"box budget {budget} exhausted with {float(covered):.6f} of the volume refuted",
            )
        item = queue.pop()
        explored += 1
        rung_precision = ladder[item.rung]
        highest = max(highest, rung_precision)
        still_open: List[int] = []
        for index in item.alive:
            status = _clause_status(live[index], item.box, rung_precision)
            if status is _Status.CERTIFIED:
                logger.info("Clause %d certified after %d boxes", index, explored)
                return Verdict(
                    Status.SAT,
                    box=item.box,
                    clause_index=index,
                    refuted_boxes=refuted,
                    boxes_explored=explored,
                    max_precision=highest,
                )
            if status is _Status.OPEN:
                still_open.append(index)
        if not still_open:
            refuted += 1
            covered += item.share
            continue
        if not active:
            # point box with an undecided clause: only more precision can help
            if item.rung + 1 < len(ladder):
                queue.push(_Item((), item.box, item.share, item.rung + 1, tuple(still_open)), Fraction(0))
            else:
                return Verdict(
                    Status.UNKNOWN,
                    refuted_boxes=refuted,
                    boxes_explored=explored,
                    max_precision=highest,
                    message="undecided at the highest precision",
                )
            continue
        if _narrow(item.box, active, rung_precision) and item.rung + 1 < len(ladder):
            queue.push(_Item((), item.box, item.share, item.rung + 1, tuple(still_open)), Fraction(0))
            continue
        dimension = item.box.widest(active)
        for half in item.box.split(dimension):
            width = half.intervals[dimension].width
            queue.push(_Item((), half, item.share / 2, item.rung, tuple(still_open)), width)

    assert covered == 1, "refuted boxes must cover the period box"
    logger.info("All %d boxes refuted", refuted)
    return Verdict(Status.UNSAT, refuted_boxes=refuted, boxes_explored=explored, max_precision=highest)


# ============= INTEGER WITNESSES =============


def reduce_mod_period(x: int, multiplier: int, precision: int) -> Interval:
    """Enclosure of x - floor(x / P) * P with P = 2 N pi."""
    period = period_enclosure(multiplier, precision)
    quotient = math.floor(Fraction(x) / to_fraction(period.lo))
    shift = mul(from_fraction(Fraction(quotient), precision), period, precision)
    return sub(from_fraction(Fraction(x), precision), shift, precision)


def _scan(bound: int) -> Iterator[int]:
    yield 0
    for value in range(1, bound + 1):
        yield value
        yield -value


def extract_integer_witness(
    box: Box,
    multiplier: int,
    bound: Optional[int] = None,
    dimensions: Optional[Sequence[int]] = None,
    precision: int = 53,
) -> Optional[Tuple[int, ...]]:
    """Integers whose residues modulo 2 N pi fall strictly inside the box.

    Only the given dimensions are matched (default: every coordinate with
    positive width); the other coordinates are 0.
    """
    bound = config.WITNESS_BOUND if bound is None else bound
    if bound <= 0:
        return None
    if dimensions is None:
        dimensions = [d for d, interval in enumerate(box.intervals) if interval.width > 0]
    witness = [0] * box.dimension
    for d in dimensions:
        interval = box.intervals[d]
        lo, hi = to_fraction(interval.lo), to_fraction(interval.hi)
        for x in _scan(bound):
            reduced = reduce_mod_period(x, multiplier, precision)
            if lo < to_fraction(reduced.lo) and to_fraction(reduced.hi) < hi:
                witness[d] = x
                break
        else:
            logger.info("No integer within %d lands inside coordinate %d", bound, d)
            return None
    return tuple(witness)
