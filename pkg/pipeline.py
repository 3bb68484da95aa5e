"""Decision procedure for existential sentences.

Stages, each re-normalized to disjunctive normal form:

1. eliminate equalities and disequalities that mention sines
2. solve linear equalities, split linear disequalities
3. eliminate variables occurring outside sines
4. split divisibility constraints into residue classes
5. search one period box for a certified solution region
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import config
from audit import AuditLogger
from errors import NonExistentialSentence
from formulas import (
    Clause,
    Formula,
    Leaf,
    conjunction,
    disjunction,
    literal_variables,
    simplify_ground,
    to_dnf,
)
from frontend import Sentence, format_formula, parse
from linear_reduction import (
    Branch,
    Substitution,
    eliminate_divisibility,
    eliminate_equalities,
    eliminate_linear,
    is_false_clause,
)
from models import IntervalModel, PipelineTraceModel, StageSnapshot, VerdictModel
from numerics import formula_holds
from proxy_search import Status, Verdict, decide_proxy_nonempty, extract_integer_witness, period_multiplier
from sine_equality import eliminate_in_formula

logger = logging.getLogger(__name__)

Pair = Tuple[Clause, Substitution]


@dataclass(frozen=True)
class DecideOptions:
    budget: int = config.BOX_BUDGET
    precision_ladder: Tuple[int, ...] = tuple(config.PRECISION_LADDER)
    witness_bound: int = config.WITNESS_BOUND
    congruence_cap: int = config.CONGRUENCE_CAP
    schedule: str = config.SCHEDULE
    trace_formulas: bool = False

    @staticmethod
    def ladder_from(precision: int) -> Tuple[int, ...]:
        return (precision, 2 * precision, 4 * precision)


@dataclass
class Decision:
    verdict: Verdict
    names: List[str]
    witness: Optional[Tuple[int, ...]] = None
    period: int = 1
    schanuel_conditional: bool = False
    trace: PipelineTraceModel = field(default_factory=PipelineTraceModel)

    @property
    def status(self) -> Status:
        return self.verdict.status

    def to_model(self) -> VerdictModel:
        witness = None
        if self.witness is not None:
            witness = {name: value for name, value in zip(self.names, self.witness)}
        # the box lives in the reduced coordinates of the certified clause;
        # a box pinned at the origin in every coordinate certifies nothing
        box = None
        if self.verdict.box is not None and any(interval.width for interval in self.verdict.box.intervals):
            box = [IntervalModel(lo=lo, hi=hi) for lo, hi in self.verdict.box.describe()]
        return VerdictModel(
            verdict=self.verdict.status.value,
            witness=witness,
            certified_box=box,
            certified_clause=self.verdict.clause_index,
            period_multiplier=self.period,
            schanuel_conditional=self.schanuel_conditional,
            message=self.verdict.message or None,
        )


class _TraceRecorder:
    def __init__(self, names: Sequence[str], keep_formulas: bool):
        self.names = list(names)
        self.keep_formulas = keep_formulas
        self.trace = PipelineTraceModel()
        self.started = time.perf_counter()

    def snapshot(self, name: str, pairs: Sequence[Pair]) -> None:
        elapsed = time.perf_counter() - self.started
        literals = sum(len(clause) for clause, _ in pairs)
        text = None
        if self.keep_formulas:
            text = format_formula(_pairs_formula(pairs), self.names)
            if len(text) > config.TRACE_FORMULA_CHARS:
                text = text[: config.TRACE_FORMULA_CHARS] + " ..."
        self.trace.stages.append(
            StageSnapshot(name=name, clauses=len(pairs), literals=literals, seconds=elapsed, formula=text)
        )
        AuditLogger.log_stage_event(name, len(pairs), literals, elapsed)
        self.started = time.perf_counter()


def _pairs_formula(pairs: Sequence[Pair]) -> Formula:
    return disjunction(*(conjunction(*(Leaf(literal) for literal in clause)) for clause, _ in pairs))


def _expand(branches: Sequence[Branch]) -> List[Pair]:
    pairs: List[Pair] = []
    for branch in branches:
        for clause in to_dnf(branch.formula).clauses:
            if not is_false_clause(clause):
                pairs.append((clause, branch.substitution))
    return pairs


def _run_stage(
    pairs: Sequence[Pair],
    step: Callable[[Sequence, int, Optional[Substitution]], List[Branch]],
    arity: int,
) -> List[Pair]:
    branches: List[Branch] = []
    for clause, substitution in pairs:
        branches.extend(step(clause, arity, substitution))
    return _expand(branches)


def reduce_to_oscillatory(
    sentence: Sentence, options: DecideOptions, recorder: Optional[_TraceRecorder] = None
) -> Tuple[List[Pair], bool]:
    """Stages 1 to 4: clauses of pure sine inequalities with their back-substitutions."""
    arity = sentence.arity
    recorder = recorder or _TraceRecorder(sentence.names, False)

    matrix, conditional = eliminate_in_formula(sentence.matrix, options.congruence_cap)
    identity = Substitution.identity(arity)
    pairs = [(clause, identity) for clause in to_dnf(simplify_ground(matrix)).clauses if not is_false_clause(clause)]
    recorder.snapshot("sine-equalities", pairs)

    pairs = _run_stage(pairs, eliminate_equalities, arity)
    recorder.snapshot("linear-equalities", pairs)

    pairs = _run_stage(pairs, eliminate_linear, arity)
    recorder.snapshot("linear-variables", pairs)

    pairs = _run_stage(pairs, eliminate_divisibility, arity)
    recorder.snapshot("divisibility", pairs)
    return pairs, conditional


def decide_existential(sentence: Sentence, options: Optional[DecideOptions] = None) -> Decision:
    """Decide an existential sentence: SAT with a witness, UNSAT, or UNKNOWN."""
    if not sentence.is_existential:
        raise NonExistentialSentence("only existential sentences can be decided")
    options = options or DecideOptions()
    recorder = _TraceRecorder(sentence.names, options.trace_formulas)
    arity = sentence.arity

    pairs, conditional = reduce_to_oscillatory(sentence, options, recorder)
    clauses = [clause for clause, _ in pairs]
    multiplier = period_multiplier(clauses)
    verdict = decide_proxy_nonempty(
        clauses,
        arity,
        multiplier,
        budget=options.budget,
        ladder=options.precision_ladder,
        schedule=options.schedule,
    )
    recorder.snapshot("proxy-search", pairs)

    decision = Decision(
        verdict=verdict,
        names=sentence.names,
        period=multiplier,
        schanuel_conditional=conditional,
        trace=recorder.trace,
    )
    decision.trace.period_multiplier = multiplier
    decision.trace.schanuel_conditional = conditional
    decision.trace.boxes_explored = verdict.boxes_explored
    decision.trace.refuted_boxes = verdict.refuted_boxes
    decision.trace.max_precision = verdict.max_precision

    if verdict.status is Status.SAT:
        clause, substitution = pairs[verdict.clause_index]
        decision.witness = _witness(sentence, clause, substitution, verdict, multiplier, options)

    AuditLogger.log_verdict(
        verdict.status.value,
        {
            "variables": arity,
            "clauses": len(pairs),
            "period": multiplier,
            "boxes": verdict.boxes_explored,
            "witness": decision.witness is not None,
        },
    )
    return decision


def _witness(
    sentence: Sentence,
    clause: Clause,
    substitution: Substitution,
    verdict: Verdict,
    multiplier: int,
    options: DecideOptions,
) -> Optional[Tuple[int, ...]]:
    dimensions = sorted({j for literal in clause for j in literal_variables(literal)})
    reduced = extract_integer_witness(
        verdict.box,
        multiplier,
        bound=options.witness_bound,
        dimensions=dimensions,
        precision=options.precision_ladder[0],
    )
    if reduced is None:
        return None
    values = substitution.apply(reduced)
    if any(value.denominator != 1 for value in values):
        logger.warning("Back-substituted witness %s is not integral", values)
        return None
    witness = tuple(int(value) for value in values)
    try:
        holds = formula_holds(sentence.matrix, witness)
    except ArithmeticError as exc:
        logger.warning("Could not verify candidate witness %s: %s", witness, exc)
        return None
    if not holds:
        logger.warning("Candidate witness %s fails the original matrix", witness)
        return None
    return witness


def decide_text(text: str, options: Optional[DecideOptions] = None) -> Decision:
    return decide_existential(parse(text), options)
