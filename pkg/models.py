from pydantic import BaseModel, Field
from typing import Dict, List, Optional


# Pipeline Trace Models
class StageSnapshot(BaseModel):
    name: str  # 'sine-equalities', 'linear-equalities', 'linear-variables', 'divisibility', 'proxy-search'
    clauses: int
    literals: int
    seconds: float
    formula: Optional[str] = None


class PipelineTraceModel(BaseModel):
    stages: List[StageSnapshot] = Field(default_factory=list)
    period_multiplier: int = 1
    schanuel_conditional: bool = False
    boxes_explored: int = 0
    refuted_boxes: int = 0
    max_precision: int = 0


# Verdict Models
class IntervalModel(BaseModel):
    lo: str
    hi: str


class VerdictModel(BaseModel):
    verdict: str  # 'SAT', 'UNSAT', 'UNKNOWN'
    witness: Optional[Dict[str, int]] = None
    certified_box: Optional[List[IntervalModel]] = None
    certified_clause: Optional[int] = None
    period_multiplier: int = 1
    schanuel_conditional: bool = False
    message: Optional[str] = None


# Command Line Models
class DecisionReport(BaseModel):
    verdict: str  # 'SAT', 'UNSAT', 'UNKNOWN'
    witness: Optional[Dict[str, int]] = None
    certified_box: Optional[List[IntervalModel]] = None  # reduced coordinates
    period_N: int = 1
    schanuel_conditional: bool = False
    stage_stats: List[StageSnapshot] = Field(default_factory=list)
    message: Optional[str] = None
    trace: Optional[PipelineTraceModel] = None


# API Models
class ParseRequest(BaseModel):
    sentence: str


class ParseResponse(BaseModel):
    canonical: str
    variables: List[str]
    quantifiers: List[str]
    existential: bool


class DecideRequest(BaseModel):
    sentence: str
    budget: Optional[int] = Field(default=None, gt=0)
    precision: Optional[int] = Field(default=None, ge=16)
    witness_bound: Optional[int] = Field(default=None, ge=0)
    schedule: Optional[str] = None
    trace: bool = False


class DecideResponse(BaseModel):
    decision_id: str
    result: VerdictModel
    trace: Optional[PipelineTraceModel] = None


class DecisionSummary(BaseModel):
    decision_id: str
    verdict: str
    created_at: str
    sentence: str


class ErrorDetail(BaseModel):
    line: Optional[int] = None
    column: Optional[int] = None
    message: str


class HealthResponse(BaseModel):
    status: str
    environment: str
    precision_ladder: List[int]
    congruence_cap: int
