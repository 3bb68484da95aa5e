import asyncio
import dataclasses
import logging

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware

import config
from audit import AuditLogger
from decision_store import create_decision, delete_decision, get_decision, list_decisions
from errors import CongruenceCapExceeded, NonExistentialSentence, SourceError
from frontend import format_sentence, parse
from middleware import RateLimitMiddleware, RequestSizeLimitMiddleware, get_client_ip
from models import (
    DecideRequest,
    DecideResponse,
    DecisionSummary,
    ErrorDetail,
    HealthResponse,
    ParseRequest,
    ParseResponse,
    PipelineTraceModel,
    VerdictModel,
)
from pipeline import DecideOptions, decide_existential
from proxy_search import SCHEDULES

# Configure logging
logging.basicConfig(level=config.LOG_LEVEL)
logger = logging.getLogger(__name__)

app = FastAPI(title="Sine-Presburger Solver")

# These execute from bottom to top
app.add_middleware(RateLimitMiddleware, requests_per_minute=config.RATE_LIMIT_PER_MINUTE)
app.add_middleware(RequestSizeLimitMiddleware, max_bytes=config.MAX_SENTENCE_BYTES)

# Add CORS middleware (should be last/outermost)
app.add_middleware(
    CORSMiddleware,
    allow_origins=config.CORS_ORIGINS,
    allow_credentials=config.CORS_ALLOW_CREDENTIALS,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _source_error(exc: SourceError, request: Request) -> HTTPException:
    AuditLogger.log_rejection(request.url.path, str(exc), get_client_ip(request))
    detail = ErrorDetail(line=exc.line, column=exc.column, message=exc.message)
    return HTTPException(status_code=400, detail=detail.model_dump())


def _parse_or_400(text: str, request: Request):
    if len(text.encode("utf-8")) > config.MAX_SENTENCE_BYTES:
        raise HTTPException(status_code=413, detail=f"Sentence exceeds {config.MAX_SENTENCE_BYTES} bytes")
    try:
        return parse(text)
    except SourceError as exc:
        raise _source_error(exc, request) from exc


def _options_for(payload: DecideRequest) -> DecideOptions:
    options = DecideOptions(trace_formulas=payload.trace)
    overrides = {}
    if payload.budget is not None:
        overrides["budget"] = payload.budget
    if payload.precision is not None:
        overrides["precision_ladder"] = DecideOptions.ladder_from(payload.precision)
    if payload.witness_bound is not None:
        overrides["witness_bound"] = payload.witness_bound
    if payload.schedule is not None:
        if payload.schedule not in SCHEDULES:
            raise HTTPException(
                status_code=422,
                detail=f"schedule must be one of {', '.join(SCHEDULES)}",
            )
        overrides["schedule"] = payload.schedule
    return dataclasses.replace(options, **overrides)


# ============= SOLVER API =============

@app.get("/api/health", response_model=HealthResponse)
async def health():
    return HealthResponse(
        status="ok",
        environment=config.ENVIRONMENT,
        precision_ladder=list(config.PRECISION_LADDER),
        congruence_cap=config.CONGRUENCE_CAP,
    )


@app.post("/api/parse", response_model=ParseResponse)
async def parse_sentence(payload: ParseRequest, request: Request):
    """Parse a sentence and echo its canonical form."""
    sentence = _parse_or_400(payload.sentence, request)
    return ParseResponse(
        canonical=format_sentence(sentence),
        variables=sentence.names,
        quantifiers=[quantifier for quantifier, _ in sentence.prefix],
        existential=sentence.is_existential,
    )


@app.post("/api/decide", response_model=DecideResponse)
async def decide(payload: DecideRequest, request: Request):
    """Run the decision pipeline off the event loop and store the outcome."""
    sentence = _parse_or_400(payload.sentence, request)
    options = _options_for(payload)

    try:
        decision = await asyncio.to_thread(decide_existential, sentence, options)
    except NonExistentialSentence as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except CongruenceCapExceeded as exc:
        AuditLogger.log_rejection(request.url.path, str(exc), get_client_ip(request))
        raise HTTPException(status_code=422, detail=str(exc)) from exc

    result = decision.to_model()
    trace = decision.trace if payload.trace else None
    record = create_decision(
        sentence=payload.sentence,
        result=result.model_dump(),
        trace=trace.model_dump() if trace else None,
    )
    logger.info("Decision %s stored with verdict %s", record.decision_id, record.verdict)
    return DecideResponse(decision_id=record.decision_id, result=result, trace=trace)


@app.get("/api/decisions", response_model=list[DecisionSummary])
async def decisions():
    return [
        DecisionSummary(
            decision_id=record["decision_id"],
            verdict=record["verdict"],
            created_at=record["created_at"],
            sentence=record["sentence"],
        )
        for record in list_decisions()
    ]


@app.get("/api/decisions/{decision_id}", response_model=DecideResponse)
async def decision_detail(decision_id: str):
    record = get_decision(decision_id)
    if not record:
        raise HTTPException(status_code=404, detail="Decision not found")
    return DecideResponse(
        decision_id=record.decision_id,
        result=VerdictModel(**record.result),
        trace=PipelineTraceModel(**record.trace) if record.trace else None,
    )


@app.delete("/api/decisions/{decision_id}")
async def remove_decision(decision_id: str):
    if not delete_decision(decision_id):
        raise HTTPException(status_code=404, detail="Decision not found")
    return {"success": True}
