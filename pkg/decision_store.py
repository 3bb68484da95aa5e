"""In-memory store for finished decisions served by the HTTP API."""

from __future__ import annotations

import secrets
from dataclasses import asdict, dataclass
from datetime import datetime, timedelta
from typing import Any, Dict, List, Optional

import config


@dataclass
class DecisionRecord:
    decision_id: str
    sentence: str
    verdict: str
    result: Dict[str, Any]
    trace: Optional[Dict[str, Any]]
    created_at: str
    last_seen_at: str


_DECISIONS: Dict[str, DecisionRecord] = {}


def create_decision(
    *,
    sentence: str,
    result: Dict[str, Any],
    trace: Optional[Dict[str, Any]] = None,
) -> DecisionRecord:
    """Record a finished decision under a fresh identifier."""

    purge_expired()
    decision_id = secrets.token_urlsafe(12)
    now = datetime.utcnow().isoformat()
    record = DecisionRecord(
        decision_id=decision_id,
        sentence=sentence,
        verdict=result.get("verdict", "UNKNOWN"),
        result=result,
        trace=trace,
        created_at=now,
        last_seen_at=now,
    )
    _DECISIONS[decision_id] = record
    return record


def get_decision(decision_id: str) -> Optional[DecisionRecord]:
    record = _DECISIONS.get(decision_id)
    if record:
        touch_decision(decision_id)
    return record


def touch_decision(decision_id: str) -> None:
    if decision_id in _DECISIONS:
        _DECISIONS[decision_id].last_seen_at = datetime.utcnow().isoformat()


def delete_decision(decision_id: str) -> Optional[DecisionRecord]:
    return _DECISIONS.pop(decision_id, None)


def purge_expired(now: Optional[datetime] = None) -> int:
    now = now or datetime.utcnow()
    cutoff = now - timedelta(minutes=config.DECISION_TTL_MINUTES)
    to_remove = [
        did for did, record in _DECISIONS.items()
        if datetime.fromisoformat(record.last_seen_at) < cutoff
    ]
    for did in to_remove:
        _DECISIONS.pop(did, None)
    return len(to_remove)


def list_decisions() -> List[dict]:
    purge_expired()
    return [asdict(record) for record in _DECISIONS.values()]


def clear_decisions() -> None:
    _DECISIONS.clear()
