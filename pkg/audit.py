"""Structured event logging for solver runs."""

import logging
import time
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class AuditLogger:
    """Audit logger for pipeline stages and verdicts."""

    @staticmethod
    def log_stage_event(stage: str, clauses: int, literals: int, seconds: float):
        """Log the formula size after a pipeline stage."""
        event = {
            "event": "stage",
            "stage": stage,
            "clauses": clauses,
            "literals": literals,
            "seconds": round(seconds, 6),
            "timestamp": time.time(),
        }
        logger.info("Stage finished: %s", event)

    @staticmethod
    def log_verdict(verdict: str, details: Dict[str, Any]):
        """Log the final verdict of a decision."""
        event = {
            "event": "verdict",
            "verdict": verdict,
            "details": details,
            "timestamp": time.time(),
        }
        if verdict == "UNKNOWN":
            logger.warning("Decision inconclusive: %s", event)
        else:
            logger.info("Decision reached: %s", event)

    @staticmethod
    def log_rejection(source: str, reason: str, client: Optional[str] = None):
        """Log a rejected input (parse error, oversize body, rate limit)."""
        event = {
            "event": "rejection",
            "source": source,
            "reason": reason,
            "client": client,
            "timestamp": time.time(),
        }
        logger.warning("Input rejected: %s", event)
