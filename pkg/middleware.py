import logging
import time
from typing import Dict

from fastapi import Request, status
from fastapi.responses import JSONResponse
from starlette.middleware.base import BaseHTTPMiddleware

from audit import AuditLogger

logger = logging.getLogger(__name__)


def get_client_ip(request: Request) -> str:
    """Get the client IP address from the request."""
    # Check for X-Forwarded-For header (behind proxy)
    forwarded = request.headers.get("X-Forwarded-For")
    if forwarded:
        return forwarded.split(",")[0].strip()
    return request.client.host if request.client else "unknown"


class RateLimitMiddleware(BaseHTTPMiddleware):
    """Per-client sliding-window rate limit for the decision endpoints."""

    def __init__(self, app, requests_per_minute: int = 60, paths: tuple = ("/api/decide",)):
        super().__init__(app)
        self.requests_per_minute = requests_per_minute
        self.paths = paths
        self.request_counts: Dict[str, list] = {}

    def prune(self, now: float) -> None:
        """Forget clients whose last request left the one-minute window."""
        stale = [ip for ip, stamps in self.request_counts.items() if not stamps or now - stamps[-1] >= 60]
        for ip in stale:
            del self.request_counts[ip]

    async def dispatch(self, request: Request, call_next):
        if request.url.path not in self.paths:
            return await call_next(request)

        client_ip = get_client_ip(request)
        current_time = time.time()
        self.prune(current_time)

        # Keep only timestamps from the last minute
        recent = [
            timestamp for timestamp in self.request_counts.get(client_ip, [])
            if current_time - timestamp < 60
        ]

        if len(recent) >= self.requests_per_minute:
            self.request_counts[client_ip] = recent
            AuditLogger.log_rejection(request.url.path, "rate limit exceeded", client_ip)
            return JSONResponse(
                status_code=status.HTTP_429_TOO_MANY_REQUESTS,
                content={"detail": "Rate limit exceeded. Please try again later."},
            )

        recent.append(current_time)
        self.request_counts[client_ip] = recent
        return await call_next(request)


class RequestSizeLimitMiddleware(BaseHTTPMiddleware):
    """Reject request bodies whose declared length exceeds the limit."""

    def __init__(self, app, max_bytes: int):
        super().__init__(app)
        self.max_bytes = max_bytes

    async def dispatch(self, request: Request, call_next):
        declared = request.headers.get("content-length")
        if declared and declared.isdigit() and int(declared) > self.max_bytes:
            AuditLogger.log_rejection(request.url.path, f"body of {declared} bytes", get_client_ip(request))
            return JSONResponse(
                status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
                content={"detail": f"Request body exceeds {self.max_bytes} bytes"},
            )
        return await call_next(request)
