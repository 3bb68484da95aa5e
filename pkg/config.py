import os
from typing import List

# Environment configuration
ENVIRONMENT = os.getenv("ENVIRONMENT", "development")  # development | production

# Logging
LOG_LEVEL = os.getenv("SINPA_LOG_LEVEL", "INFO").upper()

# Branch-and-prune budget (number of boxes processed before UNKNOWN)
BOX_BUDGET = int(os.getenv("SINPA_BOX_BUDGET", "1000000"))

# Precision ladder in bits; the first rung is the working precision
PRECISION_LADDER: List[int] = [
    int(bits) for bits in os.getenv("SINPA_PRECISION_LADDER", "53,113,256").split(",") if bits.strip()
]

# Integer witness search bound B (coordinates scanned in [-B, B])
WITNESS_BOUND = int(os.getenv("SINPA_WITNESS_BOUND", "10000"))

# Largest sine-summand count K for congruence enumeration
CONGRUENCE_CAP = int(os.getenv("SINPA_CONGRUENCE_CAP", "8"))

# Box exploration schedule: fifo | lifo | widest
SCHEDULE = os.getenv("SINPA_SCHEDULE", "fifo")

# HTTP surface
RATE_LIMIT_PER_MINUTE = int(os.getenv("SINPA_RATE_LIMIT_PER_MINUTE", "30"))
MAX_SENTENCE_BYTES = int(os.getenv("SINPA_MAX_SENTENCE_BYTES", "65536"))
DECISION_TTL_MINUTES = int(os.getenv("SINPA_DECISION_TTL_MINUTES", "60"))

# CORS settings
CORS_ORIGINS = os.getenv("CORS_ORIGINS", "http://localhost:3000").split(",")
CORS_ALLOW_CREDENTIALS = False

# Trace snapshots keep at most this many characters of formula text
TRACE_FORMULA_CHARS = int(os.getenv("SINPA_TRACE_FORMULA_CHARS", "2000"))
