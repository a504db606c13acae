"""Runtime configuration read from the environment (and an optional .env).

| Variable | Purpose | Default |
|----------|---------|---------|
| ``RPS_STOPTIME_THREADS`` | simulation worker threads | CPU count |
| ``RPS_STOPTIME_BLOCK_SIZE`` | trials per RNG block | 65536 |
| ``RPS_STOPTIME_LOG_LEVEL`` | root log level | WARNING |

The block size fixes how trials map to RNG substreams, so it is part of a
simulation's identity; the thread count is not.
"""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

load_dotenv()

DEFAULT_BLOCK_SIZE = 65536


class Settings(BaseModel):
    threads: Optional[int] = Field(default=None, ge=1)
    block_size: int = Field(default=DEFAULT_BLOCK_SIZE, ge=1)
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def _check_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown log level '{value}'")
        return value

    def worker_count(self) -> int:
        return self.threads or os.cpu_count() or 1


def load_settings() -> Settings:
    """Build settings from the current environment; raises pydantic's
    ValidationError on malformed values."""
    values = {}
    if os.getenv("RPS_STOPTIME_THREADS"):
        values["threads"] = os.getenv("RPS_STOPTIME_THREADS")
    if os.getenv("RPS_STOPTIME_BLOCK_SIZE"):
        values["block_size"] = os.getenv("RPS_STOPTIME_BLOCK_SIZE")
    if os.getenv("RPS_STOPTIME_LOG_LEVEL"):
        values["log_level"] = os.getenv("RPS_STOPTIME_LOG_LEVEL")
    return Settings(**values)
