# config.py
"""Environment-driven settings and the central logging setup.

Values come from the process environment, optionally seeded by a ``.env`` file
in the working directory (python-dotenv, never overriding real variables):

    LOG_LEVEL                  logging level name (INFO)
    PERFDOM_THREADS            worker processes used by ``reproduce`` (1)
    PERFDOM_BRUTE_FORCE_CELLS  largest n*m the brute-force oracle accepts (24)
    PERFDOM_MAX_ROWS           widest sweep the exact solver accepts (8)
    PERFDOM_MAX_BAND_ROWS      tallest band the transition graph accepts (7)
    PERFDOM_NODE_LIMIT         default window-search node budget (10**8)
    PERFDOM_ENUMERATE_LIMIT    cap on placements returned by enumeration (10**6)
"""
from __future__ import annotations

import logging
import os

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

load_dotenv(override=False)

# --- central logging (root logger kept simple, stderr only) ---
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format="%(levelname)s %(asctime)s %(message)s",
)
logger = logging.getLogger("perfdom.config")
logger.info("perfdom loaded (log level %s)", LOG_LEVEL)


class Settings(BaseModel):
    """Resolved guard values; every field can also be overridden per call."""

    model_config = ConfigDict(frozen=True)

    threads: int = Field(default=1, ge=1)
    brute_force_cells: int = Field(default=24, ge=1)
    max_rows: int = Field(default=8, ge=1)
    max_band_rows: int = Field(default=7, ge=2)
    node_limit: int = Field(default=10**8, ge=0)
    enumerate_limit: int = Field(default=10**6, ge=1)


_ENV_FIELDS = {
    "threads": "PERFDOM_THREADS",
    "brute_force_cells": "PERFDOM_BRUTE_FORCE_CELLS",
    "max_rows": "PERFDOM_MAX_ROWS",
    "max_band_rows": "PERFDOM_MAX_BAND_ROWS",
    "node_limit": "PERFDOM_NODE_LIMIT",
    "enumerate_limit": "PERFDOM_ENUMERATE_LIMIT",
}


def load_settings() -> Settings:
    """Read the PERFDOM_* variables; unparsable values fall back to defaults."""
    values = {}
    for field, env_name in _ENV_FIELDS.items():
        raw = os.getenv(env_name)
        if raw is None or not raw.strip():
            continue
        try:
            values[field] = int(raw)
        except ValueError:
            logger.warning("Ignoring %s=%r (not an integer)", env_name, raw)
    return Settings(**values)
