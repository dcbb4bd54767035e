# core/config.py v1.0.0
"""
Environment configuration for the small-world beamforming simulator.

Values come from the process environment, optionally seeded from a `.env`
file in the project root.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR_PATH = Path(__file__).resolve().parent.parent
BASE_DIR = str(BASE_DIR_PATH)

load_dotenv(BASE_DIR_PATH / ".env")


def _env_flag(name: str, default: bool = False) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


DEBUG = _env_flag("SWB_DEBUG")
LOG_DIR = os.getenv("SWB_LOG_DIR", os.path.join(BASE_DIR, "logs"))
EXPERIMENTS_DIR = os.getenv("SWB_EXPERIMENTS_DIR", os.path.join(BASE_DIR, "experiments"))

# Parallel repetitions; 1 keeps the whole run in-process.
WORKERS = max(1, _env_int("SWB_WORKERS", 1))
