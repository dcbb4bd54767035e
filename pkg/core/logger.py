# core/logger.py v1.0.0
import logging
import os
import json
from logging.handlers import RotatingFileHandler
from typing import Optional, Union
from core.config import LOG_DIR, DEBUG

os.makedirs(LOG_DIR, exist_ok=True)

LOG_FILE = os.path.join(LOG_DIR, "swbeam.log")

# Date | Level | Module | Message
LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

logger = logging.getLogger("SmallWorldBeam")
logger.setLevel(logging.DEBUG if DEBUG else logging.INFO)

if not logger.handlers:
    formatter = logging.Formatter(LOG_FORMAT, DATE_FORMAT)

    # Rotating file: 5MB per file, last 5 kept
    file_handler = RotatingFileHandler(
        LOG_FILE,
        maxBytes=5 * 1024 * 1024,
        backupCount=5,
        encoding="utf-8"
    )
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)

    # Console goes to stderr; stdout belongs to CLI payloads.
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.setLevel(logging.WARNING)
    logger.addHandler(console_handler)


def log_event(event_type: str, payload: Union[dict, str], level: str = "info", run_id: Optional[str] = None):
    """
    Central event writer.
    Dict payloads are serialized to compact JSON so log lines stay machine-parsable.
    """
    if isinstance(payload, dict):
        if run_id:
            payload = {"run_id": str(run_id), **payload}
        message = f"{event_type} | JSON: {json.dumps(payload, ensure_ascii=False, sort_keys=False)}"
    else:
        prefix = f"[{run_id}] " if run_id else ""
        message = f"{event_type} | {prefix}{str(payload)}"

    log_func = getattr(logger, level.lower(), logger.info)
    log_func(message)


def log_pipeline_step(step_name: str, duration: float, status: str = "OK", extra: dict = None, run_id: Optional[str] = None):
    """Logs the wall time of one pipeline stage."""
    payload = {
        "step": step_name,
        "ms": round(duration * 1000, 2),
        "status": status,
        "extra": extra or {}
    }
    log_event("PIPELINE_METRIC", payload, level="debug", run_id=run_id)


def log_layout_retry(requested_seed: int, used_seed: int, attempts: int, node_count: int, run_id: Optional[str] = None):
    """Logs how many regenerations a strongly connected layout needed."""
    log_event("LAYOUT_RETRY", {
        "requested_seed": requested_seed,
        "used_seed": used_seed,
        "attempts": attempts,
        "N": node_count,
    }, level="info" if attempts == 0 else "warning", run_id=run_id)


def log_run_row(experiment: str, seed: int, sweep_value: str, strategy: str,
                realized_p: float, apl_ratio: float, unidir_frac: float,
                run_id: Optional[str] = None):
    """Logs one finished repetition (one CSV row)."""
    log_event("RUN_ROW", {
        "experiment": experiment,
        "seed": seed,
        "sweep_value": sweep_value,
        "strategy": strategy,
        "p": round(realized_p, 6),
        "apl_ratio": round(apl_ratio, 6),
        "unidir_frac": round(unidir_frac, 6),
    }, run_id=run_id)


def log_repetition_error(experiment: str, seed: int, sweep_value: str,
                         error_type: str, error_msg: str, run_id: Optional[str] = None):
    """Diagnostic row for a repetition aborted by a module error."""
    log_event("REPETITION_FAILED", {
        "experiment": experiment,
        "seed": seed,
        "sweep_value": sweep_value,
        "error_type": error_type,
        "error_msg": str(error_msg)[:200],
    }, level="error", run_id=run_id)


def log_wfb_summary(estimator: str, events: int, piggybacks: int, max_buffer_fields: int,
                    nonzero_nodes: int, run_id: Optional[str] = None):
    """Logs the overhead of one WFB replay: piggybacked fields and neighbor-table size."""
    log_event("WFB_SUMMARY", {
        "estimator": estimator,
        "events": events,
        "piggybacks": piggybacks,
        "max_buffer_fields": max_buffer_fields,
        "nonzero_nodes": nonzero_nodes,
    }, level="debug", run_id=run_id)
