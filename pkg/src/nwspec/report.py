"""Versioned JSON reports and plot-ready CSV output."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from datetime import datetime, timezone
from enum import Enum

import numpy as np

from ._io import atomic_write_text

__all__ = ["SCHEMA_VERSION", "build_report", "validate_report", "report_to_json", "write_report",
           "emit_lambda_curve", "timestamp"]

SCHEMA_VERSION = "1.0"

# top-level key -> accepted types
_SCHEMA = {
    "schema_version": str,
    "task": str,
    "config": dict,
    "results": dict,
    "provenance": dict,
    "pass_fail": dict,
}
_PROVENANCE = {"version": str, "timestamp": str, "seed": (int, type(None))}


def timestamp() -> str:
    """UTC time in ISO format; ``SOURCE_DATE_EPOCH`` pins it for reproducible runs."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return now.strftime("%Y-%m-%dT%H:%M:%SZ")


def _plain(obj):
    """Convert numpy scalars/arrays, enums and non-finite floats into JSON values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, complex):
        return [_plain(obj.real), _plain(obj.imag)]
    return obj


def build_report(task: str, config: dict, results: dict, pass_fail: dict, seed, version: str) -> dict:
    return _plain({
        "schema_version": SCHEMA_VERSION,
        "task": task,
        "config": config,
        "results": results,
        "provenance": {"version": version, "timestamp": timestamp(), "seed": seed},
        "pass_fail": pass_fail,
    })


def validate_report(report: dict) -> None:
    """Raise ``ValueError`` unless ``report`` follows the current schema."""
    for key, typ in _SCHEMA.items():
        if key not in report:
            raise ValueError(f"report is missing {key!r}")
        if not isinstance(report[key], typ):
            raise ValueError(f"report field {key!r} has type {type(report[key]).__name__}")
    if report["schema_version"] != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {report['schema_version']!r}")
    for key, typ in _PROVENANCE.items():
        if key not in report["provenance"] or not isinstance(report["provenance"][key], typ):
            raise ValueError(f"provenance field {key!r} missing or mistyped")
    for key, val in report["pass_fail"].items():
        if not isinstance(val, bool):
            raise ValueError(f"pass_fail[{key!r}] is not a boolean")


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report: dict, path):
    validate_report(report)
    return atomic_write_text(path, report_to_json(report))


def emit_lambda_curve(estimate, path):
    """CSV with columns ``alpha, lambda_min, verdict``, one row per probed alpha."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "lambda_min", "verdict"])
    for alpha, lam, verdict in estimate.lambda_curve():
        w.writerow([repr(float(alpha)), repr(float(lam)), verdict])
    return atomic_write_text(path, buf.getvalue())
