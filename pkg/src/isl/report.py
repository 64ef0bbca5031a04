"""JSON analysis reports: assembly, canonical serialization, schema access."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from importlib import resources

SCHEMA_VERSION = "1.0"


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def rational(x) -> str:
    return str(Fraction(x))


def make_report(command: str, options: dict, path: str, sha256: str | None, exit_code: int,
                result: dict | None, error: dict | None, seconds: float) -> dict:
    from . import __version__

    status = {0: "ok", 1: "negative", 2: "input-error", 3: "verification-failure"}[exit_code]
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "options": options,
        "input": {"path": path, "sha256": sha256},
        "status": status,
        "exit_code": exit_code,
        "result": result,
        "error": error,
        "timing": {"seconds": round(seconds, 6)},
    }


def dumps(report: dict) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def without_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


def load_schema() -> dict:
    text = resources.files("isl").joinpath("schemas/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
