"""Structured output: schema-versioned JSON documents and their parser.

Every command that supports ``--format structured`` emits exactly one JSON
document with ``schema_version`` "1"; ``parse_report`` is the matching
in-tree consumer, so round-tripping is part of the test surface.
"""

from __future__ import annotations

import json

SCHEMA_VERSION = "1"
KNOWN_KINDS = ("check", "certify", "export", "fuzz", "differential", "sequence")


def check_document(system: str, engine: str, verdict: str, *,
                   k: int | None = None, trace: list[str] | None = None,
                   certificate_path: str | None = None,
                   reason: str | None = None, bounded: bool = False) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "check",
        "system": system,
        "engine": engine,
        "verdict": verdict,
        "bounded": bounded,
        "k": k,
        "trace": trace,
        "certificate": certificate_path,
        "reason": reason,
    }


def certify_document(system: str, k: int, items: dict[str, dict],
                     all_passed: bool, e_exists: bool | None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "certify",
        "system": system,
        "k": k,
        "items": items,
        "all_passed": all_passed,
        "e_exists": e_exists,
    }


def render(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def parse_report(text: str) -> dict:
    """Parse a structured document, validating schema version and kind."""
    document = json.loads(text)
    if not isinstance(document, dict):
        raise ValueError("structured report must be a JSON object")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {version!r}")
    if document.get("kind") not in KNOWN_KINDS:
        raise ValueError(f"unknown report kind {document.get('kind')!r}")
    return document
