"""Shared report plumbing: validation and audit results with witnesses.

Checks in this package never raise on a *failed property* -- they collect
violations with enough detail to reproduce the failure, so the CLI can
print witnesses and the caller can decide on exit codes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class GasketlabError(Exception):
    """Base for all package errors."""


class ScopeError(GasketlabError):
    """Input is valid but outside the supported family (CLI exit 3)."""


class FormatError(GasketlabError):
    """Malformed input file or text (CLI exit 2)."""


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    witness: tuple = ()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "detail": self.detail,
            "witness": [_jsonable(w) for w in self.witness],
        }


@dataclass
class Report:
    """Outcome of one validation or audit: violations plus summary stats."""

    violations: list[Violation] = field(default_factory=list)
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str, witness: tuple = ()) -> None:
        self.violations.append(Violation(kind, detail, witness))

    def merge(self, other: "Report", prefix: str = "") -> None:
        self.violations.extend(other.violations)
        for key, value in other.stats.items():
            self.stats[prefix + key] = value

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [v.to_json() for v in self.violations],
            "stats": {k: _jsonable(v) for k, v in sorted(self.stats.items())},
        }


def _jsonable(value):
    if isinstance(value, float) and value == float("inf"):
        return "inf"
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in sorted(value.items())}
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, float):
        return value
    return str(value)
