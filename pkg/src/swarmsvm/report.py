"""Run reports and the flat ``key=value`` record format used for output."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def format_float(x: float) -> str:
    """17 significant digits: round-trips any float64 exactly."""
    return f"{float(x):.17g}"


def format_vector(v) -> str:
    return ",".join(format_float(x) for x in np.asarray(v, dtype=float).ravel())


def format_record(fields: dict) -> str:
    """One flat record: space-separated key=value pairs, insertion order."""
    parts = []
    for key, value in fields.items():
        if isinstance(value, float):
            value = format_float(value)
        elif isinstance(value, np.ndarray):
            value = format_vector(value)
        parts.append(f"{key}={value}")
    return " ".join(parts)


@dataclass
class RunReport:
    """Outcome of one optimization or benchmark run.

    ``deviation`` is the gap to a known oracle solution and is only set by
    benchmark drivers that have one.  ``elapsed_ms`` is wall time and is
    serialized as its own key so determinism checks can drop it.
    """

    best_position: np.ndarray
    best_fitness: float
    evaluations: int
    elapsed_ms: float
    seed: int
    deviation: float | None = None

    def to_record(self) -> dict:
        fields = {
            "best_fitness": format_float(self.best_fitness),
            "best_position": format_vector(self.best_position),
            "evaluations": str(self.evaluations),
            "elapsed_ms": format_float(self.elapsed_ms),
            "seed": str(self.seed),
        }
        if self.deviation is not None:
            fields["deviation"] = format_float(self.deviation)
        return fields

    def record_line(self) -> str:
        return format_record(self.to_record())
