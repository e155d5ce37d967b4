"""Solver reports and deterministic JSON serialization."""

import json
from dataclasses import dataclass, field

import numpy as np


def jsonable(value):
    """Recursively convert numpy scalars/arrays and tuples to JSON types."""
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, frozenset):
        return sorted(jsonable(v) for v in value)
    return value


def dump_json(payload):
    """Canonical JSON: sorted keys, stable float repr, trailing newline."""
    return json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"


@dataclass
class SolverReport:
    """Outcome of a solver run plus enough bookkeeping to reproduce it."""

    solver: str
    outcome: tuple
    objective_trace: tuple
    iterations: int
    seed: object = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "solver": self.solver,
            "outcome": jsonable(self.outcome),
            "objective_trace": jsonable(self.objective_trace),
            "iterations": self.iterations,
            "seed": self.seed,
            "diagnostics": jsonable(self.diagnostics),
        }

    def to_json(self):
        return dump_json(self.to_dict())
