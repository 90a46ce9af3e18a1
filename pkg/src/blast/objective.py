"""Objective construction and comparison relations for the learners.

Residuals are normalized by each target's scale; the single objective is
the weighted sum of squared residuals. The hierarchical comparison
quantizes each rank level by its tolerance (floor(value / tol)) so the
resulting order is transitive and sortable.
"""

import math
from dataclasses import dataclass, field

import numpy as np

INFEASIBLE = math.inf

LESS, EQUAL, GREATER = -1, 0, 1


@dataclass
class Candidate:
    """A parameter vector with its predictions and objective score(s)."""

    params: np.ndarray
    predictions: dict = field(default_factory=dict)  # target id -> float | None
    objective: float = INFEASIBLE
    level_objectives: dict = field(default_factory=dict)  # rank -> float
    feasible: bool = False
    errors: dict = field(default_factory=dict)  # target id -> message

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=np.float64)

    def to_dict(self):
        return {
            "params": self.params.tolist(),
            "predictions": self.predictions,
            "objective": None if math.isinf(self.objective) else self.objective,
            "level_objectives": {str(k): v for k, v in self.level_objectives.items()},
            "feasible": self.feasible,
            "errors": self.errors,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            params=np.array(d["params"], dtype=np.float64),
            predictions=dict(d.get("predictions", {})),
            objective=INFEASIBLE if d.get("objective") is None else float(d["objective"]),
            level_objectives={int(k): float(v) for k, v in d.get("level_objectives", {}).items()},
            feasible=bool(d.get("feasible", False)),
            errors=dict(d.get("errors", {})),
        )


def residual(predicted, target):
    """Normalized residual (predicted - target) / scale."""
    if target.scale <= 0:
        raise ValueError("target scale must be positive")
    return (predicted - target.target) / target.scale


def single_objective(predictions, targets):
    """Weighted sum of squared normalized residuals; +inf on any failure."""
    total = 0.0
    for t in targets:
        p = predictions.get(t.id)
        if p is None or not math.isfinite(p):
            return INFEASIBLE
        total += t.weight * residual(p, t) ** 2
    return total


def level_objectives(predictions, targets):
    """Per-rank weighted sum of squared residuals; absent ranks omitted."""
    levels = {}
    for t in targets:
        p = predictions.get(t.id)
        if p is None or not math.isfinite(p):
            return {rank: INFEASIBLE for rank in {x.rank for x in targets}}
        levels[t.rank] = levels.get(t.rank, 0.0) + t.weight * residual(p, t) ** 2
    return levels


def make_candidate(vector, predictions, targets, errors=None):
    """Assemble a Candidate from raw predictions (None marks a failure)."""
    feasible = all(
        predictions.get(t.id) is not None and math.isfinite(predictions[t.id])
        for t in targets
    )
    return Candidate(
        params=vector,
        predictions=dict(predictions),
        objective=single_objective(predictions, targets),
        level_objectives=level_objectives(predictions, targets),
        feasible=feasible,
        errors=dict(errors or {}),
    )


def compare_hierarchical(a, b, level_tolerances):
    """Lexicographic comparison over quantized rank levels.

    Returns LESS when a is preferred. Infeasible candidates rank after all
    feasible ones; two infeasible candidates compare equal.
    """
    if a.feasible != b.feasible:
        return LESS if a.feasible else GREATER
    if not a.feasible:
        return EQUAL
    ranks = sorted(a.level_objectives)
    if ranks != sorted(b.level_objectives):
        raise ValueError("candidates have different rank sets")
    for rank in ranks:
        tol = level_tolerances.get(rank)
        if tol is None or tol <= 0:
            raise ValueError(f"missing or non-positive tolerance for rank {rank}")
        qa = math.floor(a.level_objectives[rank] / tol)
        qb = math.floor(b.level_objectives[rank] / tol)
        if qa != qb:
            return LESS if qa < qb else GREATER
    return EQUAL


def compare_single(a, b):
    """Plain single-objective comparison; infeasible candidates rank last."""
    if a.feasible != b.feasible:
        return LESS if a.feasible else GREATER
    if a.objective < b.objective:
        return LESS
    if a.objective > b.objective:
        return GREATER
    return EQUAL


def hierarchical_comparator(level_tolerances):
    tols = {int(k): float(v) for k, v in level_tolerances.items()}
    return lambda a, b: compare_hierarchical(a, b, tols)


def dominates(a, b):
    """Pareto dominance over rank->value maps (or equal-length sequences)."""
    if isinstance(a, dict):
        if set(a) != set(b):
            raise ValueError("objective key sets differ")
        keys = sorted(a)
        av = [a[k] for k in keys]
        bv = [b[k] for k in keys]
    else:
        if len(a) != len(b):
            raise ValueError("objective lengths differ")
        av, bv = list(a), list(b)
    no_worse = all(x <= y for x, y in zip(av, bv))
    strictly = any(x < y for x, y in zip(av, bv))
    return no_worse and strictly
