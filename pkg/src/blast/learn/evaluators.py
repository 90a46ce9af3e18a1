"""Evaluators mapping parameter-vector batches to scored Candidates.

Batches are routed through the parallel module, so a whole GA generation
can be evaluated concurrently. Evaluation of one vector must be pure: the
fabric may re-execute tasks (at-least-once delivery).
"""

import json
import math

import numpy as np

from .. import potentials
from ..objective import Candidate, make_candidate
from ..parallel import SerialExecutor, pmap
from ..properties import PropertyError, compute_property
from ..structures import Structure
from ..trainset import Dataset, TargetProperty
from ..wrapper import WrapperError


def serialize_structure(s):
    return {
        "species": list(s.species),
        "positions": s.positions.tolist(),
        "cell": None if s.cell is None else s.cell.tolist(),
        "periodic": list(s.periodic),
        "label": s.label,
    }


def deserialize_structure(d):
    return Structure(
        tuple(d["species"]),
        np.array(d["positions"], dtype=np.float64),
        None if d.get("cell") is None else np.array(d["cell"], dtype=np.float64),
        tuple(bool(x) for x in d.get("periodic", (False, False, False))),
        d.get("label", ""),
    )


def make_eval_spec(space, dataset):
    """Self-contained evaluation spec a remote worker can rebuild from."""
    return {
        "model_id": space.model_id,
        "species": list(space.species),
        "specs": [
            {
                "name": s.name,
                "unit": s.unit,
                "lower": s.lower,
                "upper": s.upper,
                "default_low": s.default_low,
                "default_high": s.default_high,
            }
            for s in space.specs
        ],
        "structures": {
            label: serialize_structure(s) for label, s in dataset.structures.items()
        },
        "targets": [t.to_dict() for t in dataset.targets],
    }


def load_eval_spec(spec):
    space = potentials.ParameterSpace(
        spec["model_id"],
        tuple(spec["species"]),
        tuple(potentials.ParameterSpec(**s) for s in spec["specs"]),
    )
    dataset = Dataset(
        structures={k: deserialize_structure(v) for k, v in spec["structures"].items()},
        targets=[TargetProperty.from_dict(t) for t in spec["targets"]],
    )
    return space, dataset


def evaluate_vector(space, dataset, vector, external_evaluators=None):
    """Predict every target for one parameter vector; failures become None."""
    predictions = {}
    errors = {}
    cache = {}
    for t in dataset.targets:
        try:
            predictions[t.id] = compute_property(
                t.kind, space, vector, dataset,
                external_evaluators=external_evaluators, cache=cache,
            )
        except (PropertyError, ValueError, ArithmeticError, WrapperError) as exc:
            predictions[t.id] = None
            errors[t.id] = str(exc)
    return make_candidate(vector, predictions, dataset.targets, errors)


_SPEC_CACHE = {}


def evaluate_fit_task(payload):
    """Worker-side entry point: payload = {"spec": ..., "params": [...]}.

    The rebuilt (space, dataset) is cached by spec content so repeated
    tasks of one batch pay the parse cost once.
    """
    key = json.dumps(payload["spec"], sort_keys=True)
    if key not in _SPEC_CACHE:
        _SPEC_CACHE.clear()  # one live spec at a time is enough
        _SPEC_CACHE[key] = load_eval_spec(payload["spec"])
    space, dataset = _SPEC_CACHE[key]
    vector = np.array(payload["params"], dtype=np.float64)
    return evaluate_vector(space, dataset, vector).to_dict()


class FitEvaluator:
    """Batch evaluator for the fitting objective.

    With a broker executor the work is shipped as JSON payloads that the
    generic worker evaluator (evaluate_fit_task) understands; otherwise the
    closure runs in-process.
    """

    def __init__(self, space, dataset, executor=None, external_evaluators=None):
        self.space = space
        self.dataset = dataset
        self.executor = executor or SerialExecutor()
        self.external_evaluators = external_evaluators
        self._spec = None

    def __call__(self, vectors):
        vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
        if getattr(self.executor, "wants_serializable", False):
            if self._spec is None:
                self._spec = make_eval_spec(self.space, self.dataset)
            payloads = [
                {"spec": self._spec, "params": v.tolist()} for v in vectors
            ]
            results = pmap(payloads, evaluate_fit_task, self.executor)
            return [Candidate.from_dict(r) for r in results]
        fn = lambda v: evaluate_vector(
            self.space, self.dataset, v, self.external_evaluators
        )
        return pmap(vectors, fn, self.executor)


class FunctionEvaluator:
    """Wrap a plain scalar (or vector) test function as an evaluator."""

    def __init__(self, fn, vector_fn=None):
        self.fn = fn
        self.vector_fn = vector_fn

    def __call__(self, vectors):
        out = []
        for v in vectors:
            v = np.asarray(v, dtype=np.float64)
            value = float(self.fn(v))
            levels = (
                {i + 1: float(x) for i, x in enumerate(self.vector_fn(v))}
                if self.vector_fn
                else {1: value}
            )
            out.append(
                Candidate(
                    params=v,
                    objective=value,
                    level_objectives=levels,
                    feasible=math.isfinite(value),
                )
            )
        return out


class CountingEvaluator:
    """Delegating evaluator that counts every vector evaluation."""

    def __init__(self, inner):
        self.inner = inner
        self.count = 0

    def __call__(self, vectors):
        self.count += len(vectors)
        return self.inner(vectors)
