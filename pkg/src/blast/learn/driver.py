"""Search drivers: random baseline and the two-stage global+local pipeline."""

import math
from functools import cmp_to_key

import numpy as np

from ..objective import compare_single
from .ga import GaConfig, GaDriver, LearnResult, sample_uniform
from .simplex import NmConfig, nelder_mead


def random_search(space, evaluator, n, seed):
    """Uniform sampling within the default ranges; best by single objective."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    candidates = evaluator(sample_uniform(space, rng, n))
    best = min(candidates, key=cmp_to_key(compare_single))
    finite = [c.objective for c in candidates if math.isfinite(c.objective)]
    history = [
        {
            "iteration": 1,
            "best_objective": best.objective,
            "mean_objective": sum(finite) / len(finite) if finite else math.inf,
            "evaluations": n,
        }
    ]
    return LearnResult(best, history, n)


def distinct_top(population, comparator, k):
    """Best k candidates with pairwise-distinct parameter vectors."""
    out = []
    seen = set()
    for c in sorted(population, key=cmp_to_key(comparator)):
        key = c.params.tobytes()
        if key in seen:
            continue
        seen.add(key)
        out.append(c)
        if len(out) == k:
            break
    return out


class TwoStageDriver:
    """Global GA stage, then Nelder-Mead refinement of the top_k survivors.

    Checkpointable: the global stage persists the GA state; a run resumed
    during the local stage re-refines deterministically from the stored
    global result.
    """

    def __init__(self, space, evaluator, global_cfg, local_cfg=None, top_k=1, comparator=None):
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        self.space = space
        self.evaluator = evaluator
        self.local_cfg = local_cfg or NmConfig()
        self.top_k = top_k
        self.comparator = comparator or compare_single
        self.ga = GaDriver(space, evaluator, global_cfg, comparator)
        self.stage = "global"

    def state_dict(self):
        return {"stage": self.stage, "ga": self.ga.state_dict()}

    def load_state(self, state):
        self.stage = state["stage"]
        self.ga.load_state(state["ga"])
        return self

    def run(self, progress=None, should_stop=None):
        if self.stage == "global":
            self.ga.run(progress, should_stop)
            if not self.ga.done:
                return self.ga.result()  # cancelled mid-global
            self.stage = "local"
            if should_stop is not None and should_stop():
                return self.ga.result()
        return self._refine(progress, should_stop)

    def _refine(self, progress=None, should_stop=None):
        starts = distinct_top(self.ga.population, self.comparator, self.top_k)
        history = list(self.ga.history)
        total = self.ga.total_evaluations
        best = self.ga.best
        iteration = len(history)
        for c in starts:
            local = nelder_mead(
                self.space, self.evaluator, c.params, self.local_cfg,
                should_stop=should_stop,
            )
            for h in local.history:
                iteration += 1
                entry = {
                    "iteration": iteration,
                    "best_objective": min(best.objective, h["best_objective"]),
                    "mean_objective": h["mean_objective"],
                    "evaluations": total + h["evaluations"],
                }
                history.append(entry)
            total += local.total_evaluations
            if self.comparator(local.best, best) < 0:
                best = local.best
            if progress is not None and local.history:
                progress(history[-1])
            if should_stop is not None and should_stop():
                break
        self.stage = "done"
        return LearnResult(best, history, total)


def two_stage(space, evaluator, global_cfg, local_cfg=None, top_k=1,
              comparator=None, progress=None, should_stop=None):
    """Run the two-stage pipeline to completion."""
    driver = TwoStageDriver(space, evaluator, global_cfg, local_cfg, top_k, comparator)
    return driver.run(progress, should_stop)
