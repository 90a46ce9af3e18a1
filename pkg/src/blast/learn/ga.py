"""Real-coded genetic algorithm with a pluggable comparator.

The comparator parameterization makes the hierarchical variant (HOGA) the
same driver with compare_hierarchical plugged in. Operators: tournament
selection, blend crossover, per-gene Gaussian mutation, clipping to
bounds, optional elitism.
"""

import math
from dataclasses import dataclass, field
from functools import cmp_to_key

import numpy as np

from ..objective import Candidate, compare_single


@dataclass
class GaConfig:
    population: int = 32
    generations: int = 50
    tournament_size: int = 2
    crossover_alpha: float = 0.5
    mutation_rate: float | None = None  # default 1/dimension at runtime
    mutation_sigma_fraction: float = 0.1
    elitism: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.population < 4 or self.population % 2:
            raise ValueError("population must be even and >= 4")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.tournament_size < 2:
            raise ValueError("tournament_size must be >= 2")
        if self.mutation_rate is not None and not (0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("mutation_rate must be in [0, 1]")
        if self.mutation_sigma_fraction <= 0:
            raise ValueError("mutation_sigma_fraction must be positive")
        if not (0 <= self.elitism < self.population):
            raise ValueError("elitism must satisfy 0 <= elitism < population")


@dataclass
class LearnResult:
    best: Candidate
    history: list = field(default_factory=list)
    total_evaluations: int = 0

    def to_dict(self):
        return {
            "best": self.best.to_dict(),
            "history": self.history,
            "total_evaluations": self.total_evaluations,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            best=Candidate.from_dict(d["best"]),
            history=list(d["history"]),
            total_evaluations=int(d["total_evaluations"]),
        )


def sample_uniform(space, rng, n):
    """n vectors uniform within the default ranges."""
    lo = space.default_lows()
    hi = space.default_highs()
    return [lo + rng.uniform(0.0, 1.0, size=len(lo)) * (hi - lo) for _ in range(n)]


def _tournament(population, comparator, cfg, rng):
    idx = rng.integers(0, len(population), size=cfg.tournament_size)
    best = idx[0]
    for i in idx[1:]:
        if comparator(population[i], population[best]) < 0:
            best = i
    return population[best]


def _blend(pa, pb, alpha, rng):
    lo = np.minimum(pa, pb)
    hi = np.maximum(pa, pb)
    d = hi - lo
    return rng.uniform(lo - alpha * d, hi + alpha * d)


def _mutate(child, space, cfg, rng):
    lo = space.lower_bounds()
    hi = space.upper_bounds()
    rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / len(child)
    hit = rng.uniform(0.0, 1.0, size=len(child)) < rate
    noise = rng.normal(0.0, 1.0, size=len(child)) * cfg.mutation_sigma_fraction * (hi - lo)
    return np.clip(np.where(hit, child + noise, child), lo, hi)


def ga_step(space, population, comparator, cfg, rng):
    """One generation: returns the next population's parameter vectors."""
    ranked = sorted(population, key=cmp_to_key(comparator))
    vectors = [ranked[i].params.copy() for i in range(cfg.elitism)]
    while len(vectors) < cfg.population:
        pa = _tournament(population, comparator, cfg, rng).params
        pb = _tournament(population, comparator, cfg, rng).params
        child = _blend(pa, pb, cfg.crossover_alpha, rng)
        vectors.append(_mutate(child, space, cfg, rng))
    return vectors


def _mean_objective(population):
    finite = [c.objective for c in population if math.isfinite(c.objective)]
    return sum(finite) / len(finite) if finite else math.inf


class GaDriver:
    """Resumable GA run; state_dict/load_state support exact checkpointing."""

    def __init__(self, space, evaluator, config, comparator=None):
        self.space = space
        self.evaluator = evaluator
        self.cfg = config
        self.comparator = comparator or compare_single
        self.rng = np.random.default_rng(config.seed)
        self.population = None
        self.generation = 0
        self.history = []
        self.total_evaluations = 0
        self.best = None

    def _evaluate(self, vectors):
        candidates = self.evaluator(vectors)
        self.total_evaluations += len(vectors)
        return candidates

    def _record(self, population):
        ranked = sorted(population, key=cmp_to_key(self.comparator))
        if self.best is None or self.comparator(ranked[0], self.best) < 0:
            self.best = ranked[0]
        self.history.append(
            {
                "iteration": self.generation,
                "best_objective": self.best.objective,
                "mean_objective": _mean_objective(population),
                "evaluations": self.total_evaluations,
            }
        )

    def step(self):
        """Advance one generation (the first call evaluates the initial
        population)."""
        if self.population is None:
            vectors = sample_uniform(self.space, self.rng, self.cfg.population)
        else:
            vectors = ga_step(self.space, self.population, self.comparator, self.cfg, self.rng)
        self.population = self._evaluate(vectors)
        self.generation += 1
        self._record(self.population)

    @property
    def done(self):
        return self.generation >= self.cfg.generations

    def run(self, progress=None, should_stop=None):
        while not self.done:
            self.step()
            if progress is not None:
                progress(self.history[-1])
            if should_stop is not None and should_stop():
                break
        return self.result()

    def result(self):
        return LearnResult(self.best, list(self.history), self.total_evaluations)

    def state_dict(self):
        return {
            "generation": self.generation,
            "population": [c.to_dict() for c in (self.population or [])],
            "rng_state": self.rng.bit_generator.state,
            "history": list(self.history),
            "total_evaluations": self.total_evaluations,
            "best": None if self.best is None else self.best.to_dict(),
        }

    def load_state(self, state):
        self.generation = int(state["generation"])
        self.population = [Candidate.from_dict(c) for c in state["population"]] or None
        self.rng.bit_generator.state = state["rng_state"]
        self.history = list(state["history"])
        self.total_evaluations = int(state["total_evaluations"])
        self.best = None if state["best"] is None else Candidate.from_dict(state["best"])
        return self


def run_ga(space, evaluator, config, comparator=None, progress=None, should_stop=None):
    """Run a (comparator-parameterized) GA to completion."""
    return GaDriver(space, evaluator, config, comparator).run(progress, should_stop)
