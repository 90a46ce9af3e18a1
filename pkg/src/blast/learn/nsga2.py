"""NSGA-II: fast non-dominated sorting + crowding-distance selection."""

import math

import numpy as np

from ..objective import dominates
from .ga import GaConfig, _blend, _mutate, sample_uniform


def _objective_vector(candidate):
    keys = sorted(candidate.level_objectives)
    return tuple(candidate.level_objectives[k] for k in keys)


def fast_nondominated_sort(vectors):
    """Indices grouped into fronts (front 0 = non-dominated)."""
    n = len(vectors)
    dominated_by = [[] for _ in range(n)]
    counts = [0] * n
    fronts = [[]]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if dominates(vectors[i], vectors[j]):
                dominated_by[i].append(j)
            elif dominates(vectors[j], vectors[i]):
                counts[i] += 1
        if counts[i] == 0:
            fronts[0].append(i)
    k = 0
    while fronts[k]:
        nxt = []
        for i in fronts[k]:
            for j in dominated_by[i]:
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(j)
        fronts.append(nxt)
        k += 1
    return fronts[:-1]


def crowding_distance(vectors):
    """Crowding distance per point of one front (boundaries get +inf)."""
    n = len(vectors)
    if n == 0:
        return []
    m = len(vectors[0])
    dist = [0.0] * n
    for k in range(m):
        order = sorted(range(n), key=lambda i: vectors[i][k])
        lo = vectors[order[0]][k]
        hi = vectors[order[-1]][k]
        dist[order[0]] = dist[order[-1]] = math.inf
        if hi <= lo:
            continue
        for pos in range(1, n - 1):
            dist[order[pos]] += (
                vectors[order[pos + 1]][k] - vectors[order[pos - 1]][k]
            ) / (hi - lo)
    return dist


def _rank_and_crowd(population):
    vectors = [_objective_vector(c) for c in population]
    fronts = fast_nondominated_sort(vectors)
    rank = [0] * len(population)
    crowd = [0.0] * len(population)
    for fi, front in enumerate(fronts):
        fvecs = [vectors[i] for i in front]
        for i, d in zip(front, crowding_distance(fvecs)):
            rank[i] = fi
            crowd[i] = d
    return rank, crowd, fronts


def nsga2(space, vector_evaluator, config, progress=None, should_stop=None):
    """Final non-dominated set after `generations` of NSGA-II.

    vector_evaluator must produce candidates with >= 2 objective
    components in level_objectives.
    """
    cfg = config if isinstance(config, GaConfig) else GaConfig(**config)
    rng = np.random.default_rng(cfg.seed)
    population = vector_evaluator(sample_uniform(space, rng, cfg.population))
    if len(population[0].level_objectives) < 2:
        raise ValueError("nsga2 needs >= 2 objective components; use run_ga")
    rank, crowd, fronts = _rank_and_crowd(population)

    for gen in range(cfg.generations - 1):
        children = []
        while len(children) < cfg.population:
            pa = _nsga_tournament(population, rank, crowd, cfg, rng)
            pb = _nsga_tournament(population, rank, crowd, cfg, rng)
            child = _blend(pa.params, pb.params, cfg.crossover_alpha, rng)
            children.append(_mutate(child, space, cfg, rng))
        combined = population + vector_evaluator(children)
        rank_c, crowd_c, fronts_c = _rank_and_crowd(combined)
        survivors = []
        for front in fronts_c:
            if len(survivors) + len(front) <= cfg.population:
                survivors.extend(front)
            else:
                rest = sorted(front, key=lambda i: -crowd_c[i])
                survivors.extend(rest[: cfg.population - len(survivors)])
                break
        population = [combined[i] for i in survivors]
        rank, crowd, fronts = _rank_and_crowd(population)
        if progress is not None:
            progress(gen + 1, population)
        if should_stop is not None and should_stop():
            break

    return [population[i] for i in fronts[0]]


def _nsga_tournament(population, rank, crowd, cfg, rng):
    idx = rng.integers(0, len(population), size=cfg.tournament_size)
    best = idx[0]
    for i in idx[1:]:
        if (rank[i], -crowd[i]) < (rank[best], -crowd[best]):
            best = i
    return population[best]
