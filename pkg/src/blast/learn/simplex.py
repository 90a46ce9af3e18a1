"""Bounded Nelder-Mead simplex refinement.

Standard coefficients (reflect 1, expand 2, contract 0.5, shrink 0.5);
every trial point is projected onto the parameter bounds, so all iterates
stay feasible.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..objective import compare_single
from .ga import LearnResult


@dataclass
class NmConfig:
    max_iter: int = 500
    f_tol: float = 1e-10
    x_tol: float = 1e-10
    initial_step_fraction: float = 0.05  # of each bound width


def nelder_mead(space, evaluator, x0, config=None, progress=None, should_stop=None):
    """Minimize the single objective from x0 within the parameter bounds."""
    cfg = config or NmConfig()
    lo = space.lower_bounds()
    hi = space.upper_bounds()
    x0 = np.clip(np.asarray(x0, dtype=np.float64), lo, hi)
    n = len(x0)

    evals = 0
    history = []

    def f(points):
        nonlocal evals
        evals += len(points)
        return evaluator([np.clip(p, lo, hi) for p in points])

    def value(c):
        return c.objective if c.feasible or math.isfinite(c.objective) else math.inf

    # initial simplex: 5% of bound width along each axis, flipped when the
    # step would leave the upper bound
    points = [x0]
    for k in range(n):
        step = cfg.initial_step_fraction * (hi[k] - lo[k])
        p = x0.copy()
        p[k] = p[k] + step if p[k] + step <= hi[k] else p[k] - step
        points.append(p)
    simplex = f(points)

    best = min(simplex, key=value)
    for it in range(cfg.max_iter):
        simplex.sort(key=value)
        fvals = [value(c) for c in simplex]
        spread = fvals[-1] - fvals[0]
        size = max(
            float(np.max(np.abs(c.params - simplex[0].params))) for c in simplex[1:]
        )
        if best is None or value(simplex[0]) < value(best):
            best = simplex[0]
        history.append(
            {
                "iteration": it + 1,
                "best_objective": value(best),
                "mean_objective": float(np.mean([v for v in fvals if math.isfinite(v)] or [math.inf])),
                "evaluations": evals,
            }
        )
        if progress is not None:
            progress(it + 1, best, evals)
        if spread < cfg.f_tol or size < cfg.x_tol:
            break
        if should_stop is not None and should_stop():
            break

        centroid = np.mean([c.params for c in simplex[:-1]], axis=0)
        worst = simplex[-1]
        refl = np.clip(centroid + 1.0 * (centroid - worst.params), lo, hi)
        c_refl = f([refl])[0]
        if value(c_refl) < fvals[0]:
            expa = np.clip(centroid + 2.0 * (centroid - worst.params), lo, hi)
            c_expa = f([expa])[0]
            simplex[-1] = c_expa if value(c_expa) < value(c_refl) else c_refl
        elif value(c_refl) < fvals[-2]:
            simplex[-1] = c_refl
        else:
            inside = value(c_refl) >= fvals[-1]
            base = worst.params if inside else c_refl.params
            contr = np.clip(centroid + 0.5 * (base - centroid), lo, hi)
            c_contr = f([contr])[0]
            if value(c_contr) < min(fvals[-1], value(c_refl)):
                simplex[-1] = c_contr
            else:
                # shrink toward the best vertex
                shrunk = [
                    np.clip(simplex[0].params + 0.5 * (c.params - simplex[0].params), lo, hi)
                    for c in simplex[1:]
                ]
                simplex[1:] = f(shrunk)

    simplex.sort(key=value)
    if value(simplex[0]) < value(best):
        best = simplex[0]
    return LearnResult(best, history, evals)
