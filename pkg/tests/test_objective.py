"""Objective arithmetic, comparison relations, and dominance."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blast.objective import (
    EQUAL,
    GREATER,
    LESS,
    Candidate,
    compare_hierarchical,
    compare_single,
    dominates,
    hierarchical_comparator,
    level_objectives,
    make_candidate,
    residual,
    single_objective,
)
from blast.properties import PropertyKind
from blast.trainset import TargetProperty


def target(tid, value, weight=1.0, rank=1, scale=None):
    return TargetProperty(
        id=tid, kind=PropertyKind("dimer_energy", r=1.0), target=value,
        weight=weight, rank=rank, scale=scale,
    )


def test_residual_normalization():
    t = target("a", 2.0)  # scale defaults to |target| = 2
    assert residual(2.1, t) == pytest.approx(0.05)
    t2 = target("b", -1.0, scale=0.5)
    assert residual(-1.25, t2) == pytest.approx(-0.5)


def test_single_objective_arithmetic():
    ts = [target("a", 2.0, weight=1.0), target("b", -1.0, weight=3.0, scale=0.5)]
    preds = {"a": 2.1, "b": -1.25}
    # 1*(0.05)^2 + 3*(-0.5)^2 = 0.0025 + 0.75
    assert single_objective(preds, ts) == pytest.approx(0.7525)


def test_single_objective_infeasible_on_failure():
    ts = [target("a", 2.0)]
    assert single_objective({"a": None}, ts) == math.inf
    assert single_objective({}, ts) == math.inf
    assert single_objective({"a": math.nan}, ts) == math.inf


def test_level_objectives_by_rank():
    ts = [
        target("a", 2.0, rank=1),
        target("b", -1.0, rank=2, scale=0.5),
        target("c", 4.0, rank=2, weight=2.0),
    ]
    levels = level_objectives({"a": 2.1, "b": -1.25, "c": 4.4}, ts)
    assert levels[1] == pytest.approx(0.0025)
    assert levels[2] == pytest.approx(0.25 + 2.0 * 0.01)
    # one failure poisons every level
    levels = level_objectives({"a": 2.1, "b": None, "c": 4.4}, ts)
    assert levels == {1: math.inf, 2: math.inf}


def test_make_candidate():
    ts = [target("a", 2.0)]
    c = make_candidate(np.array([1.0]), {"a": 2.1}, ts)
    assert c.feasible and c.objective == pytest.approx(0.0025)
    bad = make_candidate(np.array([1.0]), {"a": None}, ts, errors={"a": "boom"})
    assert not bad.feasible and bad.objective == math.inf
    assert bad.errors == {"a": "boom"}


def test_candidate_round_trip():
    c = Candidate(
        params=np.array([1.5, 2.5]), predictions={"a": 1.0}, objective=0.25,
        level_objectives={1: 0.25}, feasible=True,
    )
    back = Candidate.from_dict(c.to_dict())
    assert np.array_equal(back.params, c.params)
    assert back.objective == c.objective and back.level_objectives == {1: 0.25}
    infeasible = Candidate(params=np.array([1.0]))
    back = Candidate.from_dict(infeasible.to_dict())
    assert back.objective == math.inf and not back.feasible


def cand(levels, feasible=True):
    return Candidate(
        params=np.zeros(1), objective=sum(levels.values()),
        level_objectives=dict(levels), feasible=feasible,
    )


def test_compare_single():
    a = cand({1: 0.1})
    b = cand({1: 0.2})
    assert compare_single(a, b) == LESS
    assert compare_single(b, a) == GREATER
    assert compare_single(a, cand({1: 0.1})) == EQUAL
    bad = cand({1: math.inf}, feasible=False)
    assert compare_single(bad, b) == GREATER
    assert compare_single(bad, cand({1: math.inf}, feasible=False)) == EQUAL


def test_compare_hierarchical_quantization():
    tols = {1: 0.1, 2: 0.1}
    # same quantized bucket at rank 1 (0.01 and 0.09 both floor to 0),
    # so rank 2 decides
    a = cand({1: 0.01, 2: 0.50})
    b = cand({1: 0.09, 2: 0.18})
    assert compare_hierarchical(a, b, tols) == GREATER
    # clearly different at rank 1: rank 1 decides regardless of rank 2
    c = cand({1: 0.25, 2: 0.0})
    assert compare_hierarchical(a, c, tols) == LESS
    # infeasible loses to feasible
    bad = cand({1: math.inf, 2: math.inf}, feasible=False)
    assert compare_hierarchical(bad, a, tols) == GREATER
    assert compare_hierarchical(bad, cand({1: 1.0}, feasible=False), tols) == EQUAL


def test_compare_hierarchical_validation():
    with pytest.raises(ValueError):
        compare_hierarchical(cand({1: 0.1}), cand({2: 0.1}), {1: 0.1, 2: 0.1})
    with pytest.raises(ValueError):
        compare_hierarchical(cand({1: 0.1}), cand({1: 0.2}), {})
    with pytest.raises(ValueError):
        compare_hierarchical(cand({1: 0.1}), cand({1: 0.2}), {1: 0.0})


@settings(max_examples=200, deadline=None)
@given(
    data=st.lists(
        st.tuples(st.floats(0, 10), st.floats(0, 10)), min_size=3, max_size=3
    ),
)
def test_compare_hierarchical_transitive(data):
    tols = {1: 0.25, 2: 0.25}
    a, b, c = [cand({1: x, 2: y}) for x, y in data]
    cmp_ = hierarchical_comparator(tols)
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        if cmp_(x, y) <= 0 and cmp_(y, z) <= 0:
            assert cmp_(x, z) <= 0
        if cmp_(x, y) == 0 and cmp_(y, z) == 0:
            assert cmp_(x, z) == 0


def test_dominates():
    assert dominates((1.0, 2.0), (1.5, 2.0))
    assert not dominates((1.0, 2.0), (1.0, 2.0))
    assert not dominates((1.0, 3.0), (1.5, 2.0))
    assert dominates({1: 0.0, 2: 0.0}, {1: 0.0, 2: 1.0})
    with pytest.raises(ValueError):
        dominates((1.0,), (1.0, 2.0))
    with pytest.raises(ValueError):
        dominates({1: 0.0}, {2: 0.0})
