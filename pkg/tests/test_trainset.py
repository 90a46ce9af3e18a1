"""Training data: file round-trips, splits, and cross-validation."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blast.properties import PropertyKind
from blast.structures import Structure, dimer, make_lattice
from blast.trainset import (
    Dataset,
    TargetProperty,
    TrainsetError,
    cross_validate,
    load_structures,
    load_targets,
    save_structures,
    save_targets,
    split,
)


def dimer_target(tid, r, value, **kw):
    return TargetProperty(
        id=tid, kind=PropertyKind("dimer_energy", r=r, species=("X", "X")),
        target=value, **kw,
    )


def test_target_defaults():
    t = dimer_target("t", 1.0, -2.0)
    assert t.scale == 2.0
    assert t.tolerance == pytest.approx(0.02)
    assert t.weight == 1.0 and t.rank == 1
    tiny = dimer_target("z", 1.0, 0.0)
    assert tiny.scale == 1e-8  # zero targets still get a positive scale


def test_target_validation():
    with pytest.raises(TrainsetError):
        dimer_target("t", 1.0, 1.0, weight=-1.0)
    with pytest.raises(TrainsetError):
        dimer_target("t", 1.0, 1.0, rank=0)
    with pytest.raises(TrainsetError):
        dimer_target("t", 1.0, 1.0, tolerance=0.0)
    with pytest.raises(TrainsetError):
        TargetProperty.from_dict({"id": "a", "target": 1.0})  # kind missing
    with pytest.raises(TrainsetError):
        TargetProperty.from_dict(
            {"id": "a", "kind": {"property": "dimer_energy", "r": 1.0},
             "target": 1.0, "bogus": 2}
        )


def test_target_round_trip():
    t = dimer_target("t1", 1.3, -0.5, weight=2.0, rank=2, tolerance=0.03)
    assert TargetProperty.from_dict(t.to_dict()) == t


def test_structure_file_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    frames = [
        dimer("A", "B", 1.25),
        make_lattice("fcc", 3.61, "Cu", (2, 2, 2)),
        Structure(("C",) * 3, rng.uniform(0, 5, (3, 3)), label="amorphous_3"),
    ]
    path = tmp_path / "frames.xyz"
    save_structures(path, frames)
    loaded = load_structures(path)
    assert len(loaded) == 3
    for orig, back in zip(frames, loaded):
        assert back.species == orig.species
        assert np.array_equal(back.positions, orig.positions)  # exact round-trip
        assert back.label == orig.label
        if orig.cell is None:
            assert back.cell is None
        else:
            assert np.array_equal(back.cell, orig.cell)


def test_load_structures_errors(tmp_path):
    p = tmp_path / "bad.xyz"
    p.write_text("not-a-count\ncomment\n")
    with pytest.raises(TrainsetError, match="atom count"):
        load_structures(p)
    p.write_text("3\ncomment\nX 0 0 0\nX 1 0 0\n")
    with pytest.raises(TrainsetError, match="atom lines"):
        load_structures(p)
    p.write_text("1\ncomment\nX 0 zero 0\n")
    with pytest.raises(TrainsetError, match="coordinate"):
        load_structures(p)


def test_targets_file_round_trip(tmp_path):
    targets = [dimer_target("a", 1.0, -1.0), dimer_target("b", 1.5, -0.3, rank=2)]
    path = tmp_path / "targets.json"
    save_targets(path, targets)
    assert load_targets(path) == targets


def test_duplicate_target_ids(tmp_path):
    path = tmp_path / "targets.json"
    t = dimer_target("same", 1.0, -1.0).to_dict()
    path.write_text(json.dumps({"targets": [t, t]}))
    with pytest.raises(TrainsetError, match="duplicate"):
        load_targets(path)


def test_dataset_validate_unresolved_label():
    t = TargetProperty(
        id="e", kind=PropertyKind("energy_per_atom", structure_label="missing"),
        target=1.0,
    )
    with pytest.raises(TrainsetError, match="missing"):
        Dataset({}, [t]).validate()


def test_split_sizes_example():
    targets = [dimer_target(f"t{i}", 1.0 + 0.1 * i, -1.0) for i in range(10)]
    ds = Dataset({}, targets)
    train, hold = split(ds, 0.2, seed=7)
    assert len(train.targets) == 8 and len(hold.targets) == 2


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(2, 30),
    frac=st.floats(0.05, 0.95),
    seed=st.integers(0, 1000),
)
def test_split_partition_laws(n, frac, seed):
    targets = [dimer_target(f"t{i}", 1.0 + 0.01 * i, -1.0) for i in range(n)]
    ds = Dataset({}, targets, provenance="p")
    train, hold = split(ds, frac, seed)
    # partition: disjoint, exhaustive, minimum one holdout target
    ids = lambda d: {t.id for t in d.targets}
    assert ids(train) | ids(hold) == ids(ds)
    assert ids(train) & ids(hold) == set()
    assert len(hold.targets) == max(1, round(frac * n))
    # deterministic in the seed
    t2, h2 = split(ds, frac, seed)
    assert ids(t2) == ids(train) and ids(h2) == ids(hold)
    # structures shared, not copied
    assert train.structures is ds.structures


def test_split_rejects_bad_inputs():
    ds = Dataset({}, [dimer_target("a", 1.0, -1.0)])
    with pytest.raises(TrainsetError):
        split(ds, 0.5, 0)  # too few targets
    ds2 = Dataset({}, [dimer_target("a", 1.0, -1.0), dimer_target("b", 1.2, -1.0)])
    with pytest.raises(TrainsetError):
        split(ds2, 0.0, 0)


def test_cross_validate_perfect_prediction(lj_space):
    from blast import potentials

    vec = np.array([0.8, 1.1, 6.6])
    truth = potentials.energy(lj_space, vec, dimer("X", "X", 1.3))
    ds = Dataset({}, [dimer_target("d", 1.3, truth)])
    report = cross_validate(lj_space, vec, ds)
    assert report.all_passed
    assert report.rows[0].error == pytest.approx(0.0, abs=1e-12)
    assert report.rms_normalized_residual == pytest.approx(0.0, abs=1e-12)


def test_cross_validate_failure_and_tolerance(lj_space):
    vec = np.array([0.8, 1.1, 6.6])
    ds = Dataset(
        {},
        [
            dimer_target("off", 1.3, -10.0),  # far from any LJ dimer energy
            TargetProperty(
                id="broken",
                kind=PropertyKind(
                    "lattice_constant", lattice="fcc", species=("X",), bracket=(5.0, 6.0)
                ),
                target=1.0,
            ),  # bracket holds no minimum -> prediction failure
        ],
    )
    report = cross_validate(lj_space, vec, ds)
    assert not report.all_passed
    by_id = {r.target_id: r for r in report.rows}
    assert not by_id["off"].passed and by_id["off"].predicted is not None
    assert by_id["broken"].predicted is None and by_id["broken"].message
