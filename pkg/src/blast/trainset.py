"""Training data: structure files, target lists, splits, cross-validation.

Structures use a minimal extended-XYZ grammar: atom count, a comment line
of key=value tokens (recognized keys: Lattice, Properties), then one
``species x y z`` line per atom. Targets live in JSON documents.
"""

import json
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .objective import residual
from .properties import PropertyError, PropertyKind, compute_property
from .structures import Structure


class TrainsetError(ValueError):
    pass


@dataclass(frozen=True)
class TargetProperty:
    """One training objective term."""

    id: str
    kind: PropertyKind
    target: float
    unit: str = ""
    weight: float = 1.0
    rank: int = 1
    tolerance: float | None = None
    scale: float | None = None

    def __post_init__(self):
        if self.weight < 0:
            raise TrainsetError(f"target {self.id}: weight must be >= 0")
        if self.rank < 1:
            raise TrainsetError(f"target {self.id}: rank must be >= 1")
        if self.scale is None:
            object.__setattr__(self, "scale", max(abs(self.target), 1e-8))
        if self.scale <= 0:
            raise TrainsetError(f"target {self.id}: scale must be positive")
        if self.tolerance is None:
            object.__setattr__(self, "tolerance", 0.01 * self.scale)
        if self.tolerance <= 0:
            raise TrainsetError(f"target {self.id}: tolerance must be positive")

    def to_dict(self):
        return {
            "id": self.id,
            "kind": self.kind.to_dict(),
            "target": self.target,
            "unit": self.unit,
            "weight": self.weight,
            "rank": self.rank,
            "tolerance": self.tolerance,
            "scale": self.scale,
        }

    @classmethod
    def from_dict(cls, d):
        known = {"id", "kind", "target", "unit", "weight", "rank", "tolerance", "scale"}
        unknown = set(d) - known
        if unknown:
            raise TrainsetError(f"unknown target fields: {sorted(unknown)}")
        if "id" not in d or "kind" not in d or "target" not in d:
            raise TrainsetError("target entries require id, kind, and target")
        return cls(
            id=str(d["id"]),
            kind=PropertyKind.from_dict(d["kind"]),
            target=float(d["target"]),
            unit=str(d.get("unit", "")),
            weight=float(d.get("weight", 1.0)),
            rank=int(d.get("rank", 1)),
            tolerance=d.get("tolerance"),
            scale=d.get("scale"),
        )


@dataclass
class Dataset:
    structures: dict = field(default_factory=dict)  # label -> Structure
    targets: list = field(default_factory=list)
    provenance: str = ""

    def validate(self):
        """Check that every structure label referenced by a target resolves."""
        for t in self.targets:
            for attr in ("structure_label", "label_a", "label_b"):
                label = getattr(t.kind, attr)
                if label is not None and label not in self.structures:
                    raise TrainsetError(
                        f"target {t.id}: unknown structure label {label!r}"
                    )
        return self


_LATTICE_RE = re.compile(r'Lattice="([^"]+)"')
_KEY_RE = re.compile(r'(\w+)=(?:"([^"]*)"|(\S+))')


def _parse_frame(lines, start, frame_no, path):
    where = f"{path} frame {frame_no} (line {start + 1})"
    try:
        natoms = int(lines[start].split()[0])
    except (ValueError, IndexError):
        raise TrainsetError(f"{where}: malformed atom count line") from None
    if start + 2 + natoms > len(lines) + 0:
        raise TrainsetError(f"{where}: expected {natoms} atom lines")
    comment = lines[start + 1] if start + 1 < len(lines) else ""
    keys = {m.group(1): m.group(2) or m.group(3) for m in _KEY_RE.finditer(comment)}
    cell = None
    periodic = (False, False, False)
    if "Lattice" in keys:
        vals = [float(x) for x in keys["Lattice"].split()]
        if len(vals) != 9:
            raise TrainsetError(f"{where}: Lattice needs 9 numbers")
        cell = np.array(vals).reshape(3, 3)
        periodic = (True, True, True)
    species = []
    pos = []
    for k in range(natoms):
        idx = start + 2 + k
        if idx >= len(lines) or not lines[idx].strip():
            raise TrainsetError(f"{where}: expected {natoms} atom lines")
        cols = lines[idx].split()
        if len(cols) < 4:
            raise TrainsetError(f"{where}: atom line {k + 1} needs species + 3 coords")
        species.append(cols[0])
        try:
            xyz = [float(c) for c in cols[1:4]]
        except ValueError:
            raise TrainsetError(f"{where}: non-numeric coordinate on atom line {k + 1}") from None
        if not all(math.isfinite(c) for c in xyz):
            raise TrainsetError(f"{where}: non-finite coordinate on atom line {k + 1}")
        pos.append(xyz)
    label = keys.get("Label", f"frame_{frame_no}")
    s = Structure(tuple(species), np.array(pos), cell, periodic, label)
    return s, start + 2 + natoms


def load_structures(path):
    """Parse every frame of an extended-XYZ file."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    frames = []
    i = 0
    n = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        s, i = _parse_frame(lines, i, n, str(path))
        frames.append(s)
        n += 1
    return frames


def save_structures(path, structures):
    """Write structures in the same extended-XYZ grammar load_structures reads."""
    with open(path, "w", encoding="utf-8") as fh:
        for s in structures:
            fh.write(f"{len(s)}\n")
            keys = ['Properties=species:S:1:pos:R:3']
            if s.cell is not None and any(s.periodic):
                flat = " ".join(repr(float(x)) for x in s.cell.ravel())
                keys.insert(0, f'Lattice="{flat}"')
            if s.label:
                keys.append(f'Label={s.label}')
            fh.write(" ".join(keys) + "\n")
            for sp, (x, y, z) in zip(s.species, s.positions):
                fh.write(f"{sp} {float(x)!r} {float(y)!r} {float(z)!r}\n")


def load_targets(path):
    """Parse a JSON targets document: {"targets": [...]}."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    entries = doc["targets"] if isinstance(doc, dict) else doc
    targets = [TargetProperty.from_dict(e) for e in entries]
    seen = set()
    for t in targets:
        if t.id in seen:
            raise TrainsetError(f"duplicate target id: {t.id!r}")
        seen.add(t.id)
    return targets


def save_targets(path, targets):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"targets": [t.to_dict() for t in targets]}, fh, indent=2)


def split(dataset, holdout_fraction, seed):
    """Seeded partition of the targets; structures are shared by both sides."""
    if not (0.0 < holdout_fraction < 1.0):
        raise TrainsetError("holdout fraction must be in (0, 1)")
    n = len(dataset.targets)
    if n < 2:
        raise TrainsetError("need at least 2 targets to split")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_hold = max(1, round(holdout_fraction * n))
    hold_idx = set(order[:n_hold].tolist())
    train = [t for i, t in enumerate(dataset.targets) if i not in hold_idx]
    hold = [t for i, t in enumerate(dataset.targets) if i in hold_idx]
    mk = lambda ts: Dataset(dataset.structures, ts, dataset.provenance)
    return mk(train), mk(hold)


@dataclass
class ValidationRow:
    target_id: str
    predicted: float | None
    target: float
    error: float | None
    normalized_residual: float | None
    passed: bool
    message: str = ""


@dataclass
class ValidationReport:
    rows: list
    rms_normalized_residual: float | None

    @property
    def all_passed(self):
        return all(r.passed for r in self.rows)

    def to_dict(self):
        return {
            "rows": [vars(r) for r in self.rows],
            "rms_normalized_residual": self.rms_normalized_residual,
            "all_passed": self.all_passed,
        }


def cross_validate(space, vector, holdout, external_evaluators=None):
    """Predict every holdout target and compare against its tolerance."""
    rows = []
    sq = []
    cache = {}
    for t in holdout.targets:
        try:
            pred = compute_property(
                t.kind, space, vector, holdout,
                external_evaluators=external_evaluators, cache=cache,
            )
        except (PropertyError, ValueError, ArithmeticError) as exc:
            rows.append(ValidationRow(t.id, None, t.target, None, None, False, str(exc)))
            continue
        err = pred - t.target
        nres = residual(pred, t)
        sq.append(nres * nres)
        rows.append(ValidationRow(t.id, pred, t.target, err, nres, abs(err) <= t.tolerance))
    rms = math.sqrt(sum(sq) / len(sq)) if sq else None
    return ValidationReport(rows, rms)
