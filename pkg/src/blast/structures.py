"""Atomic configurations, lattice builders, and neighbor lists."""

from dataclasses import dataclass, field

import numpy as np


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class Structure:
    """An atomic (or coarse-grained bead) configuration.

    positions are Cartesian in Angstrom; cell rows are the lattice vectors.
    """

    species: tuple
    positions: np.ndarray
    cell: np.ndarray | None = None
    periodic: tuple = (False, False, False)
    label: str = ""

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64).reshape(-1, 3)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "species", tuple(self.species))
        pos.setflags(write=False)
        if len(self.species) != len(pos):
            raise StructureError("species/positions length mismatch")
        if not np.all(np.isfinite(pos)):
            raise StructureError("non-finite position")
        if any(self.periodic):
            if self.cell is None:
                raise StructureError("periodic structure requires a cell")
            cell = np.asarray(self.cell, dtype=np.float64).reshape(3, 3)
            if np.linalg.det(cell) <= 0:
                raise StructureError("cell determinant must be positive")
            cell.setflags(write=False)
            object.__setattr__(self, "cell", cell)

    def __len__(self):
        return len(self.species)

    def with_label(self, label):
        return Structure(self.species, self.positions, self.cell, self.periodic, label)


@dataclass
class NeighborList:
    """Half pair list: each unordered pair-image appears exactly once."""

    pair_i: np.ndarray
    pair_j: np.ndarray
    offsets: np.ndarray  # integer periodic image of j, (m, 3)
    dvec: np.ndarray  # positions[j] + offsets @ cell - positions[i]
    dist: np.ndarray
    cutoff: float

    def __len__(self):
        return len(self.dist)

    @property
    def pairs(self):
        return list(zip(self.pair_i, self.pair_j, map(tuple, self.offsets), self.dist))


def _check_half_cell(structure, cutoff):
    if structure.cell is None or not any(structure.periodic):
        return
    cell = structure.cell
    # perpendicular widths of the cell along each periodic direction
    vol = abs(np.linalg.det(cell))
    for axis in range(3):
        if not structure.periodic[axis]:
            continue
        cross = np.cross(cell[(axis + 1) % 3], cell[(axis + 2) % 3])
        width = vol / np.linalg.norm(cross)
        if cutoff > 0.5 * width + 1e-12:
            raise StructureError(
                f"cutoff {cutoff:g} exceeds half the cell width {width:g} along axis "
                f"{axis}; build a supercell"
            )


def neighbor_list(structure, cutoff):
    """All pairs within cutoff, minimum-image for periodic directions.

    Raises StructureError when the cutoff violates the half-cell restriction.
    """
    if cutoff <= 0:
        raise StructureError("cutoff must be positive")
    _check_half_cell(structure, cutoff)
    pos = structure.positions
    n = len(pos)
    if n < 2:
        empty = np.zeros(0, dtype=np.int64)
        return NeighborList(
            empty, empty.copy(), np.zeros((0, 3), dtype=np.int64),
            np.zeros((0, 3)), np.zeros(0), cutoff,
        )
    ii, jj = np.triu_indices(n, k=1)
    d = pos[jj] - pos[ii]
    offsets = np.zeros((len(d), 3), dtype=np.int64)
    if structure.cell is not None and any(structure.periodic):
        cell = structure.cell
        frac = d @ np.linalg.inv(cell)
        shift = -np.round(frac)
        for axis in range(3):
            if not structure.periodic[axis]:
                shift[:, axis] = 0.0
        offsets = shift.astype(np.int64)
        d = d + shift @ cell
    r = np.linalg.norm(d, axis=1)
    keep = r <= cutoff
    return NeighborList(
        ii[keep].astype(np.int64), jj[keep].astype(np.int64),
        offsets[keep], d[keep], r[keep], cutoff,
    )


def full_adjacency(n, pair_i, pair_j, pair_d, pair_r):
    """CSR full (directed) adjacency built from a half pair list.

    Returns (ptr, j, dvec, dist) where entry u is a neighbor of the atom
    owning the CSR row, with dvec pointing from that atom to the neighbor.
    """
    src = np.concatenate([pair_i, pair_j])
    dst = np.concatenate([pair_j, pair_i])
    dvec = np.concatenate([pair_d, -pair_d])
    dist = np.concatenate([pair_r, pair_r])
    order = np.argsort(src, kind="stable")
    src, dst, dvec, dist = src[order], dst[order], dvec[order], dist[order]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, src + 1, 1)
    ptr = np.cumsum(ptr)
    return ptr, dst, dvec, dist


_BASES = {
    "sc": np.array([[0.0, 0.0, 0.0]]),
    "bcc": np.array([[0.0, 0.0, 0.0], [0.5, 0.5, 0.5]]),
    "fcc": np.array([
        [0.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5],
    ]),
}
_BASES["diamond"] = np.concatenate([_BASES["fcc"], _BASES["fcc"] + 0.25])

LATTICE_KINDS = tuple(_BASES)


def make_lattice(kind, a, species, repeat=(1, 1, 1)):
    """Conventional-cell crystal of one species, fully periodic."""
    if kind not in _BASES:
        raise StructureError(f"unknown lattice kind: {kind!r}")
    if a <= 0:
        raise StructureError("lattice constant must be positive")
    nx, ny, nz = repeat
    if min(nx, ny, nz) < 1:
        raise StructureError("repeat counts must be >= 1")
    basis = _BASES[kind]
    cells = np.array(
        [[i, j, k] for i in range(nx) for j in range(ny) for k in range(nz)],
        dtype=np.float64,
    )
    frac = (cells[:, None, :] + basis[None, :, :]).reshape(-1, 3)
    cell = np.diag([a * nx, a * ny, a * nz])
    pos = frac * a
    n = len(pos)
    return Structure(
        species=(species,) * n,
        positions=pos,
        cell=cell,
        periodic=(True, True, True),
        label=f"{kind}_{species}_{a:g}_{nx}x{ny}x{nz}",
    )


def dimer(species_a, species_b, r):
    """Two atoms on the x axis separated by r, non-periodic."""
    if r <= 0:
        raise StructureError("dimer separation must be positive")
    return Structure(
        species=(species_a, species_b),
        positions=np.array([[0.0, 0.0, 0.0], [r, 0.0, 0.0]]),
        label=f"dimer_{species_a}_{species_b}_{r:g}",
    )
