"""Material-property calculators: lattice relaxation, bulk modulus, dimers.

These turn (model, parameters) into the predicted values that the objective
compares against training targets.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels, potentials
from .potentials import ModelError, frozenset_pair, pair_parameter_groups
from .structures import LATTICE_KINDS, _BASES, dimer, make_lattice

GOLDEN_TOL = 1e-6
DEFAULT_LATTICE_BRACKET = (1.0, 6.0)
DEFAULT_DIMER_BRACKET = (0.5, 6.0)

PROPERTY_KINDS = (
    "energy_per_atom",
    "energy_difference",
    "lattice_constant",
    "cohesive_energy",
    "bulk_modulus",
    "dimer_energy",
    "dimer_distance",
    "external",
)


class PropertyError(ValueError):
    pass


@dataclass(frozen=True)
class PropertyKind:
    """One kind of trainable property plus its arguments.

    Which arguments apply depends on ``kind``; see PROPERTY_KINDS.
    """

    kind: str
    structure_label: str | None = None
    label_a: str | None = None
    label_b: str | None = None
    lattice: str | None = None
    species: tuple | None = None
    r: float | None = None
    bracket: tuple | None = None
    evaluator_id: str | None = None

    def __post_init__(self):
        if self.kind not in PROPERTY_KINDS:
            raise PropertyError(f"unknown property kind: {self.kind!r}")
        if self.species is not None:
            object.__setattr__(self, "species", tuple(self.species))
        if self.bracket is not None:
            object.__setattr__(self, "bracket", tuple(float(x) for x in self.bracket))
        need = {
            "energy_per_atom": ("structure_label",),
            "energy_difference": ("label_a", "label_b"),
            "lattice_constant": ("lattice", "species"),
            "cohesive_energy": ("lattice", "species"),
            "bulk_modulus": ("lattice", "species"),
            "dimer_energy": ("r",),
            "dimer_distance": (),
            "external": ("evaluator_id",),
        }[self.kind]
        for f_ in need:
            if getattr(self, f_) is None:
                raise PropertyError(f"property {self.kind} requires {f_}")
        if self.lattice is not None and self.lattice not in LATTICE_KINDS:
            raise PropertyError(f"unknown lattice kind: {self.lattice!r}")

    def to_dict(self):
        out = {"property": self.kind}
        for name in (
            "structure_label", "label_a", "label_b", "lattice", "species",
            "r", "bracket", "evaluator_id",
        ):
            v = getattr(self, name)
            if v is not None:
                out[name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("property", None) or d.pop("kind", None)
        if kind is None:
            raise PropertyError("property kind entry missing 'property'")
        known = {
            "structure_label", "label_a", "label_b", "lattice", "species",
            "r", "bracket", "evaluator_id",
        }
        unknown = set(d) - known
        if unknown:
            raise PropertyError(f"unknown property arguments: {sorted(unknown)}")
        if "species" in d and isinstance(d["species"], str):
            d["species"] = (d["species"],)
        return cls(kind, **d)


def golden_minimize(f, lo, hi, tol=GOLDEN_TOL):
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    if not (lo < hi):
        raise PropertyError("bracket must satisfy lo < hi")
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = c if fc < fd else d
    fx = min(fc, fd)
    return x, fx


@lru_cache(maxsize=64)
def _unit_shells(kind, m):
    """Coordination shells of a unit-lattice-constant crystal out to m cells.

    Every basis coordinate is a multiple of 1/4, so 16*r^2 is an exact
    integer and grouping pair distances into shells is lossless. Returns
    (distances, multiplicities) summed over all basis atoms.
    """
    basis = _BASES[kind]
    rng = np.arange(-m, m + 1)
    cells = np.array(np.meshgrid(rng, rng, rng)).T.reshape(-1, 3).astype(np.float64)
    # displacement from each basis atom to every basis atom in every image
    disp = (cells[:, None, :] + basis[None, :, :])[None, :, :, :] - basis[:, None, None, :]
    disp = disp.reshape(-1, 3)
    r2 = np.einsum("ij,ij->i", disp, disp)
    key = np.rint(16.0 * r2).astype(np.int64)
    uniq, counts = np.unique(key[key > 0], return_counts=True)
    return np.sqrt(uniq / 16.0), counts.astype(np.float64)


def _lattice_pair_energy_per_atom(space, vector, kind, species, a):
    """Energy/atom of an infinite crystal by direct periodic-image summation.

    Exact for the pair models: every pair within the cutoff is enumerated
    (shell-grouped), so there is no half-cell restriction.
    """
    rc = potentials.max_cutoff(space, vector)
    nb = len(_BASES[kind])
    r_unit, weight = _unit_shells(kind, int(math.ceil(rc / a)) + 1)
    r = r_unit * a
    keep = r <= rc
    r, weight = r[keep], weight[keep]
    groups = pair_parameter_groups(space, vector)
    params = groups[frozenset_pair((species, species))]
    if space.model_id == "lennard_jones":
        e, _ = _kernels.lj_pair(r, params["epsilon"], params["sigma"], params["cutoff"])
    else:
        e, _ = _kernels.morse_pair(r, params["D"], params["a"], params["r0"], params["cutoff"])
    return 0.5 * float(e @ weight) / nb


def lattice_energy_per_atom(space, vector, kind, species, a):
    """Energy per atom of a perfect crystal at lattice constant a."""
    if kind not in LATTICE_KINDS:
        raise PropertyError(f"unknown lattice kind: {kind!r}")
    if a <= 0:
        raise PropertyError("lattice constant must be positive")
    if space.model_id in ("lennard_jones", "morse"):
        return _lattice_pair_energy_per_atom(space, vector, kind, species, a)
    # triplet model: evaluate a supercell large enough for minimum image
    rc = potentials.max_cutoff(space, vector)
    n = max(1, int(math.ceil(2.0 * rc / a + 1e-9)))
    crystal = make_lattice(kind, a, species, (n, n, n))
    return potentials.energy(space, vector, crystal) / len(crystal)


def relax_lattice(space, vector, lattice_kind, species, scale_bracket=None):
    """Golden-section relaxation of the lattice constant.

    Returns (a_eq, cohesive energy per atom). Raises PropertyError when the
    bracket holds no interior minimum.
    """
    lo, hi = scale_bracket or DEFAULT_LATTICE_BRACKET
    f = lambda a: lattice_energy_per_atom(space, vector, lattice_kind, species, a)
    a_eq, e_min = golden_minimize(f, lo, hi, tol=GOLDEN_TOL)
    edge = 20.0 * GOLDEN_TOL
    if a_eq - lo < edge or hi - a_eq < edge:
        raise PropertyError(
            f"no interior energy minimum in bracket [{lo:g}, {hi:g}] "
            f"(minimizer at {a_eq:g})"
        )
    return a_eq, e_min


def bulk_modulus(space, vector, lattice_kind, species, a_eq):
    """B = V d2E/dV2 from 5-point central differences at +/-1%, +/-2% volume."""
    nb = len(_BASES[lattice_kind])
    v0 = a_eq**3 / nb  # volume per atom
    h = 0.01 * v0

    def e_of_v(v):
        a = (nb * v) ** (1.0 / 3.0)
        return lattice_energy_per_atom(space, vector, lattice_kind, species, a)

    f = [e_of_v(v0 + k * h) for k in (-2, -1, 0, 1, 2)]
    d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
    b = v0 * d2
    if b <= 0:
        raise PropertyError(f"negative curvature at a={a_eq:g}: lattice unstable")
    return b


def dimer_energy(space, vector, r, species=None):
    sa, sb = species or (space.species[0], space.species[0])
    return potentials.energy(space, vector, dimer(sa, sb, r))


def dimer_distance(space, vector, species=None, bracket=None):
    """Equilibrium dimer separation by golden-section search."""
    sa, sb = species or (space.species[0], space.species[0])
    lo, hi = bracket or DEFAULT_DIMER_BRACKET
    r_eq, _ = golden_minimize(
        lambda r: potentials.energy(space, vector, dimer(sa, sb, r)), lo, hi
    )
    edge = 20.0 * GOLDEN_TOL
    if r_eq - lo < edge or hi - r_eq < edge:
        raise PropertyError(f"no interior dimer minimum in bracket [{lo:g}, {hi:g}]")
    return r_eq


def compute_property(kind, space, vector, dataset=None, external_evaluators=None, cache=None):
    """Evaluate one PropertyKind for a candidate parameter set.

    cache, when given, memoizes lattice relaxations within one candidate so
    that lattice_constant/cohesive_energy/bulk_modulus targets share work.
    """
    if cache is None:
        cache = {}

    def relaxed(k):
        key = ("relax", k.lattice, k.species, k.bracket)
        if key not in cache:
            cache[key] = relax_lattice(space, vector, k.lattice, k.species[0], k.bracket)
        return cache[key]

    def structure(label):
        if dataset is None or label not in dataset.structures:
            raise PropertyError(f"unresolved structure label: {label!r}")
        return dataset.structures[label]

    if kind.kind == "energy_per_atom":
        s = structure(kind.structure_label)
        return potentials.energy(space, vector, s) / len(s)
    if kind.kind == "energy_difference":
        sa, sb = structure(kind.label_a), structure(kind.label_b)
        return (
            potentials.energy(space, vector, sa) / len(sa)
            - potentials.energy(space, vector, sb) / len(sb)
        )
    if kind.kind == "lattice_constant":
        return relaxed(kind)[0]
    if kind.kind == "cohesive_energy":
        return relaxed(kind)[1]
    if kind.kind == "bulk_modulus":
        a_eq, _ = relaxed(kind)
        return bulk_modulus(space, vector, kind.lattice, kind.species[0], a_eq)
    if kind.kind == "dimer_energy":
        return dimer_energy(space, vector, kind.r, kind.species)
    if kind.kind == "dimer_distance":
        return dimer_distance(space, vector, kind.species, kind.bracket)
    if kind.kind == "external":
        if not external_evaluators or kind.evaluator_id not in external_evaluators:
            raise PropertyError(f"external evaluator not configured: {kind.evaluator_id!r}")
        return external_evaluators[kind.evaluator_id](space.as_dict(vector))
    raise PropertyError(f"unknown property kind: {kind.kind!r}")
