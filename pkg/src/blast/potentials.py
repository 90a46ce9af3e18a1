"""Force-field model registry and energy/force evaluation.

Three built-in analytical models: shifted-truncated Lennard-Jones and
Morse pair potentials (explicit per-pair parameters, no combining rules)
and single-species Stillinger-Weber. Units are eV, Angstrom, eV/Angstrom;
unit strings are metadata only.
"""

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from . import _kernels
from .structures import Structure, full_adjacency, neighbor_list


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    unit: str
    lower: float
    upper: float
    default_low: float
    default_high: float

    def __post_init__(self):
        if not (self.lower <= self.default_low <= self.default_high <= self.upper):
            raise ModelError(
                f"parameter {self.name}: require lower <= default_low <= "
                f"default_high <= upper"
            )

    def with_bounds(self, lower=None, upper=None, default_low=None, default_high=None):
        return ParameterSpec(
            self.name,
            self.unit,
            self.lower if lower is None else lower,
            self.upper if upper is None else upper,
            self.default_low if default_low is None else default_low,
            self.default_high if default_high is None else default_high,
        )


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered parameter specs; the ordering is the vector encoding order."""

    model_id: str
    species: tuple
    specs: tuple

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.specs:
            raise ModelError("parameter space must have at least one spec")
        names = [s.name for s in self.specs]
        if len(set(names)) != len(names):
            raise ModelError("duplicate parameter names")

    def __len__(self):
        return len(self.specs)

    @property
    def names(self):
        return [s.name for s in self.specs]

    def index(self, name):
        for i, s in enumerate(self.specs):
            if s.name == name:
                return i
        raise KeyError(name)

    def as_dict(self, vector):
        vector = np.asarray(vector, dtype=np.float64)
        if len(vector) != len(self.specs):
            raise ModelError("parameter vector length mismatch")
        return dict(zip(self.names, vector.tolist()))

    def lower_bounds(self):
        return np.array([s.lower for s in self.specs])

    def upper_bounds(self):
        return np.array([s.upper for s in self.specs])

    def default_lows(self):
        return np.array([s.default_low for s in self.specs])

    def default_highs(self):
        return np.array([s.default_high for s in self.specs])


@dataclass(frozen=True)
class ModelDescriptor:
    model_id: str
    arity: str  # "pair" or "pair+triplet"
    cutoff_param: str
    description: str = ""


_REGISTRY = (
    ModelDescriptor(
        "lennard_jones", "pair", "cutoff",
        "12-6 Lennard-Jones, energy-shifted to zero at the cutoff",
    ),
    ModelDescriptor(
        "morse", "pair", "cutoff",
        "Morse well D(1-exp(-a(r-r0)))^2 - D, energy-shifted at the cutoff",
    ),
    ModelDescriptor(
        "stillinger_weber", "pair+triplet", "a",
        "Stillinger-Weber two- plus three-body with smooth exponential "
        "cutoff at a*sigma (single species)",
    ),
)

# per-pair specs for the pair models: (name, unit, lower, upper, dlo, dhi)
_LJ_PAIR = (
    ("epsilon", "eV", 0.0, 10.0, 0.01, 2.0),
    ("sigma", "Å", 0.3, 6.0, 1.0, 4.0),
    ("cutoff", "Å", 0.5, 20.0, 5.0, 12.0),
)
_MORSE_PAIR = (
    ("D", "eV", 0.0, 10.0, 0.01, 2.0),
    ("a", "1/Å", 0.05, 10.0, 0.5, 4.0),
    ("r0", "Å", 0.3, 6.0, 1.0, 4.0),
    ("cutoff", "Å", 0.5, 20.0, 5.0, 12.0),
)
_SW = (
    ("epsilon", "eV", 0.0, 20.0, 0.5, 5.0),
    ("sigma", "Å", 0.3, 6.0, 1.0, 3.0),
    ("a", "1", 1.05, 3.0, 1.5, 2.2),
    ("lambda", "1", 0.0, 100.0, 10.0, 40.0),
    ("gamma", "1", 0.05, 5.0, 0.8, 2.0),
    ("cos_theta0", "1", -1.0, 1.0, -0.5, 0.0),
    ("A", "1", 0.1, 50.0, 5.0, 10.0),
    ("B", "1", 0.01, 5.0, 0.3, 1.0),
    ("p", "1", 1.0, 12.0, 3.0, 5.0),
    ("q", "1", 0.0, 6.0, 0.0, 2.0),
)


def list_models():
    """Registered model descriptors, stable order."""
    return list(_REGISTRY)


def get_model(model_id):
    for m in _REGISTRY:
        if m.model_id == model_id:
            return m
    raise ModelError(f"unknown model: {model_id!r}")


def species_pairs(species):
    """Unordered species pairs in canonical encoding order (AA, AB, BB)."""
    return list(combinations_with_replacement(species, 2))


def parameter_space(model_id, species):
    """Full parameter space for a model and species set.

    Pair models get one group of parameters per unordered species pair;
    single-species parameter names are left bare.
    """
    get_model(model_id)
    species = tuple(species)
    if not species:
        raise ModelError("species list must be non-empty")
    if model_id == "stillinger_weber":
        if len(species) > 1:
            raise ModelError("stillinger_weber supports a single species only")
        specs = [ParameterSpec(n, u, lo, hi, dl, dh) for n, u, lo, hi, dl, dh in _SW]
        return ParameterSpace(model_id, species, specs)
    table = _LJ_PAIR if model_id == "lennard_jones" else _MORSE_PAIR
    specs = []
    for sa, sb in species_pairs(species):
        for n, u, lo, hi, dl, dh in table:
            name = n if len(species) == 1 else f"{n}_{sa}_{sb}"
            specs.append(ParameterSpec(name, u, lo, hi, dl, dh))
    return ParameterSpace(model_id, species, specs)


def pair_group_size(model_id):
    return {"lennard_jones": len(_LJ_PAIR), "morse": len(_MORSE_PAIR)}[model_id]


def pair_parameter_groups(space, vector):
    """For pair models: mapping unordered species pair -> parameter dict."""
    vector = np.asarray(vector, dtype=np.float64)
    size = pair_group_size(space.model_id)
    table = _LJ_PAIR if space.model_id == "lennard_jones" else _MORSE_PAIR
    names = [t[0] for t in table]
    groups = {}
    for k, pair in enumerate(species_pairs(space.species)):
        vals = vector[k * size:(k + 1) * size]
        groups[frozenset_pair(pair)] = dict(zip(names, vals.tolist()))
    return groups


def frozenset_pair(pair):
    a, b = pair
    return (a, b) if a <= b else (b, a)


def validate_params(space, vector):
    """Bound check; bounds are inclusive. Returns a list of violations."""
    vector = np.asarray(vector, dtype=np.float64)
    if len(vector) != len(space.specs):
        raise ModelError(
            f"expected {len(space.specs)} parameters, got {len(vector)}"
        )
    violations = []
    for i, (spec, v) in enumerate(zip(space.specs, vector)):
        if not (spec.lower <= v <= spec.upper):
            violations.append(
                (i, spec.name, float(v), spec.lower, spec.upper)
            )
    return violations


def pair_energy(model_id, params, r):
    """Scalar pair interaction energy for the pair models.

    params is a dict with the per-pair parameter names (epsilon/sigma/cutoff
    for LJ; D/a/r0/cutoff for Morse).
    """
    if r <= 0:
        raise ModelError("pair distance must be positive")
    rarr = np.array([float(r)])
    if model_id == "lennard_jones":
        e, _ = _kernels.lj_pair(rarr, params["epsilon"], params["sigma"], params["cutoff"])
    elif model_id == "morse":
        e, _ = _kernels.morse_pair(rarr, params["D"], params["a"], params["r0"], params["cutoff"])
    else:
        raise ModelError(f"pair_energy supports pair models only, not {model_id!r}")
    return float(e[0])


def max_cutoff(space, vector):
    """Largest interaction range over all species pairs."""
    if space.model_id == "stillinger_weber":
        d = space.as_dict(vector)
        return d["a"] * d["sigma"]
    groups = pair_parameter_groups(space, vector)
    return max(g["cutoff"] for g in groups.values())


def _check_species(space, structure):
    missing = set(structure.species) - set(space.species)
    if missing:
        raise ModelError(f"structure species {sorted(missing)} not in parameter space")


def _pair_terms(space, vector, structure):
    """Common setup for the pair models: grouped distances and geometry."""
    rc = max_cutoff(space, vector)
    nlist = neighbor_list(structure, rc)
    groups = pair_parameter_groups(space, vector)
    spec_arr = np.array(structure.species)
    keys = [frozenset_pair((a, b)) for a, b in zip(spec_arr[nlist.pair_i], spec_arr[nlist.pair_j])]
    return nlist, groups, keys


def _eval_pair_model(space, vector, structure, want_forces):
    nlist, groups, keys = _pair_terms(space, vector, structure)
    energy = 0.0
    forces = np.zeros((len(structure), 3))
    for pair_key, params in groups.items():
        mask = np.array([k == pair_key for k in keys], dtype=bool)
        if not mask.any():
            continue
        r = nlist.dist[mask]
        if space.model_id == "lennard_jones":
            e, dvdr = _kernels.lj_pair(r, params["epsilon"], params["sigma"], params["cutoff"])
        else:
            e, dvdr = _kernels.morse_pair(r, params["D"], params["a"], params["r0"], params["cutoff"])
        energy += float(e.sum())
        if want_forces:
            fvec = (dvdr / r)[:, None] * nlist.dvec[mask]
            np.add.at(forces, nlist.pair_i[mask], fvec)
            np.add.at(forces, nlist.pair_j[mask], -fvec)
    return energy, forces


def _eval_sw(space, vector, structure):
    d = space.as_dict(vector)
    rc = d["a"] * d["sigma"]
    nlist = neighbor_list(structure, rc)
    keep = nlist.dist < rc * (1.0 - 1e-12)
    pi, pj = nlist.pair_i[keep], nlist.pair_j[keep]
    pd, pr = nlist.dvec[keep], nlist.dist[keep]
    ptr, nj, nd, nr = full_adjacency(len(structure), pi, pj, pd, pr)
    e, f = _kernels.sw_energy_forces(
        len(structure), pi, pj, pd, pr, ptr, nj, nd, nr,
        d["epsilon"], d["sigma"], d["a"], d["lambda"], d["gamma"],
        d["cos_theta0"], d["A"], d["B"], d["p"], d["q"],
    )
    return float(e), f


def energy(space, vector, structure):
    """Total potential energy (eV) of a structure."""
    _check_species(space, structure)
    if space.model_id == "stillinger_weber":
        return _eval_sw(space, vector, structure)[0]
    return _eval_pair_model(space, vector, structure, want_forces=False)[0]


def forces(space, vector, structure):
    """Analytic per-atom forces (eV/Å), the negative energy gradient."""
    _check_species(space, structure)
    if space.model_id == "stillinger_weber":
        return _eval_sw(space, vector, structure)[1]
    return _eval_pair_model(space, vector, structure, want_forces=True)[1]


def energy_and_forces(space, vector, structure):
    _check_species(space, structure)
    if space.model_id == "stillinger_weber":
        return _eval_sw(space, vector, structure)
    return _eval_pair_model(space, vector, structure, want_forces=True)
