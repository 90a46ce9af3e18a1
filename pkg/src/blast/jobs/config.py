"""Job configuration documents: parsing, validation, and builders.

Configs are plain JSON. Validation reports every problem with a field
path (e.g. ``learner.population``) so the API and UI can attach messages
to the right input.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path

from .. import potentials
from ..learn import GaConfig, NmConfig
from ..trainset import Dataset, TrainsetError, load_structures, load_targets, split
from ..wrapper import ExternalEvaluator, ExternalEvaluatorSpec, WrapperError

STRATEGIES = ("random", "ga", "hoga", "nsga2", "nelder_mead", "two_stage")
EXECUTORS = ("serial", "pool", "broker")
OBJECTIVE_MODES = ("single", "hierarchical", "pareto")


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)  # list of (path, reason)
        lines = "; ".join(f"{p}: {r}" for p, r in self.errors)
        super().__init__(f"invalid job config: {lines}")

    def to_json(self):
        return [{"path": p, "reason": r} for p, r in self.errors]


@dataclass
class JobConfig:
    name: str
    model_id: str
    species: tuple
    parameter_overrides: dict = field(default_factory=dict)
    structure_files: tuple = ()
    target_file: str | None = None
    targets_inline: list | None = None
    holdout_fraction: float = 0.25
    split_seed: int = 0
    objective_mode: str = "single"
    level_tolerances: dict = field(default_factory=dict)
    strategy: str = "ga"
    strategy_params: dict = field(default_factory=dict)
    executor: str = "serial"
    executor_n: int = 4
    executor_bind: str = "127.0.0.1:0"
    wrappers: tuple = ()
    seed: int = 0
    output_dir: str | None = None
    raw: dict = field(default_factory=dict)

    def to_dict(self):
        return dict(self.raw)


def _check_ga_params(params, path, errors):
    merged = {**params}
    merged.pop("seed", None)
    probe = {
        "population": (lambda v: v >= 4 and v % 2 == 0, "must be even and >= 4"),
        "generations": (lambda v: v >= 1, "must be >= 1"),
        "tournament_size": (lambda v: v >= 2, "must be >= 2"),
        "mutation_rate": (lambda v: 0.0 <= v <= 1.0, "must be in [0, 1]"),
        "mutation_sigma_fraction": (lambda v: v > 0, "must be positive"),
    }
    for key, (ok, reason) in probe.items():
        if key in merged:
            try:
                if not ok(merged[key]):
                    errors.append((f"{path}.{key}", reason))
            except TypeError:
                errors.append((f"{path}.{key}", "must be a number"))
    pop = merged.get("population", 32)
    elit = merged.get("elitism", 1)
    if not (0 <= elit < pop):
        errors.append((f"{path}.elitism", "must satisfy 0 <= elitism < population"))
    unknown = set(merged) - {
        "population", "generations", "tournament_size", "crossover_alpha",
        "mutation_rate", "mutation_sigma_fraction", "elitism",
    }
    for key in sorted(unknown):
        errors.append((f"{path}.{key}", "unknown field"))


def parse_config(doc):
    """Parse and validate a config document; raises ConfigError."""
    errors = []
    if not isinstance(doc, dict):
        raise ConfigError([("", "config must be a JSON object")])

    name = doc.get("name")
    if not name or not isinstance(name, str):
        errors.append(("name", "required non-empty string"))
        name = "unnamed"

    model = doc.get("model") or {}
    model_id = model.get("model_id", "")
    species = tuple(model.get("species") or ())
    try:
        potentials.get_model(model_id)
        if not species:
            errors.append(("model.species", "at least one species required"))
    except potentials.ModelError as exc:
        errors.append(("model.model_id", str(exc)))
    overrides = model.get("parameters") or {}
    if not isinstance(overrides, dict):
        errors.append(("model.parameters", "must be an object of per-parameter overrides"))
        overrides = {}

    data = doc.get("data") or {}
    structure_files = tuple(data.get("structure_files") or ())
    target_file = data.get("target_file")
    targets_inline = data.get("targets")
    if target_file is None and targets_inline is None:
        errors.append(("data.target_file", "target_file or inline targets required"))
    holdout = data.get("holdout_fraction", 0.25)
    if not (isinstance(holdout, (int, float)) and 0.0 < holdout < 1.0):
        errors.append(("data.holdout_fraction", "must be in (0, 1)"))
    split_seed = data.get("split_seed", 0)

    obj = doc.get("objective") or {}
    mode = obj.get("mode", "single")
    if mode not in OBJECTIVE_MODES:
        errors.append(("objective.mode", f"must be one of {OBJECTIVE_MODES}"))
    tolerances = obj.get("tolerances") or {}
    try:
        tolerances = {int(k): float(v) for k, v in tolerances.items()}
        if any(v <= 0 for v in tolerances.values()):
            errors.append(("objective.tolerances", "tolerances must be positive"))
    except (TypeError, ValueError):
        errors.append(("objective.tolerances", "must map rank -> positive number"))
        tolerances = {}

    learner = doc.get("learner") or {}
    strategy = learner.get("strategy", "ga")
    if strategy not in STRATEGIES:
        errors.append(("learner.strategy", f"must be one of {STRATEGIES}"))
    params = {k: v for k, v in learner.items() if k != "strategy"}
    if strategy in ("ga", "hoga", "nsga2"):
        _check_ga_params({k: v for k, v in params.items() if k not in ("local", "top_k")},
                         "learner", errors)
    elif strategy == "two_stage":
        _check_ga_params(
            {k: v for k, v in params.items() if k not in ("local", "top_k", "n")},
            "learner", errors,
        )
        if params.get("top_k", 1) < 1:
            errors.append(("learner.top_k", "must be >= 1"))
    elif strategy == "random":
        if params.get("n", 100) < 1:
            errors.append(("learner.n", "must be >= 1"))
    if strategy == "hoga" and not tolerances:
        errors.append(("objective.tolerances", "hoga requires per-rank tolerances"))

    par = doc.get("parallel") or {}
    executor = par.get("executor", "serial")
    if executor not in EXECUTORS:
        errors.append(("parallel.executor", f"must be one of {EXECUTORS}"))
    executor_n = par.get("n", 4)
    if not (isinstance(executor_n, int) and executor_n >= 1):
        errors.append(("parallel.n", "must be an integer >= 1"))
        executor_n = 1
    bind = par.get("bind", "127.0.0.1:0")

    wrappers = []
    for i, w in enumerate(doc.get("wrappers") or []):
        try:
            wrappers.append(ExternalEvaluatorSpec.from_dict(w))
        except (WrapperError, KeyError, TypeError, ValueError) as exc:
            errors.append((f"wrappers[{i}]", str(exc)))

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        errors.append(("seed", "must be a non-negative integer"))
        seed = 0

    if errors:
        raise ConfigError(errors)

    return JobConfig(
        name=name,
        model_id=model_id,
        species=species,
        parameter_overrides=overrides,
        structure_files=structure_files,
        target_file=target_file,
        targets_inline=targets_inline,
        holdout_fraction=float(holdout),
        split_seed=int(split_seed),
        objective_mode=mode,
        level_tolerances=tolerances,
        strategy=strategy,
        strategy_params=params,
        executor=executor,
        executor_n=executor_n,
        executor_bind=bind,
        wrappers=tuple(wrappers),
        seed=seed,
        output_dir=doc.get("output_dir"),
        raw=doc,
    )


def build_space(config):
    """Parameter space with per-parameter bound/default-range overrides."""
    space = potentials.parameter_space(config.model_id, config.species)
    if not config.parameter_overrides:
        return space
    errors = []
    specs = list(space.specs)
    by_name = {s.name: i for i, s in enumerate(specs)}
    for pname, ov in config.parameter_overrides.items():
        if pname not in by_name:
            errors.append((f"model.parameters.{pname}", "unknown parameter"))
            continue
        if "value" in ov:
            # fixed parameter: collapse bounds and sampling range to one value
            v = float(ov["value"])
            ov = {"lower": v, "upper": v, "default_low": v, "default_high": v}
        try:
            specs[by_name[pname]] = specs[by_name[pname]].with_bounds(
                lower=ov.get("lower"),
                upper=ov.get("upper"),
                default_low=ov.get("default_low"),
                default_high=ov.get("default_high"),
            )
        except potentials.ModelError as exc:
            errors.append((f"model.parameters.{pname}", str(exc)))
    if errors:
        raise ConfigError(errors)
    return potentials.ParameterSpace(space.model_id, space.species, specs)


def resolve_path(path, base_dir):
    p = Path(path)
    return p if p.is_absolute() else Path(base_dir) / p


def build_dataset(config, base_dir):
    """Load structures and targets; returns the full (unsplit) dataset."""
    from ..trainset import TargetProperty

    structures = {}
    for f in config.structure_files:
        for s in load_structures(resolve_path(f, base_dir)):
            structures[s.label] = s
    if config.targets_inline is not None:
        targets = [TargetProperty.from_dict(t) for t in config.targets_inline]
    else:
        targets = load_targets(resolve_path(config.target_file, base_dir))
    return Dataset(structures, targets).validate()


def split_dataset(config, dataset):
    return split(dataset, config.holdout_fraction, config.split_seed)


def build_external_evaluators(config, home):
    """Wrapper adapters; templates live under <home>/templates/<id>/."""
    out = {}
    scratch = Path(home) / "scratch"
    for spec in config.wrappers:
        out[spec.evaluator_id] = ExternalEvaluator(
            spec, scratch, template_root=Path(home) / "templates" / spec.evaluator_id
        )
    return out


def default_home():
    return Path(os.environ.get("BLAST_HOME", "./blast_home"))
