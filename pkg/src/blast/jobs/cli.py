"""Command-line interface.

Exit codes: 0 success, 1 validation error, 2 runtime failure.
"""

import json
import sys
from pathlib import Path

import click
import numpy as np

from .. import potentials
from ..trainset import TrainsetError, cross_validate, load_structures
from .config import (
    ConfigError,
    build_dataset,
    build_external_evaluators,
    build_space,
    default_home,
    parse_config,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def _fail_invalid(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INVALID)


def _fail_runtime(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_RUNTIME)


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        _fail_runtime(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        _fail_invalid(f"{path}: not valid JSON ({exc})")


@click.group()
def main():
    """Force-field fitting workbench."""


# -- models ----------------------------------------------------------------


@main.group()
def model():
    """Inspect the registered interaction models."""


@model.command("list")
def model_list():
    for m in potentials.list_models():
        click.echo(f"{m.model_id:18s} arity={m.arity}  {m.description}")


@model.command("show")
@click.argument("model_id")
@click.option("--species", default="X", help="Comma-separated species labels.")
def model_show(model_id, species):
    try:
        m = potentials.get_model(model_id)
        space = potentials.parameter_space(model_id, species.split(","))
    except potentials.ModelError as exc:
        _fail_invalid(str(exc))
    click.echo(f"{m.model_id}: {m.description}")
    click.echo(f"arity: {m.arity}  cutoff parameter: {m.cutoff_param}")
    click.echo(f"{'name':24s} {'unit':8s} {'bounds':>24s} {'default range':>24s}")
    for s in space.specs:
        click.echo(
            f"{s.name:24s} {s.unit:8s} "
            f"{f'[{s.lower:g}, {s.upper:g}]':>24s} "
            f"{f'[{s.default_low:g}, {s.default_high:g}]':>24s}"
        )


# -- data ------------------------------------------------------------------


@main.group()
def data():
    """Training-data utilities."""


@data.command("validate")
@click.argument("path", type=click.Path())
def data_validate(path):
    """Check a structure file for parse errors and report its contents."""
    try:
        structures = load_structures(path)
    except OSError as exc:
        _fail_runtime(str(exc))
    except (TrainsetError, ValueError) as exc:
        _fail_invalid(f"{path}: {exc}")
    for s in structures:
        kind = "periodic" if s.cell is not None else "cluster"
        click.echo(f"{s.label}: {len(s.species)} atoms, {kind}")
    click.echo(f"ok: {len(structures)} structure(s)")


# -- fitting ---------------------------------------------------------------


@main.command("run")
@click.argument("config_path", type=click.Path())
@click.option("--executor", default=None,
              help="Override the config executor: serial, pool:N, or broker:HOST:PORT.")
@click.option("--home", default=None, type=click.Path(),
              help="Workbench home directory (default $BLAST_HOME or ./blast_home).")
def run(config_path, executor, home):
    """Run a fit described by a JSON config file and print the result."""
    from .manager import JobManager

    doc = _load_json(config_path)
    manager = JobManager(home or default_home(), executor_override=executor)
    try:
        record = manager.submit(doc)
    except ConfigError as exc:
        for p, reason in exc.errors:
            click.echo(f"config error: {p}: {reason}", err=True)
        sys.exit(EXIT_INVALID)
    manager.start(record.job_id)
    for event in manager.stream_events(record.job_id):
        best = event.get("best_objective")
        best = "inf" if best is None else f"{best:.6g}"
        click.echo(f"iter {event['iteration']:5d}  best {best}  "
                   f"evals {event['evaluations']}")
    record = manager.wait(record.job_id)
    if record.status != "completed":
        _fail_runtime(f"job {record.job_id} ended {record.status}: {record.error}")
    result = manager.result(record.job_id)
    click.echo(json.dumps(result, indent=2))


@main.command("validate")
@click.argument("config_path", type=click.Path())
@click.argument("params_path", type=click.Path())
@click.option("--home", default=None, type=click.Path())
def validate(config_path, params_path, home):
    """Cross-validate a parameter set against the config's targets."""
    doc = _load_json(config_path)
    params_doc = _load_json(params_path)
    home = Path(home or default_home())
    try:
        cfg = parse_config(doc)
        space = build_space(cfg)
        dataset = build_dataset(cfg, home)
        externals = build_external_evaluators(cfg, home)
    except ConfigError as exc:
        for p, reason in exc.errors:
            click.echo(f"config error: {p}: {reason}", err=True)
        sys.exit(EXIT_INVALID)
    except (OSError, ValueError) as exc:
        _fail_runtime(str(exc))
    try:
        if isinstance(params_doc, dict):
            vector = np.array([float(params_doc[n]) for n in space.names])
        else:
            vector = np.asarray(params_doc, dtype=float)
    except KeyError as exc:
        _fail_invalid(f"params file missing parameter {exc}")
    violations = potentials.validate_params(space, vector)
    if violations:
        for _, name, value, lo, hi in violations:
            click.echo(f"out of bounds: {name} = {value:g} not in [{lo:g}, {hi:g}]",
                       err=True)
        sys.exit(EXIT_INVALID)
    report = cross_validate(space, vector, dataset, externals)
    for row in report.rows:
        status = "pass" if row.passed else "FAIL"
        pred = "failed" if row.predicted is None else f"{row.predicted:.6g}"
        click.echo(f"{status}  {row.target_id:24s} target {row.target:.6g}  "
                   f"predicted {pred}")
    click.echo(f"rms normalized residual: {report.rms_normalized_residual:.6g}")
    sys.exit(EXIT_OK if report.all_passed else EXIT_INVALID)


# -- services --------------------------------------------------------------


@main.command("worker")
@click.option("--connect", required=True, metavar="HOST:PORT")
def worker(connect):
    """Run a fit-evaluation worker against a running broker."""
    from ..learn.evaluators import evaluate_fit_task
    from ..parallel import worker_run

    host, port = connect.rsplit(":", 1)
    try:
        worker_run((host, int(port)), evaluate_fit_task)
    except KeyboardInterrupt:
        pass


@main.command("serve")
@click.option("--port", default=8000, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--home", default=None, type=click.Path())
def serve(port, host, home):
    """Serve the jobs HTTP API."""
    import uvicorn

    from .api import create_app
    from .manager import JobManager

    manager = JobManager(home or default_home())
    uvicorn.run(create_app(manager), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
