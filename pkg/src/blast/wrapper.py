"""Generic external-program evaluator.

Renders parameter values into input-script templates, runs a command in an
isolated scratch subdirectory, and parses one scalar from stdout or a
result file. Failures (nonzero exit, timeout, unparseable output) become
prediction failures after the retry budget, never crashes.
"""

import re
import shutil
import subprocess
import uuid
from dataclasses import dataclass, field
from pathlib import Path


class WrapperError(ValueError):
    pass


class PredictionFailure(WrapperError):
    """The external evaluation failed; the candidate becomes infeasible."""


_PLACEHOLDER = re.compile(r"\{\{param:([A-Za-z_][A-Za-z0-9_]*)\}\}")


@dataclass(frozen=True)
class ExternalEvaluatorSpec:
    evaluator_id: str
    command: tuple  # argument vector; {{param:NAME}} placeholders allowed
    template_files: tuple = ()  # (template path, rendered name) pairs
    stdout_pattern: str | None = None  # one numeric capture group
    result_file: tuple | None = None  # (name, key)
    timeout_s: float = 60.0
    retries: int = 0

    def __post_init__(self):
        object.__setattr__(self, "command", tuple(self.command))
        object.__setattr__(
            self, "template_files", tuple(tuple(t) for t in self.template_files)
        )
        if self.result_file is not None:
            object.__setattr__(self, "result_file", tuple(self.result_file))
        if self.stdout_pattern is None and self.result_file is None:
            raise WrapperError(f"{self.evaluator_id}: need stdout_pattern or result_file")
        if self.timeout_s <= 0:
            raise WrapperError(f"{self.evaluator_id}: timeout must be positive")
        if self.retries < 0:
            raise WrapperError(f"{self.evaluator_id}: retries must be >= 0")

    @classmethod
    def from_dict(cls, d):
        out = d.get("output", {})
        return cls(
            evaluator_id=d["evaluator_id"],
            command=tuple(d["command"]),
            template_files=tuple(tuple(t) for t in d.get("template_files", ())),
            stdout_pattern=out.get("stdout_pattern", d.get("stdout_pattern")),
            result_file=(
                tuple(out["result_file"]) if "result_file" in out
                else (tuple(d["result_file"]) if "result_file" in d else None)
            ),
            timeout_s=float(d.get("timeout_s", 60.0)),
            retries=int(d.get("retries", 0)),
        )


def render_template(template_text, params):
    """Replace {{param:NAME}} placeholders with 17-significant-digit values."""

    def sub(match):
        name = match.group(1)
        if name not in params:
            raise WrapperError(f"template references unknown parameter {name!r}")
        return format(float(params[name]), ".17g")

    return _PLACEHOLDER.sub(sub, template_text)


def parse_result_file(path, key):
    """First `key = value` line wins."""
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*=\s*(\S+)\s*$")
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            m = pattern.match(line)
            if m:
                try:
                    return float(m.group(1))
                except ValueError:
                    raise WrapperError(
                        f"{path}: non-numeric value for {key!r}: {m.group(1)!r}"
                    ) from None
    raise WrapperError(f"{path}: key {key!r} not found")


def _attempt(spec, params, scratch_dir, template_root):
    run_dir = Path(scratch_dir) / f"{spec.evaluator_id}-{uuid.uuid4().hex}"
    run_dir.mkdir(parents=True)
    for template_path, rendered_name in spec.template_files:
        tpath = Path(template_path)
        if not tpath.is_absolute() and template_root is not None:
            tpath = Path(template_root) / tpath
        text = tpath.read_text(encoding="utf-8")
        (run_dir / rendered_name).write_text(render_template(text, params), encoding="utf-8")
    argv = [render_template(arg, params) for arg in spec.command]
    try:
        proc = subprocess.run(
            argv, cwd=run_dir, capture_output=True, text=True, timeout=spec.timeout_s,
        )
    except subprocess.TimeoutExpired:
        raise PredictionFailure(
            f"{spec.evaluator_id}: timed out after {spec.timeout_s:g}s (dir {run_dir})"
        ) from None
    if proc.returncode != 0:
        raise PredictionFailure(
            f"{spec.evaluator_id}: exit code {proc.returncode} (dir {run_dir}): "
            f"{proc.stderr.strip()[:500]}"
        )
    try:
        if spec.stdout_pattern is not None:
            m = re.search(spec.stdout_pattern, proc.stdout)
            if not m:
                raise PredictionFailure(
                    f"{spec.evaluator_id}: stdout did not match pattern (dir {run_dir})"
                )
            value = float(m.group(1))
        else:
            name, key = spec.result_file
            value = parse_result_file(run_dir / name, key)
    except (WrapperError, ValueError, OSError) as exc:
        if isinstance(exc, PredictionFailure):
            raise
        raise PredictionFailure(f"{spec.evaluator_id}: {exc}") from exc
    shutil.rmtree(run_dir, ignore_errors=True)
    return value


def run_external(spec, params, scratch_dir, template_root=None):
    """Run the external command; the scratch subdirectory is unique per
    invocation and retained on failure for debugging."""
    last = None
    for _ in range(spec.retries + 1):
        try:
            return _attempt(spec, params, scratch_dir, template_root)
        except PredictionFailure as exc:
            last = exc
    raise last


class ExternalEvaluator:
    """Callable adapter used by compute_property's external hook."""

    def __init__(self, spec, scratch_dir, template_root=None):
        self.spec = spec
        self.scratch_dir = scratch_dir
        self.template_root = template_root

    def __call__(self, params):
        return run_external(self.spec, params, self.scratch_dir, self.template_root)
