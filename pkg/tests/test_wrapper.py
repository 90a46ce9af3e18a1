"""External-program wrapper: templating, parsing, retries, timeouts."""

import os
import stat
import sys

import pytest

from blast.wrapper import (
    ExternalEvaluator,
    ExternalEvaluatorSpec,
    PredictionFailure,
    WrapperError,
    parse_result_file,
    render_template,
    run_external,
)

PY = sys.executable


def write_script(path, body):
    path.write_text("#!" + PY + "\n" + body)
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return str(path)


def test_render_template():
    out = render_template("eps = {{param:epsilon}}; s={{param:sigma}}", {"epsilon": 0.8, "sigma": 1.1})
    assert out == "eps = 0.80000000000000004; s=1.1000000000000001"
    with pytest.raises(WrapperError, match="unknown parameter"):
        render_template("{{param:gamma}}", {"epsilon": 0.8})
    # 17 significant digits round-trip the double exactly
    assert float(render_template("{{param:x}}", {"x": 0.1})) == 0.1


def test_parse_result_file(tmp_path):
    p = tmp_path / "out.dat"
    p.write_text("# header\nenergy = -1.25\nenergy = -9.0\n")
    assert parse_result_file(p, "energy") == -1.25  # first match wins
    with pytest.raises(WrapperError, match="not found"):
        parse_result_file(p, "pressure")
    p.write_text("energy = abc\n")
    with pytest.raises(WrapperError, match="non-numeric"):
        parse_result_file(p, "energy")


def test_spec_validation():
    with pytest.raises(WrapperError):
        ExternalEvaluatorSpec("e", ("cmd",))  # no output contract
    with pytest.raises(WrapperError):
        ExternalEvaluatorSpec("e", ("cmd",), stdout_pattern=r"(\d+)", timeout_s=0)
    with pytest.raises(WrapperError):
        ExternalEvaluatorSpec("e", ("cmd",), stdout_pattern=r"(\d+)", retries=-1)


def test_stdout_pattern(tmp_path):
    script = write_script(
        tmp_path / "calc.py",
        "import sys\nprint('result: energy =', 2.0 * float(sys.argv[1]))\n",
    )
    spec = ExternalEvaluatorSpec(
        "doubler", (PY, script, "{{param:x}}"),
        stdout_pattern=r"energy = (-?[\d.]+)",
    )
    assert run_external(spec, {"x": 1.5}, tmp_path / "scratch") == 3.0


def test_result_file_and_template(tmp_path):
    (tmp_path / "in.tmpl").write_text("x = {{param:x}}\n")
    script = write_script(
        tmp_path / "calc.py",
        "x = float(open('input.txt').read().split('=')[1])\n"
        "open('out.dat', 'w').write(f'e = {x + 1.0}\\n')\n",
    )
    spec = ExternalEvaluatorSpec(
        "adder", (PY, script),
        template_files=((str(tmp_path / "in.tmpl"), "input.txt"),),
        result_file=("out.dat", "e"),
    )
    assert run_external(spec, {"x": 2.5}, tmp_path / "scratch") == 3.5


def test_nonzero_exit_retry_then_success(tmp_path):
    flag = tmp_path / "attempts"
    script = write_script(
        tmp_path / "flaky.py",
        f"import pathlib, sys\np = pathlib.Path({str(flag)!r})\n"
        "n = int(p.read_text()) if p.exists() else 0\np.write_text(str(n + 1))\n"
        "if n < 2:\n    sys.exit(1)\nprint('v = 7.0')\n",
    )
    spec = ExternalEvaluatorSpec(
        "flaky", (PY, script), stdout_pattern=r"v = ([\d.]+)", retries=2,
    )
    assert run_external(spec, {}, tmp_path / "scratch") == 7.0
    assert flag.read_text() == "3"  # two failures + one success


def test_nonzero_exit_exhausts_retries(tmp_path):
    script = write_script(tmp_path / "fail.py", "import sys\nsys.exit(3)\n")
    spec = ExternalEvaluatorSpec(
        "fail", (PY, script), stdout_pattern=r"(\d+)", retries=1,
    )
    with pytest.raises(PredictionFailure, match="exit code 3"):
        run_external(spec, {}, tmp_path / "scratch")


def test_timeout_kills_process(tmp_path):
    import time

    script = write_script(tmp_path / "hang.py", "import time\ntime.sleep(60)\n")
    spec = ExternalEvaluatorSpec(
        "hang", (PY, script), stdout_pattern=r"(\d+)", timeout_s=0.5,
    )
    t0 = time.monotonic()
    with pytest.raises(PredictionFailure, match="timed out"):
        run_external(spec, {}, tmp_path / "scratch")
    assert time.monotonic() - t0 < 10  # killed, not waited out


def test_unmatched_stdout_is_failure(tmp_path):
    script = write_script(tmp_path / "chatty.py", "print('no numbers here')\n")
    spec = ExternalEvaluatorSpec(
        "chatty", (PY, script), stdout_pattern=r"energy = ([\d.]+)",
    )
    with pytest.raises(PredictionFailure, match="pattern"):
        run_external(spec, {}, tmp_path / "scratch")


def test_scratch_isolation_and_cleanup(tmp_path):
    # success removes the run dir; failure keeps it for debugging
    ok = write_script(tmp_path / "ok.py", "print('v = 1.0')\n")
    bad = write_script(tmp_path / "bad.py", "import sys\nsys.exit(1)\n")
    scratch = tmp_path / "scratch"
    run_external(
        ExternalEvaluatorSpec("ok", (PY, ok), stdout_pattern=r"v = ([\d.]+)"),
        {}, scratch,
    )
    assert list(scratch.iterdir()) == []
    with pytest.raises(PredictionFailure):
        run_external(
            ExternalEvaluatorSpec("bad", (PY, bad), stdout_pattern=r"v = ([\d.]+)"),
            {}, scratch,
        )
    kept = list(scratch.iterdir())
    assert len(kept) == 1 and kept[0].name.startswith("bad-")


def test_evaluator_adapter_and_from_dict(tmp_path):
    script = write_script(tmp_path / "c.py", "import sys\nprint('v =', float(sys.argv[1]) ** 2)\n")
    spec = ExternalEvaluatorSpec.from_dict(
        {
            "evaluator_id": "sq",
            "command": [PY, script, "{{param:sigma}}"],
            "output": {"stdout_pattern": r"v = ([\d.e+-]+)"},
            "timeout_s": 30,
        }
    )
    ev = ExternalEvaluator(spec, tmp_path / "scratch")
    assert ev({"sigma": 3.0}) == 9.0
