import json

import numpy as np
import pytest

from warpcap.cli.commands import run_command
from warpcap.cli.runs import parallel_map
from warpcap.cli.verify import uniqueness_certificate
from warpcap.errors import MaxIterationsExceeded
from warpcap.mesh.io import read_solution_csv
from warpcap.solver import uniqueness
from warpcap.solver.uniqueness import UniquenessStudy
from warpcap.utils.paths import (
    CONVERGENCE_REPORT_FILE,
    EXPORT_CSV_FILE,
    HISTORY_FILE,
    MMS_REPORT_FILE,
    ORACLE_REPORT_FILE,
    REPORT_FILE,
    SOLUTION_FILE,
    VERIFY_REPORT_FILE,
    VTK_FILE,
)

from test.util import write_config

FORCED_ZERO = """
[domain]
shape = disk
h = 0.2

[problem]
psi = s
phi = 0
"""

GRAVITY = """
[domain]
shape = disk
h = 0.2

[problem]
family = gravity
c = 1
kappa = 1
phi = 0.3

[output]
formats = csv, vtk
"""

INTERVAL = """
[metric]
preset = custom-expression
gamma = exp(2*x1)

[domain]
shape = interval
cells = 64

[problem]
psi = 1 + s
phi = 0.2

[oracle]
m_dense = 4096
"""


def run(tmp_path, command, text, out="out", *extra):
    path = write_config(tmp_path, text)
    return run_command([command, "--config", str(path), "--output-dir", str(tmp_path / out), *extra])


def test_forced_zero_solution(tmp_path):
    assert run(tmp_path, "solve", FORCED_ZERO) == 0
    table = read_solution_csv(tmp_path / "out" / SOLUTION_FILE)
    assert np.max(np.abs(table.u)) < 1e-10
    history = [json.loads(line) for line in (tmp_path / "out" / HISTORY_FILE).read_text().splitlines()]
    assert history[0]["tau"] == 0.0
    assert history[-1]["tau"] == 1.0


def test_runs_are_reproducible(tmp_path):
    assert run(tmp_path, "solve", GRAVITY, "first", "--seed", "5") == 0
    assert run(tmp_path, "solve", GRAVITY, "second", "--seed", "5") == 0
    for name in (SOLUTION_FILE, REPORT_FILE, HISTORY_FILE, VTK_FILE):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_verify_after_solve(tmp_path):
    assert run(tmp_path, "solve", GRAVITY) == 0
    assert run(tmp_path, "verify", GRAVITY) == 0
    names = [json.loads(line)["name"] for line in (tmp_path / "out" / VERIFY_REPORT_FILE).read_text().splitlines()]
    assert names == [
        "height",
        "contact_angle",
        "strong_form",
        "interior_gradient",
        "boundary_gradient",
        "lemma1i",
    ]


def test_verify_without_solution(tmp_path):
    assert run(tmp_path, "verify", GRAVITY) == 2


def test_export(tmp_path):
    assert run(tmp_path, "solve", FORCED_ZERO) == 0
    assert run(tmp_path, "export", FORCED_ZERO + "\n[output]\nformats = vtk, csv\n") == 0
    assert (tmp_path / "out" / VTK_FILE).read_text().startswith("# vtk DataFile")
    exported = read_solution_csv(tmp_path / "out" / EXPORT_CSV_FILE)
    stored = read_solution_csv(tmp_path / "out" / SOLUTION_FILE)
    assert np.array_equal(exported.u, stored.u)


def test_oracle_command(tmp_path):
    assert run(tmp_path, "oracle1d", INTERVAL) == 0
    report = json.loads((tmp_path / "out" / ORACLE_REPORT_FILE).read_text())
    assert report["passed"]


def test_oracle_needs_an_interval(tmp_path):
    assert run(tmp_path, "oracle1d", GRAVITY) == 2


def test_invalid_config_exits_with_2(tmp_path):
    assert run(tmp_path, "solve", "[solver]\ndtau = 2\n") == 2
    assert run(tmp_path, "solve", "[solver]\ndtua = 0.1\n") == 2


def test_violated_conditions_exit_with_2(tmp_path):
    assert run(tmp_path, "solve", "[problem]\npsi = -s\n") == 2


def test_stalled_continuation_exits_with_1(tmp_path):
    text = GRAVITY + "\n[solver]\nmax_newton = 1\ndtau = 0.1\ndtau_min = 0.05\n"
    assert run(tmp_path, "solve", text) == 1
    assert (tmp_path / "out" / HISTORY_FILE).exists()


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["solve", "--no-such-flag", "1"]])
def test_usage_errors(argv):
    assert run_command(argv) == 2


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(10), 4) == [x * x for x in range(10)]


def test_refinement_commands_need_enough_resolutions(tmp_path):
    assert run(tmp_path, "convergence", GRAVITY + "\n[verify]\nh = 0.2, 0.1\n") == 2
    assert run(tmp_path, "mms", "[mms]\nh = 0.1\n") == 2


def _diverging_newton(start, *args, **kwargs):
    raise MaxIterationsExceeded("no convergence", u=start)


def test_verify_fails_when_no_restart_converges(tmp_path, monkeypatch):
    text = GRAVITY + "\n[verify]\nuniqueness = yes\n"
    assert run(tmp_path, "solve", text) == 0
    monkeypatch.setattr(uniqueness, "newton_solve", _diverging_newton)
    assert run(tmp_path, "verify", text) == 1
    records = [json.loads(line) for line in (tmp_path / "out" / VERIFY_REPORT_FILE).read_text().splitlines()]
    unique = next(r for r in records if r["name"] == "uniqueness")
    assert not unique["passed"]
    assert unique["details"]["converged"] == 0


@pytest.mark.parametrize(
    "study, passed",
    [
        (UniquenessStudy(spread=float("inf"), converged=1, trials=5), False),
        (UniquenessStudy(spread=0.0, converged=0, trials=1), False),
        (UniquenessStudy(spread=1e-9, converged=5, trials=5), True),
        (UniquenessStudy(spread=1e-5, converged=5, trials=5), False),
    ],
)
def test_uniqueness_certificate(study, passed):
    assert uniqueness_certificate(study, 0.1).passed is passed


CAP = """
[problem]
psi = -1 + s - sqrt(4 - r^2)
phi = -r^2/2

[verify]
h = 0.2, 0.1, 0.05
"""


def report_records(path):
    return {r["name"]: r for r in (json.loads(line) for line in path.read_text().splitlines())}


def test_mms_cap_is_second_order(tmp_path):
    assert run(tmp_path, "mms", "[mms]\nh = 0.2, 0.1, 0.05\n") == 0
    records = report_records(tmp_path / "out" / MMS_REPORT_FILE)
    error = records["mms_error"]
    assert error["passed"]
    assert [t[0] for t in error["trace"]] == sorted((t[0] for t in error["trace"]), reverse=True)
    assert 1.8 <= np.mean(error["details"]["orders"]) <= 3.0
    assert records["contact_angle"]["passed"]


def test_convergence_on_the_cap(tmp_path):
    assert run(tmp_path, "convergence", CAP) == 0
    records = report_records(tmp_path / "out" / CONVERGENCE_REPORT_FILE)
    assert set(records) == {"contact_angle", "strong_form", "interior_gradient", "boundary_gradient"}
    angle = [t[1] for t in records["contact_angle"]["trace"]]
    assert len(angle) == 3
    assert angle[0] > angle[1] > angle[2]
    assert all(o > 0 for o in records["contact_angle"]["details"]["orders"])
    for name in ("interior_gradient", "boundary_gradient"):
        assert records[name]["passed"]
        assert not records[name]["provisional"]
