import json
import os
import stat
from pathlib import Path

import pytest

from motslab import cli
from motslab.errors import ScenarioError
from motslab.scenario import DEFAULT_TOLERANCES, parse_scenario, scenario_from_dict, with_overrides

MASS = """
task = "mass"
[model]
name = "euclidean"
[params]
k = { tt = "0.5", pp = "0.5*sin(theta)**2" }
expected_mass = 12.566370614359172
"""


def _write(tmp_path, text, name="s.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_defaults_are_materialized(tmp_path):
    scen = parse_scenario(_write(tmp_path, MASS))
    assert scen.tolerances == DEFAULT_TOLERANCES
    assert scen.surface.resolution == (24, 48)
    assert scen.params["resolution"] == [24, 48]


@pytest.mark.parametrize("text,fragment", [
    ('[model]\nname = "nope"\n', "model.name"),
    ('[model]\nname = "euclidean"\n[surface]\nresolution = [4, 4]\n', "surface.resolution"),
    ('[model]\nname = "euclidean"\n[params]\nbogus = 1\n', "params"),
    ('[model]\nname = "euclidean"\n[tolerances]\nnewton = -1\n', "tolerances.newton"),
    ('[model\n', "line 1"),
])
def test_invalid_scenarios_name_the_offending_field(tmp_path, text, fragment):
    with pytest.raises(ScenarioError, match=fragment.replace(".", r"\.")):
        parse_scenario(_write(tmp_path, text), task="find_mots")


def test_overrides_validate_tolerance_keys():
    scen = scenario_from_dict({"task": "mass", "model": {"name": "euclidean"}})
    assert with_overrides(scen, seed=9, tolerances={"mass": 1e-6}).tolerances["mass"] == 1e-6
    with pytest.raises(ScenarioError):
        with_overrides(scen, tolerances={"nope": 1.0})


def test_run_writes_read_only_manifest_and_report(tmp_path, capsys):
    path = _write(tmp_path, MASS)
    code = cli.main(["mass", "--scenario", str(path), "--out", str(tmp_path / "runs"), "--tol", "mass=1e-9"])
    assert code == 0
    (run_dir,) = (tmp_path / "runs").iterdir()
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["status"] == "passed"
    assert manifest["scenario"]["tolerances"]["mass"] == 1e-9
    assert manifest["summary"]["mass"] == pytest.approx(4 * 3.141592653589793)
    assert not os.stat(run_dir / "manifest.json").st_mode & stat.S_IWUSR
    capsys.readouterr()
    assert cli.main(["report", str(run_dir)]) == 0
    assert "status: passed" in capsys.readouterr().out


def test_runs_never_overwrite(tmp_path):
    scen = parse_scenario(_write(tmp_path, MASS))
    a = cli.run(scen, tmp_path / "r")
    b = cli.run(scen, tmp_path / "r")
    assert a.run_dir != b.run_dir
    assert a.manifest["summary"] == b.manifest["summary"]


def test_environment_variable_sets_output_root(tmp_path, monkeypatch):
    monkeypatch.setenv("MOTSLAB_OUT", str(tmp_path / "envroot"))
    rec = cli.run(parse_scenario(_write(tmp_path, MASS)))
    assert rec.run_dir.parent == tmp_path / "envroot"


def test_solver_failure_is_recorded_with_origin(tmp_path):
    path = _write(tmp_path, '[model]\nname = "euclidean"\n[surface]\nresolution = [12, 24]\n')
    code = cli.main(["find-mots", "--scenario", str(path), "--out", str(tmp_path / "runs")])
    assert code == 1
    (run_dir,) = (tmp_path / "runs").iterdir()
    err = json.loads((run_dir / "manifest.json").read_text())["error"]
    assert err["module"] == "solver" and err["type"] == "SolverError"


def test_bad_input_exits_with_usage_code(tmp_path, capsys):
    assert cli.main(["find-mots", "--scenario", str(tmp_path / "missing.toml")]) == 2
    assert "not found" in capsys.readouterr().err
    assert cli.main(["report", str(tmp_path)]) == 2


def test_failed_hard_check_gives_nonzero_exit(tmp_path):
    text = MASS.replace("12.566370614359172", "1.0")
    assert cli.main(["mass", "--scenario", str(_write(tmp_path, text)), "--out", str(tmp_path / "r")]) == 1


SCENARIOS = sorted((Path(__file__).parent.parent / "scenarios").glob("*.toml"))


@pytest.mark.slow
@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_shipped_scenarios_pass(path, tmp_path):
    rec = cli.run(parse_scenario(path), tmp_path)
    assert rec.passed, cli.render(rec.manifest)
