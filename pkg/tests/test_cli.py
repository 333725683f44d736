import json

import pytest

from poisswell.cli import EXIT_BLOWUP, EXIT_OK, main

EULER_UNIFORM = """
[run]
kind = euler

[grid]
points = [32]

[params]
epsilon = 0.0
T = 0.1
dt = 0.01

[initial]
family = uniform
"""

COMPRESSIVE = """
[run]
kind = euler

[grid]
points = [128]

[params]
epsilon = 0.0
T = 2.0
sample_every = 2

[initial]
family = compressive
beta = 3.0

[thresholds]
ratio = 30.0
"""

LADDER = """
[run]
kind = ladder

[grid]
points = [64]

[params]
epsilon = 0.1
T = 0.06
s = 4.0

[initial]
family = gaussian-bump
amplitude = 0.3

[ladder]
epsilons = [0.4, 0.2, 0.1]
samples = 3

[wigner]
base_points = [12, 32, 44]
"""


def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestRunCommand:
    def test_euler_uniform_exit_zero(self, tmp_path):
        cfg = write_cfg(tmp_path, EULER_UNIFORM)
        out = tmp_path / "out"
        assert main(["run", str(cfg), "--out", str(out)]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["summary"]["status"] == "completed"
        assert (out / "diagnostics.jsonl").exists()
        assert (out / "manifest.json").exists()

    def test_manifest_covers_artifacts(self, tmp_path):
        cfg = write_cfg(tmp_path, EULER_UNIFORM)
        out = tmp_path / "out"
        main(["run", str(cfg), "--out", str(out)])
        manifest = json.loads((out / "manifest.json").read_text())
        listed = {e["path"] for e in manifest["artifacts"]}
        on_disk = {
            str(p.relative_to(out))
            for p in out.rglob("*")
            if p.is_file() and p.name != "manifest.json"
        }
        assert on_disk == listed

    def test_blowup_exit_code_two_with_artifacts(self, tmp_path):
        cfg = write_cfg(tmp_path, COMPRESSIVE)
        out = tmp_path / "out"
        assert main(["run", str(cfg), "--out", str(out)]) == EXIT_BLOWUP
        report = json.loads((out / "report.json").read_text())
        assert report["summary"]["status"] == "blowup"

    def test_bad_config_exit_one(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "[run]\nkind = nonsense\n")
        assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
        assert "kind" in capsys.readouterr().err

    def test_unwritable_output_dir(self, tmp_path):
        cfg = write_cfg(tmp_path, EULER_UNIFORM)
        blocker = tmp_path / "blocked"
        blocker.write_text("a file, not a directory")
        assert main(["run", str(cfg), "--out", str(blocker)]) == 1


@pytest.fixture(scope="module")
def ladder_out(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("ladder")
    cfg = write_cfg(tmp, LADDER)
    out = tmp / "out"
    code = main(["ladder", str(cfg), "--out", str(out)])
    return code, out


class TestLadderCommand:
    def test_exit_zero_and_slope(self, ladder_out):
        code, out = ladder_out
        assert code == EXIT_OK
        doc = json.loads((out / "report.json").read_text())
        assert doc["ladder"]["slopes"]["xs_error"] is not None
        assert (out / "errors.gp").exists()
        assert (out / "timings.json").exists()

    def test_plot_command(self, ladder_out):
        _, out = ladder_out
        code = main(["plot", str(out / "report.json")])
        assert code == EXIT_OK
        assert (out / "errors.gp").exists()
        assert (out / "wigner.gp").exists()

    def test_reports_deterministic(self, ladder_out, tmp_path):
        _, out = ladder_out
        cfg = write_cfg(tmp_path, LADDER)
        out2 = tmp_path / "out2"
        main(["ladder", str(cfg), "--out", str(out2)])
        assert (out / "report.json").read_bytes() == (out2 / "report.json").read_bytes()


def test_env_var_output_root(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path, EULER_UNIFORM)
    target = tmp_path / "from-env"
    monkeypatch.setenv("POISSWELL_OUT", str(target))
    assert main(["run", str(cfg)]) == EXIT_OK
    assert (target / "report.json").exists()


def test_plot_on_empty_report(tmp_path):
    rep = tmp_path / "report.json"
    rep.write_text(json.dumps({"ladder": {"epsilons": [], "rungs": [], "slopes": {}}}))
    assert main(["plot", str(rep)]) == EXIT_OK
    text = (tmp_path / "errors.gp").read_text()
    assert "plot" in text
