import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from powersense.cli import COMMANDS, RunConfig, main
from powersense.exceptions import ConfigError

ROOT = Path(__file__).resolve().parents[1]
REFERENCE = ROOT / "configs" / "reference.json"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cfg_path(tmp_path):
    def write(data):
        path = tmp_path / "net.json"
        path.write_text(json.dumps(data))
        return str(path)
    return write


@pytest.fixture
def reference():
    return json.loads(REFERENCE.read_text())


class TestCommands:
    def test_two_player(self, capsys):
        code, out, _ = run(capsys, "two-player", "--config", str(REFERENCE), "--alpha", "0.05")
        assert code == 0
        rep = json.loads(out)
        assert rep["classification"] == "THREE"
        assert rep["thresholds"]["three_equilibria"] == pytest.approx(0.125)

    def test_alpha_sweep_flips_at_threshold(self, capsys):
        code, out, _ = run(capsys, "alpha-sweep", "--config", str(REFERENCE), "--from", "0", "--to", "0.3", "--steps", "61")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 61
        header = out.splitlines()[0].split(",")
        assert header[0] == "alpha[-]" and all("[" in h for h in header if h not in ("classification", "pure_equilibria"))
        flip = [float(r["alpha[-]"]) for r in rows if r["classification"] != "THREE"][0]
        assert abs(flip - 0.125) <= 0.005
        assert rows[-1]["classification"] == "UNIQUE"

    def test_roots(self, capsys):
        code, out, _ = run(capsys, "roots", "--config", str(REFERENCE))
        data = json.loads(out)
        assert code == 0 and data["beta"] == pytest.approx(0.5) and data["gamma"] == pytest.approx(0.4)

    def test_one_shot(self, capsys):
        data = json.loads(run(capsys, "one-shot", "--config", str(REFERENCE))[1])
        assert data["nash_powers_W"] == pytest.approx([0.1, 0.1])
        assert data["best_response_dynamics"]["converged"]

    def test_stackelberg(self, capsys):
        data = json.loads(run(capsys, "stackelberg", "--config", str(REFERENCE), "--alpha", "0")[1])
        powers = {(r["player"], r["role"]): r["power_W"] for r in data["outcomes"]}
        assert powers[(0, "L")] == pytest.approx(0.075) and powers[(1, "F")] == pytest.approx(0.0875)

    def test_sensing_game(self, capsys):
        data = json.loads(run(capsys, "sensing-game", "--config", str(REFERENCE))[1])
        assert data["exact_potential"]["holds"] and data["weighted_potential"]["holds"]
        assert len(data["game"]["payoffs"]) == 4

    def test_correlated_region(self, capsys):
        code, out, _ = run(capsys, "correlated-region", "--config", str(REFERENCE), "--angles", "8")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0 and rows[0][0] == "theta[rad]" and len(rows) == 1 + 16

    def test_hybrid_paradox(self, capsys):
        data = json.loads(run(capsys, "hybrid-paradox", "--config", str(REFERENCE), "--grid-size", "41")[1])
        assert data["hybrid"]["grid"]["size"] == 41
        assert data["hybrid"]["dominance"]["strict"]

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, "two-player", "--config", str(REFERENCE), "--out", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["classification"] == "THREE"

    def test_scientific_formatting(self, capsys):
        out = run(capsys, "roots", "--config", str(REFERENCE))[1]
        assert "5.00000000000e-01" in out


class TestErrors:
    def test_missing_field(self, capsys, cfg_path, reference):
        del reference["sigma2"]
        code, _, err = run(capsys, "two-player", "--config", cfg_path(reference))
        assert code == 1 and "sigma2" in err

    def test_bad_value_names_field(self, capsys, cfg_path, reference):
        reference["efficiency"]["a"] = -1
        code, _, err = run(capsys, "roots", "--config", cfg_path(reference))
        assert code == 1 and "efficiency" in err

    def test_unreadable(self, capsys, tmp_path):
        code, _, err = run(capsys, "roots", "--config", str(tmp_path / "nope.json"))
        assert code == 1 and "cannot read" in err

    def test_infeasible(self, capsys, cfg_path, reference):
        reference.update(K=3, h=[1, 1, 1], R=[1, 1, 1], Pmax=[1, 1, 1])
        code, _, err = run(capsys, "one-shot", "--config", cfg_path(reference))
        assert code == 2 and "(K-1)*beta* < 1" in err

    def test_bad_alpha_flag(self, capsys):
        code, _, _ = run(capsys, "two-player", "--config", str(REFERENCE), "--alpha", "1.5")
        assert code == 1

    def test_unordered_sweep(self, reference):
        reference["sweep"] = {"from": 0.3, "to": 0.1, "steps": 3}
        with pytest.raises(ConfigError):
            RunConfig.from_dict(reference)


class TestDeterminism:
    @pytest.mark.parametrize("command", COMMANDS)
    def test_repeat_runs_identical(self, command):
        argv = [sys.executable, "-m", "powersense", command, "--config", str(REFERENCE)]
        first = subprocess.run(argv, capture_output=True, check=True).stdout
        second = subprocess.run(argv, capture_output=True, check=True).stdout
        assert first and first == second
