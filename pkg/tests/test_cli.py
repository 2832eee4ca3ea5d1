import json
import math
import subprocess
import sys

import pytest

from adiabatic_probe import serialize
from adiabatic_probe.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestTrace:
    def test_pulse_stroboscopic(self, capsys):
        code, out, _ = run(capsys, "trace", "--k", "1", "--r", "0.06", "--omega0", "1700", "--cycles", "15", "--method", "pulse")
        assert code == 0
        lines = out.splitlines()
        assert lines[1] == "t,fidelity"
        values = [float(line.split(",")[1]) for line in lines[2:]]
        assert len(values) == 16
        assert min(values) < 0.1

    def test_closed_json(self, capsys):
        code, out, _ = run(capsys, "trace", "--k", "0.75", "--r", "0.05", "--t-end", "2e-3", "--points", "11", "--format", "json")
        assert code == 0
        rec = serialize.from_json(out)
        assert rec.kind == "trace" and len(rec.rows) == 11
        assert rec.params["omega1"] == 100.0
        assert rec.provenance["method"] == "closed-form"

    def test_integrator_to_file(self, capsys, tmp_path):
        path = tmp_path / "trace.csv"
        code, out, _ = run(capsys, "trace", "--omega0", "1700", "--omega1", "102", "--omega-prime", "1700", "--t-end", "1e-3", "--points", "5", "--method", "integrator", "--out", str(path))
        assert code == 0 and out == ""
        text = path.read_text()
        assert text.startswith("# schema=") and len(text.splitlines()) == 7

    @pytest.mark.parametrize(
        "argv",
        [
            ("trace", "--k", "1", "--cycles", "3"),  # no R / omega1
            ("trace", "--k", "1", "--r", "0.06"),  # no length
            ("trace", "--k", "1", "--r", "0.06", "--omega0", "1700", "--omega1", "50", "--cycles", "2"),  # conflict
            ("trace", "--k", "1", "--r", "0.06", "--cycles", "-1"),
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert "error" in err

    def test_full_frequencies_override_ratios(self, capsys):
        code, out, _ = run(capsys, "conditions", "--k", "5", "--r", "0.5", "--omega0", "1700", "--omega1", "102", "--omega-prime", "1700")
        assert code == 0
        assert json.loads(out)["report"]["K"] == pytest.approx(1.0)

    def test_argparse_rejects_method(self):
        with pytest.raises(SystemExit) as exc:
            main(["trace", "--method", "euler"])
        assert exc.value.code == 2


class TestSweep:
    def test_rows_and_header(self, capsys):
        code, out, _ = run(capsys, "sweep", "--k-range", "0.5:1.5:4", "--r-range", "0.05:0.3:3", "--quantities", "f_min,wu_c3")
        assert code == 0
        lines = out.splitlines()
        assert lines[1] == "k,r,quantity,value,resonant"
        assert len(lines) == 2 + 4 * 3 * 2

    def test_resonance_in_json(self, capsys):
        R = 0.1
        K = 1 + R * R
        code, out, _ = run(capsys, "sweep", "--k-range", f"{K}:{K}:1", "--r-range", f"{R}:{R}:1", "--quantities", "wu_c3", "--format", "json")
        assert code == 0
        obj = json.loads(out)
        assert obj["rows"][0]["value"] == {"inf": True}
        assert obj["rows"][0]["resonant"] is True

    def test_jobs_byte_identical(self, capsys):
        argv = ["sweep", "--k-range", "0.1:30:20", "--r-range", "0.01:0.5:20"]
        _, one, _ = run(capsys, *argv, "--jobs", "1")
        _, four, _ = run(capsys, *argv, "--jobs", "4")
        assert one == four

    def test_env_jobs(self, capsys, monkeypatch):
        monkeypatch.setenv("ADIABATIC_PROBE_JOBS", "2")
        code, out, _ = run(capsys, "sweep", "--k-range", "0.5:1.5:3", "--r-range", "0.1:0.2:2")
        assert code == 0 and len(out.splitlines()) == 2 + 3 * 2 * 5
        monkeypatch.setenv("ADIABATIC_PROBE_JOBS", "x")
        code, _, _ = run(capsys, "sweep", "--k-range", "0.5:1.5:3", "--r-range", "0.1:0.2:2")
        assert code == 1

    @pytest.mark.parametrize("rng", ["1:2", "a:b:3", "0:1:5", "2:1:5", "0.1:1:5:cubic"])
    def test_bad_range(self, capsys, rng):
        code, _, _ = run(capsys, "sweep", "--k-range", rng)
        assert code == 2

    def test_bad_quantity(self, capsys):
        code, _, _ = run(capsys, "sweep", "--k-range", "0.5:1:2", "--r-range", "0.1:0.2:2", "--quantities", "c2")
        assert code == 2


class TestConditions:
    def test_resonant(self, capsys):
        code, out, _ = run(capsys, "conditions", "--k", "1.0036", "--r", "0.06")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["resonant"] is True
        assert rep["wu_c3"] == {"inf": True}

    def test_numeric_matches_closed(self, capsys):
        _, closed, _ = run(capsys, "conditions", "--k", "1", "--r", "0.06", "--omega0", "1700")
        _, numeric, _ = run(capsys, "conditions", "--k", "1", "--r", "0.06", "--omega0", "1700", "--numeric")
        a, b = json.loads(closed)["report"], json.loads(numeric)["report"]
        assert json.loads(numeric)["provenance"]["method"] == "finite-difference"
        for key in ("c1", "tong_b", "tong_c", "wu_c3"):
            assert math.isclose(a[key], b[key], rel_tol=1e-6)

    def test_bad_horizon(self, capsys):
        code, _, _ = run(capsys, "conditions", "--k", "1", "--r", "0.06", "--horizon", "-1")
        assert code == 2


class TestValidate:
    def test_quick(self, capsys):
        code, out, _ = run(capsys, "validate", "--quick")
        assert code == 0
        assert "checks passed" in out

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "adiabatic_probe", "conditions", "--k", "10", "--r", "0.06"],
            capture_output=True,
            text=True,
            check=False,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["report"]["wu_c3"] == pytest.approx(0.0333466720021342, rel=1e-12)
