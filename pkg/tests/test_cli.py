import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from feedbackwalk import chains
from feedbackwalk.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def crossings(text: str) -> np.ndarray:
    rows = list(csv.DictReader(io.StringIO(text)))
    p = np.array([float(r["p"]) for r in rows])
    a = np.array([float(r["alpha"]) for r in rows])
    return p[np.flatnonzero(np.diff(np.sign(a - 0.5)))]


class TestAlphaScan:
    @pytest.mark.parametrize("L", [10, 20])
    def test_golden(self, capsys, L):
        code, out, _ = run(capsys, "alpha-scan", "--q", "0.75", "--R", "10", "--L", str(L))
        assert code == 0
        assert out == (GOLDEN / f"alpha_scan_q0.75_R10_L{L}.csv").read_text()

    def test_two_crossings_in_golden(self):
        for L in (10, 20):
            assert len(crossings((GOLDEN / f"alpha_scan_q0.75_R10_L{L}.csv").read_text())) == 2

    def test_symmetric_crossing(self, capsys):
        _, out, _ = run(capsys, "alpha-scan", "--q", "0.5", "--R", "1", "--L", "1")
        c = crossings(out)
        assert len(c) == 1 and abs(c[0] - 0.5) < 0.002

    def test_single_crossing(self, capsys):
        _, out, _ = run(capsys, "alpha-scan", "--q", "0.3", "--R", "4", "--L", "4")
        c = crossings(out)
        assert len(c) == 1 and abs(c[0] - 0.7) < 0.002

    def test_json(self, capsys):
        code, out, _ = run(capsys, "alpha-scan", "--q", "0.5", "--R", "1", "--L", "1", "--steps", "3", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and len(doc["p"]) == len(doc["alpha"]) == 3

    @pytest.mark.parametrize("argv", [
        ["--steps", "1"],
        ["--p-min", "0.6", "--p-max", "0.4"],
        ["--p-min", "0"],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, "alpha-scan", "--q", "0.5", "--R", "1", "--L", "1", *argv)
        assert code == 2 and "error" in err

    def test_output_file(self, capsys, tmp_path):
        dest = tmp_path / "scan.csv"
        code, out, _ = run(capsys, "alpha-scan", "--q", "0.75", "--R", "10", "--L", "10", "--output", str(dest))
        assert code == 0 and out == ""
        assert dest.read_text() == (GOLDEN / "alpha_scan_q0.75_R10_L10.csv").read_text()


class TestClassify:
    def test_noncritical(self, capsys):
        code, out, _ = run(capsys, "classify", "--p", "0.9", "--q", "0.6")
        doc = json.loads(out)
        assert code == 0 and doc["verdict"] == "TransientRight" and doc["rule"] == "Thm1"

    def test_critical_L1(self, capsys):
        code, out, _ = run(capsys, "classify", "--critical-L1", "--q", "0.3", "--R", "2")
        doc = json.loads(out)
        assert code == 0 and doc["params"]["L"] == 1
        assert doc["rule"].startswith("Thm8")
        # R = L = 1 at p = 1 - q is covered by its own rule
        _, out, _ = run(capsys, "classify", "--critical-L1", "--q", "0.3", "--R", "1")
        assert json.loads(out)["rule"] == "Cor1"

    def test_RL2_mixed(self, capsys):
        code, out, _ = run(capsys, "classify", "--RL2", "--q", "0.25", "--right-tail", "p0", "--left-tail", "q0")
        doc = json.loads(out)
        assert doc["verdict"] == "MixedTransient" and doc["rule"] == "Thm9.i.d"

    def test_RL2_recurrent(self, capsys):
        _, out, _ = run(capsys, "classify", "--RL2", "--q", "0.4")
        assert json.loads(out)["verdict"] == "Recurrent"

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "classify", "--p", "0.9", "--q", "0.6", "--format", "csv")
        header, row = out.splitlines()
        assert header == "verdict,rule,p,q,R,L,certificates"
        assert row.startswith("TransientRight,Thm1,0.9,0.6,1,1,")

    def test_missing_p(self, capsys):
        code, _, err = run(capsys, "classify", "--q", "0.3")
        assert code == 2 and "--p" in err

    def test_bad_token(self, capsys):
        assert run(capsys, "classify", "--p", "0.9", "--q", "0.6", "--right-tail", "r7")[0] == 2

    def test_overrides(self, capsys):
        code, out, _ = run(capsys, "classify", "--p", "0.9", "--q", "0.6", "--override", "0=p0", "--override", "1=q0")
        doc = json.loads(out)
        assert code == 0 and doc["spec"]["overrides"]["0"] == "p0"


class TestSpeed:
    def test_five_thirteenths(self, capsys):
        code, out, _ = run(capsys, "speed", "--p", "0.9", "--q", "0.6")
        assert code == 0 and json.loads(out)["speed"] == pytest.approx(5 / 13, abs=1e-12)

    def test_leftward(self, capsys):
        _, out, _ = run(capsys, "speed", "--p", "0.1", "--q", "0.4", "--left-tail", "p0")
        assert json.loads(out)["speed"] == pytest.approx(-0.714, abs=1e-3)

    def test_csv_record(self, capsys):
        _, out, _ = run(capsys, "speed", "--p", "0.9", "--q", "0.6", "--format", "csv")
        header, row = out.splitlines()
        assert "speed" in header.split(",") and len(header.split(",")) == len(next(csv.reader([row])))


class TestSimulate:
    ARGS = ("simulate", "--p", "0.7", "--q", "0.4", "--max-steps", "200", "--seed", "5")

    def test_trajectory(self, capsys):
        code, out, _ = run(capsys, *self.ARGS)
        lines = out.splitlines()
        assert code == 0 and lines[0] == "# seed=5" and lines[1] == "n,position"
        assert len(lines) == 2 + 201

    def test_deterministic(self, capsys):
        a = run(capsys, *self.ARGS)[1]
        b = run(capsys, *self.ARGS)[1]
        assert a == b

    def test_counters_and_summary(self, capsys):
        _, out, _ = run(capsys, *self.ARGS, "--record", "counters")
        assert out.splitlines()[1] == "x,N,R,L"
        _, out, _ = run(capsys, *self.ARGS, "--record", "summary", "--format", "json")
        doc = json.loads(out)
        assert doc["seed"] == 5 and doc["time"] == 200 and doc["kind"] == "StepBudgetExhausted"

    def test_barriers(self, capsys):
        _, out, _ = run(capsys, "simulate", "--p", "0.5", "--q", "0.5", "--right-barrier", "1",
                        "--left-barrier", "-1", "--record", "summary", "--format", "json")
        assert json.loads(out)["time"] == 1

    def test_zero_budget(self, capsys):
        assert run(capsys, *self.ARGS[:-4], "--max-steps", "0")[0] == 2

    def test_coupled(self, capsys):
        code, out, _ = run(capsys, *self.ARGS, "--engine", "coupled", "--record", "summary")
        assert code == 0 and "coupled" in out


class TestMC:
    def test_speed_csv(self, capsys):
        code, out, _ = run(capsys, "mc", "--p", "0.9", "--q", "0.6", "--reps", "4", "--n-steps", "1000", "--seed", "3")
        header, row = out.splitlines()
        assert code == 0 and header == "estimator,p,q,R,L,mean,stderr,n,seed"
        assert row.startswith("speed,0.9,0.6,1,1,") and row.endswith(",4,3")

    def test_threads_identical(self, capsys):
        base = ("mc", "--p", "0.7", "--q", "0.4", "--reps", "8", "--n-steps", "2000", "--format", "json")
        a = run(capsys, *base, "--threads", "1")[1]
        b = run(capsys, *base, "--threads", "2")[1]
        assert a == b

    @pytest.mark.parametrize("est", ["direction", "E_Nx", "Z_survival", "escape"])
    def test_estimators(self, capsys, est):
        code, out, _ = run(capsys, "mc", "--p", "0.9", "--q", "0.6", "--estimator", est, "--reps", "5",
                           "--barrier", "20", "--horizon", "50", "--max-steps", "10000", "--format", "json")
        assert code == 0 and json.loads(out)

    def test_bad_threads(self, capsys):
        assert run(capsys, "mc", "--p", "0.9", "--q", "0.6", "--threads", "0")[0] == 2


class TestValidate:
    def test_quick_passes(self, capsys):
        code, out, err = run(capsys, "validate", "--level", "quick")
        doc = json.loads(out)
        assert code == 0 and doc["passed"] and doc["failed"] == [] and err == ""
        assert all(c["status"] == "pass" for c in doc["checks"])

    def test_deterministic(self, capsys):
        a = run(capsys, "validate", "--format", "csv")[1]
        b = run(capsys, "validate", "--format", "csv")[1]
        assert a == b and a.startswith("check_name,status,expected,actual,tolerance")

    def test_mutation_is_caught(self, capsys, monkeypatch):
        real = chains.stationary_pi

        def corrupted(params):
            s = real(params)
            pi = s.pi.copy()
            pi[0] += 1e-6
            pi[-1] -= 1e-6
            return type(s)(s.states, pi, s.pi_p, s.pi_q)

        monkeypatch.setattr(chains, "stationary_pi", corrupted)
        code, out, err = run(capsys, "validate", "--level", "quick")
        assert code == 1
        assert "C1.pi_stationarity" in json.loads(out)["failed"]
        assert "FAILED: C1.pi_stationarity" in err

    def test_unknown_level(self, capsys):
        assert run(capsys, "validate", "--level", "slow")[0] == 2


def test_no_command(capsys):
    assert main([]) == 2


def test_help(capsys):
    assert main(["--help"]) == 0
    assert "alpha-scan" in capsys.readouterr().out
