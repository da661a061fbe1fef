import json
import subprocess
import sys

import pytest

from modlaw.graphs import graph_to_json, pattern


def run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "modlaw.cli"] + args,
                          capture_output=True, text=True)
    return proc


@pytest.fixture(scope="module")
def k4_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("graphs") / "k4.json"
    path.write_text(graph_to_json(pattern("K4")))
    return str(path)


class TestCli:
    def test_eval(self, k4_path):
        proc = run_cli(["eval", "--graph", k4_path,
                        "--formula", "forall x. parity y. E(x,y)"])
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["value"] is True

    def test_eval_with_env(self, k4_path):
        proc = run_cli(["eval", "--graph", k4_path,
                        "--formula", "parity y. E(x,y)", "--env", "x=0"])
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["value"] is True

    def test_limit(self):
        proc = run_cli(["limit", "--formula", "forall x. parity y. E(x,y)",
                        "--q", "2"])
        assert proc.returncode == 0
        data = json.loads(proc.stdout)
        assert data["a"] == ["0", "0"]
        assert data["q"] == 2

    def test_freq(self, k4_path):
        proc = run_cli(["freq", "--graph", k4_path, "--a", "3", "--q", "2"])
        assert proc.returncode == 0
        data = json.loads(proc.stdout)
        assert len(data["coords"]) == 4

    def test_equidist_gate_pass(self):
        proc = run_cli(["equidist", "--patterns", "K3", "--n", "20", "--p",
                        "0.5", "--q", "2", "--samples", "2000", "--seed", "1"])
        assert proc.returncode == 0

    def test_gate_failure_exit_code(self):
        proc = run_cli(["equidist", "--patterns", "K3", "--n", "20", "--p",
                        "0.5", "--q", "2", "--samples", "500", "--seed", "1",
                        "--threshold", "0.0001"])
        assert proc.returncode == 2

    def test_usage_error_exit_code(self):
        proc = run_cli(["limit", "--formula", "mod[4,1] x. x = x", "--q", "4"])
        assert proc.returncode == 1
        assert "prime" in proc.stderr

    def test_scale_error_exit_code(self):
        proc = run_cli(["limit", "--q", "2", "--formula",
                        "parity x. parity y. parity z. (E(x,y) & E(y,z))"])
        assert proc.returncode == 1

    def test_gowers(self):
        proc = run_cli(["gowers", "--q", "2", "--m", "2", "--d", "2",
                        "--exponent", "Z1*Z2"])
        assert proc.returncode == 0
        data = json.loads(proc.stdout)
        assert abs(data["value"] - 0.25 ** 0.25) < 1e-9
        assert data["mode"] == "exact"

    def test_bias(self):
        proc = run_cli(["bias", "--q", "2", "--gip-r", "3", "--gip-d", "2",
                        "--p", "0.5"])
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["value"] == 0.125

    def test_bias_mc_mode(self):
        proc = run_cli(["bias", "--q", "2", "--gip-r", "2", "--gip-d", "2",
                        "--p", "0.5", "--mc", "4000", "--seed", "3"])
        assert proc.returncode == 0
        data = json.loads(proc.stdout)
        assert data["mode"] == "mc" and "stderr" in data

    def test_convergence(self):
        proc = run_cli(["convergence", "--formula", "parity x. x = x",
                        "--q", "2", "--n-list", "20,21", "--samples", "200",
                        "--seed", "4"])
        assert proc.returncode == 0

    def test_json_out(self, tmp_path):
        out = tmp_path / "r.json"
        proc = run_cli(["limit", "--formula", "parity x. x = x", "--q", "2",
                        "--json-out", str(out)])
        assert proc.returncode == 0
        assert json.loads(out.read_text())["a"] == ["0", "1"]

    def test_byte_identical_across_workers(self, tmp_path):
        outs = []
        for workers in ("1", "3"):
            out = tmp_path / f"eq{workers}.json"
            proc = run_cli(["equidist", "--patterns", "K3,P3", "--n", "18",
                            "--p", "0.5", "--q", "2", "--samples", "2000",
                            "--seed", "7", "--workers", workers,
                            "--json-out", str(out)])
            assert proc.returncode in (0, 2)
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_freqdist_and_labelled_smoke(self):
        proc = run_cli(["freqdist", "--n", "18", "--p", "0.5", "--q", "2",
                        "--a", "3", "--samples", "300", "--seed", "8"])
        assert proc.returncode == 0
        proc = run_cli(["labelled", "--k", "1", "--s", "1", "--n", "18",
                        "--p", "0.5", "--q", "2", "--samples", "1500",
                        "--seed", "9", "--threshold", "0.08"])
        assert proc.returncode == 0
