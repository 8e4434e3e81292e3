import json
import subprocess
import sys

import pytest

from toricflip.cli import main
from toricflip.germs import f_germ, germ_to_dict, xy_t_germ
from toricflip.germs import SparsePoly


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestClassifyCommand:
    def test_flags(self, capsys):
        code, out, _ = run_cli(
            capsys, "classify", "--family", "xy_t", "--r", "5", "--a", "2"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["case"] == "2.7.2"
        assert payload["index"] == 5

    def test_file(self, capsys, tmp_path):
        path = tmp_path / "germ.json"
        path.write_text(json.dumps(germ_to_dict(xy_t_germ(3, 1))))
        code, out, _ = run_cli(capsys, "classify", "--file", str(path))
        assert code == 0
        assert json.loads(out)["case"] == "2.7.2"

    def test_triple_point_payload(self, capsys, tmp_path):
        from toricflip.germs import xyz_t_germ

        path = tmp_path / "germ.json"
        path.write_text(json.dumps(germ_to_dict(xyz_t_germ())))
        code, out, _ = run_cli(capsys, "classify", "--file", str(path))
        assert code == 0
        payload = json.loads(out)
        assert payload["case"] == "2.7.1" and payload["index"] == 1


class TestResolveCommand:
    def test_dot_output(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "resolve", "--family", "xy_t", "--r", "5", "--a", "2",
            "--format", "dot",
        )
        assert code == 0
        assert out.startswith("digraph")
        # One labeled blow-up edge per blow-up step.
        assert out.count("-> e") == 4

    def test_json_round_trip(self, capsys):
        code, out, _ = run_cli(
            capsys, "resolve", "--family", "xy_t", "--r", "5", "--a", "2"
        )
        payload = json.loads(out)
        assert payload["blowups"] == 4
        from toricflip.germs import germ_from_dict

        for node in payload["nodes"]:
            if node["germ"] is not None:
                germ = germ_from_dict(node["germ"])
                assert germ_to_dict(germ) == node["germ"]

    def test_binomial_flags(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "resolve", "--family", "moderate_binomial",
            "--r", "4", "--a", "1", "--n", "3",
        )
        assert code == 0
        assert json.loads(out)["blowups"] > 0


class TestBlowupCommand:
    def test_table(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "blowup", "--family", "xy_t", "--r", "5", "--a", "2",
            "--format", "table",
        )
        assert code == 0
        assert "discrepancy 1/5" in out

    def test_explicit_weights(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "blowup", "--family", "xy_t", "--r", "5", "--a", "2",
            "--weights", "2/5", "3/5", "1/5", "1",
        )
        assert code == 0
        assert json.loads(out)["discrepancy"] == "1/5"


class TestReduceCommand:
    def test_reduce_file(self, capsys, tmp_path):
        germ = f_germ(3, 1, SparsePoly.from_dict({(2, 0): 1, (0, 3): -1}))
        path = tmp_path / "germ.json"
        path.write_text(json.dumps(germ_to_dict(germ)))
        code, out, _ = run_cli(capsys, "reduce", "--file", str(path))
        assert code == 0
        payload = json.loads(out)
        assert payload["d"] == 2
        assert payload["orders"] == [3, 3]
        assert all(payload["certificates"].values())


class TestHJCommand:
    def test_plain_expansion(self, capsys):
        code, out, _ = run_cli(capsys, "hj", "--r", "5", "--a", "2")
        assert code == 0
        assert out == "[3, 2]\n"

    def test_table(self, capsys):
        code, out, _ = run_cli(capsys, "hj", "--r", "5", "--a", "2", "--format", "table")
        assert code == 0
        assert "-3 -2" in out


class TestErrors:
    def test_domain_error_exit_1(self, capsys):
        code, out, err = run_cli(capsys, "hj", "--r", "4", "--a", "2")
        assert code == 1
        assert out == ""
        payload = json.loads(err)
        assert payload["error"] == "ExactLatticeError"

    def test_usage_error_exit_2(self, capsys):
        code, _, err = run_cli(capsys, "classify")
        assert code == 2
        assert "error:" in err

    def test_bad_file_exit_2(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, "classify", "--file", str(path))
        assert code == 2

    def test_bad_flags_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["resolve", "--format", "yaml"])
        assert exc.value.code == 2


class TestScanDeterminism:
    def test_byte_identical_runs(self, capsys):
        code1, out1, _ = run_cli(capsys, "scan", "--max-r", "8")
        code2, out2, _ = run_cli(capsys, "scan", "--max-r", "8")
        assert code1 == code2 == 0
        assert out1 == out2
        assert "1/5" in out1

    def test_out_file(self, tmp_path, capsys):
        dest = tmp_path / "scan.txt"
        code, out, _ = run_cli(capsys, "scan", "--max-r", "5", "--out", str(dest))
        assert code == 0
        assert out == ""
        assert dest.read_text().startswith("r ")

    def test_subprocess_byte_identity(self, tmp_path):
        cmd = [sys.executable, "-m", "toricflip.cli", "scan", "--max-r", "12"]
        r1 = subprocess.run(cmd, capture_output=True, check=True)
        r2 = subprocess.run(cmd, capture_output=True, check=True)
        assert r1.stdout == r2.stdout
        assert r1.stdout


class TestEntryPoint:
    def test_module_invocation(self):
        out = subprocess.run(
            [sys.executable, "-m", "toricflip.cli", "hj", "--r", "7", "--a", "3"],
            capture_output=True,
            check=True,
        )
        assert out.stdout == b"[3, 2, 2]\n"
