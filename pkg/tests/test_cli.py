import json

import pytest

from gridlines.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestMoments:
    def test_hand_case_json(self, capsys):
        code, out, _ = run_cli(capsys, "moments", "--prime", "5", "--set", "list:0,1")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["moments"]["t"] == 60 and data["moments"]["q"] == 108

    def test_full_field(self, capsys):
        code, out, _ = run_cli(
            capsys, "moments", "--prime", "5", "--set", "list:0,1,2,3,4")
        assert code == EXIT_OK
        assert json.loads(out)["moments"]["t"] == 3750

    def test_invalid_set_for_prime_exits_usage(self, capsys):
        code, _, err = run_cli(
            capsys, "moments", "--prime", "7", "--set", "interval:0:9")
        assert code == EXIT_USAGE
        assert "exceeds field size" in err

    def test_bad_descriptor_names_token(self, capsys):
        code, _, err = run_cli(capsys, "moments", "--prime", "7", "--set", "list:1,q")
        assert code == EXIT_USAGE
        assert "'q'" in err

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "moments", "--prime", "5", "--set", "list:0,1",
            "--format", "csv")
        assert code == EXIT_OK
        assert out.splitlines()[0].startswith("prime,trial,seed,n,s1")

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys, "moments", "--prime", "5", "--set", "list:0,1",
            "--out", str(path))
        assert code == EXIT_OK and out == ""
        assert json.loads(path.read_text())["moments"]["t"] == 60


class TestVerify:
    def test_hand_case_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--prime", "5", "--set", "list:0,1")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["overall_pass"] and data["oracle"]["match"]

    def test_uniform_case_with_oracles(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--prime", "31", "--set", "uniform:8:7")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["oracle"]["t_brute"] == data["moments"]["t"]

    def test_injected_fault_negative_control(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--prime", "5", "--set", "list:0,1",
            "--inject-fault")
        assert code == EXIT_CHECK_FAILED
        assert json.loads(out)["overall_pass"] is False


class TestSweep:
    def test_csv_deterministic(self, capsys, tmp_path):
        argv = ["sweep", "--primes", "5,7", "--set", "uniform:2", "--trials", "2",
                "--seed", "3", "--format", "csv"]
        code1, out1, _ = run_cli(capsys, *argv)
        code2, out2, _ = run_cli(capsys, *argv)
        assert code1 == code2 == EXIT_OK
        assert out1 == out2
        assert len(out1.strip().split("\n")) == 1 + 4 + 1

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--primes", "5", "--set", "list:0,1",
            "--trials", "1")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["rows"][0]["t"] == 60 and data["all_passed"]

    def test_bad_primes_list(self, capsys):
        code, _, err = run_cli(
            capsys, "sweep", "--primes", "5,x", "--set", "list:0,1")
        assert code == EXIT_USAGE and "--primes" in err

    def test_composite_prime_rejected(self, capsys):
        code, _, err = run_cli(
            capsys, "sweep", "--primes", "9", "--set", "list:0,1")
        assert code == EXIT_USAGE and "not prime" in err


class TestSupport:
    def test_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "support", "--prime", "5", "--set", "list:0,1",
            "--format", "csv")
        assert code == EXIT_OK
        assert out.splitlines()[0] == "a1,a3,support_size,second_moment"

    def test_json_summary(self, capsys):
        code, out, _ = run_cli(
            capsys, "support", "--prime", "101", "--set", "interval:1:10")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["n"] == 10 and len(data["pairs"]) == 100


class TestUsage:
    def test_no_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == EXIT_USAGE

    def test_unknown_strategy_rejected_by_argparse(self):
        with pytest.raises(SystemExit) as exc:
            main(["moments", "--prime", "5", "--set", "list:0,1",
                  "--strategy", "quantum"])
        assert exc.value.code == EXIT_USAGE
