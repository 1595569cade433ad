"""Tests for the command-line front end."""

import json
from fractions import Fraction

import pytest

from src.generators import gen_flip_sequence, gen_randomized_gap
from src.main import EXIT_FINDING, EXIT_OK, EXIT_USAGE, run_command
from src.services.instance_io import load_instance, parse_instance, write_instance


@pytest.fixture
def flip_file(tmp_path):
    path = tmp_path / "flip.json"
    write_instance(gen_flip_sequence(2, Fraction(1, 100), 0), path)
    return path


@pytest.fixture
def gap_file(tmp_path):
    path = tmp_path / "gap.json"
    write_instance(gen_randomized_gap(3, Fraction(1, 1000), "I"), path)
    return path


def run_json(capsys, argv):
    status = run_command(argv)
    return status, json.loads(capsys.readouterr().out)


class TestEval:
    def test_general_on_randomized_gap(self, capsys, gap_file):
        status, out = run_json(capsys, ["eval", "--mech", "general", "--instance", str(gap_file)])
        assert status == EXIT_OK
        assert out["case"]["tag"] == "single_location"
        assert [atom["facility"] for atom in out["lottery"]] == [1, 2, 3]
        assert all(atom["probability"]["exact"] == "1/3" for atom in out["lottery"])
        assert all(atom["location"]["exact"] == "1" for atom in out["lottery"])
        assert out["expected_welfare"]["exact"] == "1/1000"

    def test_theta_reports_its_case(self, capsys, flip_file):
        status, out = run_json(
            capsys, ["eval", "--mech", "theta", "--theta", "1/2", "--instance", str(flip_file)]
        )
        assert status == EXIT_OK
        assert out["theta"]["exact"] == "1/2"
        assert out["case"]["tag"] == "two_sides"


class TestOpt:
    def test_flip_instance(self, capsys, flip_file):
        status, out = run_json(capsys, ["opt", "--instance", str(flip_file)])
        assert status == EXIT_OK
        assert out["best"]["facility"] == 1
        assert out["best"]["location"]["exact"] == "0"
        assert out["opt_welfare"]["exact"] == "3"
        assert [row["welfare"]["exact"] for row in out["full_table"]] == ["3", "2", "2", "3"]


class TestAudit:
    def test_minisum_is_clean(self, capsys, flip_file):
        status, out = run_json(capsys, ["audit", "--mech", "minisum", "--instance", str(flip_file)])
        assert status == EXIT_OK
        assert out["preferences"]["deviations"] == []
        assert out["preferences"]["deviations_checked"] == 18

    def test_opt_is_caught(self, capsys, flip_file):
        status, out = run_json(capsys, ["audit", "--mech", "opt", "--instance", str(flip_file)])
        assert status == EXIT_FINDING
        gains = {d["gain"]["exact"] for d in out["preferences"]["deviations"]}
        assert gains == {"1/50"}
        assert out["preferences"]["deviations"][0]["misreport"] == {
            "type": "preferences",
            "approvals": [0, 1],
        }

    def test_positions_and_joint(self, capsys, gap_file):
        status, out = run_json(
            capsys,
            ["audit", "--mech", "general", "--instance", str(gap_file),
             "--positions", "--joint", "--denom", "4", "--budget", "50"],
        )
        assert status == EXIT_OK
        assert out["positions"]["outcome_invariant"] is True
        assert out["joint"]["budget"] == 50


class TestSweep:
    ARGS = ["sweep", "--seed", "3", "--count", "15", "--skip-audit"]

    def test_deterministic_output(self, capsys):
        assert run_command(self.ARGS) == EXIT_OK
        first = capsys.readouterr().out
        assert run_command(self.ARGS + ["--workers", "3"]) == EXIT_OK
        assert capsys.readouterr().out == first

    def test_report_fields(self, capsys):
        status, out = run_json(capsys, self.ARGS)
        assert status == EXIT_OK
        assert out["instances"] == 15
        assert out["spec"]["seed"] == 3
        assert out["spec"]["approval_model"] == "nonempty"
        assert [m["mechanism"] for m in out["mechanisms"]] == ["general", "theta", "minisum"]
        assert all(m["bound_satisfied"] for m in out["mechanisms"])
        assert out["mechanisms"][0]["max_ratio"] is not None
        assert out["mechanisms"][0]["argmax_instance"]["version"] == 1

    def test_spec_file(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"k_range": [2, 2], "approval_model": "single"}), encoding="utf-8")
        status, out = run_json(capsys, self.ARGS + ["--spec", str(spec)])
        assert status == EXIT_OK
        assert out["spec"]["k_range"] == [2, 2]

    def test_grid_family(self, capsys):
        status, out = run_json(
            capsys, ["sweep", "--family", "grid", "--n-max", "1", "--denom", "2", "--mechs", "general"]
        )
        assert status == EXIT_OK
        assert out["spec"]["family"] == "grid"
        # 6 candidate sets on {0, 1/2, 1} x 9 agent types
        assert out["instances"] == 54


class TestGen:
    def test_single_instance_to_stdout(self, capsys):
        status = run_command(["gen", "--family", "flip-sequence", "--eps", "1/10", "--step", "2"])
        assert status == EXIT_OK
        inst = parse_instance(capsys.readouterr().out)
        assert inst == gen_flip_sequence(2, Fraction(1, 10), 2)

    def test_short_family_names(self, capsys):
        assert run_command(["gen", "--family", "thm6", "--eps", "1/100"]) == EXIT_OK
        assert parse_instance(capsys.readouterr().out) == gen_flip_sequence(2, Fraction(1, 100), 0)
        assert run_command(["gen", "--family", "thm2", "--k", "3", "--variant", "J"]) == EXIT_OK
        assert parse_instance(capsys.readouterr().out) == gen_randomized_gap(3, Fraction(1, 100), "J")

    def test_stream_to_directory(self, tmp_path):
        out = tmp_path / "random"
        status = run_command(["gen", "--family", "random", "--count", "5", "--out", str(out)])
        assert status == EXIT_OK
        files = sorted(out.iterdir())
        assert len(files) == 5
        load_instance(files[0])

    def test_stream_requires_out(self):
        assert run_command(["gen", "--family", "grid"]) == EXIT_USAGE


class TestBounds:
    def test_half(self, capsys):
        status, out = run_json(capsys, ["bounds", "--theta", "1/2"])
        assert status == EXIT_OK
        assert out["ratio_bound"]["exact"] == "5/2"

    def test_default(self, capsys):
        status, out = run_json(capsys, ["bounds"])
        assert status == EXIT_OK
        assert out["ratio_bound"]["exact"] == "100/43"

    def test_zero_is_rejected(self):
        assert run_command(["bounds", "--theta", "0"]) == EXIT_USAGE


class TestErrors:
    def test_unknown_subcommand(self):
        assert run_command(["plot"]) == EXIT_USAGE

    def test_huge_exponent_argument(self):
        assert run_command(["bounds", "--theta", "4e-999999999"]) == EXIT_USAGE

    def test_unknown_mechanism(self, gap_file):
        assert run_command(["eval", "--mech", "median", "--instance", str(gap_file)]) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        assert run_command(["opt", "--instance", str(tmp_path / "nope.json")]) == EXIT_USAGE

    def test_invalid_instance(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"k": 2, "candidates": ["1/3", "1/3"], "agents": []}), encoding="utf-8")
        assert run_command(["opt", "--instance", str(path)]) == EXIT_USAGE

    def test_help(self):
        assert run_command(["--help"]) == EXIT_OK
