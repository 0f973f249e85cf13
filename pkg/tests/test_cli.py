"""Command-line surface: subcommands, config files, exit codes, outputs."""

import json

import pytest

from agreelab.cli import main


def run_cli(*argv):
    return main(list(argv))


class TestScenarioList:
    def test_lists_all_families(self, capsys):
        assert run_cli("scenario", "list") == 0
        out = capsys.readouterr().out
        for name in ("parity", "iid_binary", "senate", "geometric_tail"):
            assert name in out


class TestBound:
    def test_plain_bounds(self, capsys):
        assert run_cli("bound", "--n", "100", "--param", "D=8") == 0
        out = capsys.readouterr().out
        assert "n,D,var_bound,action_bound,qn_bound" in out
        assert "100,8.0,0.07407407407407407,0.7037037037037037," in out

    def test_scenario_bounds_include_qn(self, capsys):
        code = run_cli(
            "bound",
            "--scenario", "geometric_tail",
            "--param", "K=6",
            "--param", "ratio=7/10",
            "--n", "100",
            "--eps-grid", "1e-6:0.5:128",
        )
        assert code == 0
        out = capsys.readouterr().out
        last = out.strip().splitlines()[-1]
        assert last.count(",") == 4
        assert last.split(",")[4] != ""

    def test_missing_parameters_is_usage_error(self, capsys):
        assert run_cli("bound", "--n", "10") == 1


class TestSimulate:
    def test_text_output(self, capsys):
        code = run_cli(
            "simulate", "--scenario", "parity", "--n", "3",
            "--protocol", "public-belief", "--trials", "500", "--seed", "7",
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "parity(3)" in out
        assert "ties=500" in out

    def test_json_output(self, tmp_path):
        out_file = tmp_path / "run.json"
        code = run_cli(
            "simulate", "--scenario", "iid_binary", "--param", "p=2/3",
            "--n", "10", "--trials", "200", "--seed", "3",
            "--format", "json", "--out", str(out_file),
        )
        assert code == 0
        data = json.loads(out_file.read_text())
        assert data["trials"] == 200
        assert data["n"] == 10

    def test_budget_exit_code(self):
        code = run_cli(
            "simulate", "--scenario", "iid_binary", "--param", "p=2/3",
            "--n", "40", "--protocol", "public-belief", "--trials", "10",
        )
        assert code == 3

    def test_missing_scenario_is_usage_error(self):
        assert run_cli("simulate", "--trials", "10") == 1

    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("simulate", "--bogus")
        assert excinfo.value.code == 1


class TestSweep:
    def test_csv_written(self, tmp_path):
        out_file = tmp_path / "sweep.csv"
        code = run_cli(
            "sweep", "--scenario", "iid_binary", "--param", "p=2/3",
            "--n", "10,20", "--trials", "300", "--seed", "5",
            "--format", "csv", "--out", str(out_file),
        )
        assert code == 0
        text = out_file.read_text()
        lines = text.splitlines()
        assert lines[0].startswith("# generator=")
        assert lines[1].startswith("n,trials,")
        assert len(lines) == 4
        assert text.endswith("\n")
        assert "\r" not in text

    def test_byte_identical_reruns(self, tmp_path):
        args = (
            "sweep", "--scenario", "uncorrelated_tight", "--n", "8,16",
            "--trials", "400", "--seed", "21", "--format", "csv",
        )
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        assert run_cli(*args, "--out", str(first)) == 0
        assert run_cli(*args, "--out", str(second)) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps(
                {
                    "scenario": "iid_binary",
                    "params": {"p": "2/3"},
                    "n": [10],
                    "trials": 100,
                    "seed": 1,
                    "format": "json",
                }
            )
        )
        out_file = tmp_path / "sweep.json"
        code = run_cli(
            "sweep", "--config", str(config), "--seed", "2", "--out", str(out_file)
        )
        assert code == 0
        data = json.loads(out_file.read_text())
        assert data["seed"] == 2  # flag wins over the config value
        assert data["rows"][0]["summary"]["trials"] == 100


class TestVerify:
    def test_verify_passes_and_writes_report(self, tmp_path, capsys):
        out_file = tmp_path / "report.json"
        code = run_cli(
            "verify", "--seed", "13", "--trials", "2000",
            "--format", "json", "--out", str(out_file),
        )
        assert code == 0
        data = json.loads(out_file.read_text())
        names = {c["name"] for c in data["checks"]}
        assert any(n.startswith("belief-agreement") for n in names)
        assert any(n.startswith("wrong-action-bound") for n in names)
        assert any(n.startswith("estimator-deviation-variance") for n in names)
        assert any(n.startswith("tail-learning-bound") for n in names)


class TestCsvQuoting:
    def test_fields_with_commas_stay_one_column(self, tmp_path):
        import csv

        out_file = tmp_path / "report.csv"
        code = run_cli(
            "verify", "--seed", "13", "--trials", "1500",
            "--format", "csv", "--out", str(out_file),
        )
        assert code == 0
        body = out_file.read_text().split("\n", 1)[1]
        rows = [r for r in csv.reader(body.splitlines()) if r]
        assert {len(r) for r in rows} == {7}

    def test_simulate_scenario_name_roundtrips(self, tmp_path):
        import csv

        out_file = tmp_path / "run.csv"
        code = run_cli(
            "simulate", "--scenario", "iid_binary", "--param", "p=2/3",
            "--n", "10", "--trials", "50", "--seed", "1",
            "--format", "csv", "--out", str(out_file),
        )
        assert code == 0
        body = out_file.read_text().split("\n", 1)[1]
        rows = list(csv.reader(body.splitlines()))
        assert rows[1][0] == "iid_binary(10, 2/3)"
