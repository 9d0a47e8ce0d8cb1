"""CLI front door: subcommands, exit codes, report round-trips."""

import csv
import json

import numpy as np
import pytest

from projlab.cli import main
from projlab.linalg import save_matrix_csv
from projlab.suites import run_all
from projlab.randgen import Seed, parse_distribution


def _load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


class TestVerifyCommand:
    def test_clean_run_exits_zero(self, tmp_path):
        out = tmp_path / "verify.json"
        code = main(["verify", "--M", "8", "--r", "2", "--dist", "gaussian:1.0",
                     "--trials", "100", "--seed", "42", "--out", str(out)])
        assert code == 0
        payload = _load(out)
        assert payload["results"]["violations"] == 0
        assert payload["manifest"]["outcome"] == "pass"
        names = {s["name"] for s in payload["results"]["suites"]}
        assert names == {"prop1", "lemma1", "lemma2", "decomposition", "sandwich"}

    def test_suite_battery_clean_across_dists(self):
        for spec in ("rademacher:1.0", "student-t:5:1.0"):
            results = run_all(6, 2, parse_distribution(spec), 25, Seed(7))
            assert all(s.passed for s in results)


class TestSimulateCommand:
    def test_report_contains_bound_value(self, tmp_path):
        out = tmp_path / "report.json"
        code = main(["simulate", "--C", "diag:2,1,0,0", "--M", "4", "--r", "1",
                     "--dist", "gaussian:1.0", "--reps", "200", "--seed", "1",
                     "--out", str(out)])
        assert code == 0
        payload = _load(out)
        assert payload["results"]["bounds"]["thm3_value"] == pytest.approx(
            10.928203230275509
        )
        assert payload["results"]["bounds"]["thm1_gaussian"] == pytest.approx(6.0)
        est = payload["results"]["estimates"]["z_sup"]
        assert est["n"] == 200 and est["stderr"] > 0

    def test_round_trip_bitwise(self, tmp_path):
        args = ["simulate", "--C", "diag:2,1", "--M", "4", "--r", "1",
                "--dist", "rademacher:1.0", "--reps", "50", "--seed", "9"]
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert _load(out1)["results"] == _load(out2)["results"]

    def test_csv_and_json_values_identical(self, tmp_path):
        args = ["simulate", "--C", "diag:2,1", "--M", "4", "--r", "1",
                "--dist", "gaussian:1.0", "--reps", "40", "--seed", "2"]
        jpath, cpath = tmp_path / "r.json", tmp_path / "r.csv"
        assert main(args + ["--out", str(jpath)]) == 0
        assert main(args + ["--format", "csv", "--out", str(cpath)]) == 0
        payload = _load(jpath)["results"]
        with open(cpath, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        by_stat = {row["statistic"]: row for row in rows}
        for name, est in payload["estimates"].items():
            assert float(by_stat[name]["mean"]) == est["mean"]
            assert float(by_stat[name]["stderr"]) == est["stderr"]
        for name, value in payload["bounds"].items():
            cell = by_stat[f"bound:{name}"]["value"]
            if value == "inf":
                assert cell == "inf"
            elif isinstance(value, float):
                assert float(cell) == value

    def test_infinite_bounds_serialized_as_inf(self, tmp_path):
        out = tmp_path / "inf.json"
        # equal spectrum: spectral tie makes II infinite
        code = main(["simulate", "--C", "diag:2,2", "--M", "4", "--r", "1",
                     "--dist", "gaussian:1.0", "--reps", "20", "--seed", "3",
                     "--out", str(out)])
        assert code == 0
        assert _load(out)["results"]["bounds"]["II"] == "inf"


class TestSweepCommand:
    def test_table_sorted_with_max_ratio(self, tmp_path):
        out = tmp_path / "sweep.json"
        code = main(["sweep", "--M", "8,4", "--r", "1", "--C", "zero",
                     "--C", "diag:2,1", "--dist", "gaussian:1.0", "--reps", "30",
                     "--seed", "4", "--out", str(out)])
        assert code == 0
        payload = _load(out)["results"]
        ms = [row["config"]["M"] for row in payload["rows"]]
        assert ms == sorted(ms)
        assert payload["max_ratio"] == max(row["ratio"] for row in payload["rows"])

    def test_invalid_grid_is_usage_error(self):
        assert main(["sweep", "--M", "4", "--r", "4", "--reps", "10"]) == 2


class TestLocalizeCommand:
    def test_contained_run(self, tmp_path):
        out = tmp_path / "loc.json"
        code = main(["localize", "--lambda1", "3.0", "--M", "128", "--seeds", "8",
                     "--seed", "6", "--out", str(out)])
        assert code == 0
        payload = _load(out)["results"]
        assert payload["violations"] == 0
        assert len(payload["records"]) == 8


class TestRankSelectCommand:
    def test_prints_rank(self, tmp_path, capsys):
        path = tmp_path / "c.csv"
        save_matrix_csv(path, np.diag([3.0, 2.0, 1.0, 0.0]))
        code = main(["rank-select", "--in", str(path), "--alpha", "1.0",
                     "--sigma", "0", "--out", str(tmp_path / "rank.json")])
        assert code == 0
        assert capsys.readouterr().out.strip() == "3"

    def test_no_detectable_signal(self, tmp_path, capsys):
        path = tmp_path / "c.csv"
        save_matrix_csv(path, 0.01 * np.eye(4))
        code = main(["rank-select", "--in", str(path), "--alpha", "0.9",
                     "--sigma", "10", "--out", str(tmp_path / "rank.json")])
        assert code == 0
        assert "no detectable signal" in capsys.readouterr().out


class TestSllnCommand:
    def test_csv_rows(self, tmp_path):
        out = tmp_path / "slln.csv"
        code = main(["slln", "--u-rule", "finite:1", "--M-grid", "32,64",
                     "--seeds", "2", "--seed", "8", "--format", "csv",
                     "--out", str(out)])
        assert code == 0
        with open(out, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4
        assert {row["statistic"] for row in rows} == {"Z_M"}
        assert {row["M"] for row in rows} == {"32", "64"}

    def test_rfc4180_line_endings(self, tmp_path):
        out = tmp_path / "slln.csv"
        main(["slln", "--M-grid", "16", "--seeds", "1", "--format", "csv",
              "--out", str(out)])
        assert b"\r\n" in out.read_bytes()


class TestUsageErrors:
    def test_unknown_flag_exits_two(self):
        with pytest.raises(SystemExit) as info:
            main(["simulate", "--M", "4", "--r", "1", "--bogus"])
        assert info.value.code == 2

    def test_missing_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2

    def test_invalid_input_exits_two(self, capsys):
        assert main(["simulate", "--M", "4", "--r", "1", "--dist", "cauchy:1"]) == 2
        assert "invalid input" in capsys.readouterr().err
