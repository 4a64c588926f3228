import csv

import pytest

import bqp
from bqp.cli import gap, main


@pytest.fixture
def e1_file(tmp_path, e1):
    path = tmp_path / "e1.bqp"
    path.write_text(bqp.write_instance(e1))
    return path


class TestGap:
    def test_zero_at_best(self):
        assert gap(200, 200) == 0.0

    def test_trivial_solution_full_gap(self):
        assert gap(0, 200) == 100.0

    def test_negative_objective_exceeds_hundred(self):
        assert gap(-200, 200) == 200.0

    def test_undefined_for_nonpositive_best(self):
        assert gap(5, 0) is None
        assert gap(5, -3) is None


class TestGen:
    def test_matrixfact_file(self, tmp_path):
        out = tmp_path / "mf.bqp"
        assert main(["gen", "matrixfact", "4", "4", "--seed", "7", "--out", str(out)]) == 0
        inst = bqp.read_instance(out.read_text())
        assert set(abs(inst.Q).flatten().tolist()) == {1}

    def test_repeated_call_identical_bytes(self, tmp_path):
        a = tmp_path / "a.bqp"
        b = tmp_path / "b.bqp"
        main(["gen", "random", "5", "6", "--seed", "3", "--out", str(a)])
        main(["gen", "random", "5", "6", "--seed", "3", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_invalid_family_exits_nonzero(self, tmp_path, capsys):
        with pytest.raises(SystemExit):  # argparse rejects the choice
            main(["gen", "nope", "3", "3", "--out", str(tmp_path / "x.bqp")])


class TestSolve:
    def test_greedy_objective(self, e1_file, capsys):
        assert main(["solve", str(e1_file), "--alg", "G"]) == 0
        out = capsys.readouterr().out
        assert "objective:  2" in out

    def test_trivial_objective(self, e1_file, capsys):
        assert main(["solve", str(e1_file), "--alg", "T"]) == 0
        assert "objective:  0" in capsys.readouterr().out

    def test_portions_needs_budget(self, e1_file, capsys):
        assert main(["solve", str(e1_file), "--alg", "P2"]) == 1
        assert "budget" in capsys.readouterr().err

    def test_portions_with_budget_finds_optimum(self, e1_file, capsys):
        assert main(["solve", str(e1_file), "--alg", "P2", "--iters", "1"]) == 0
        assert "objective:  3" in capsys.readouterr().out

    def test_writes_certificate(self, e1_file, tmp_path, e1):
        sol_path = tmp_path / "g.bqpsol"
        assert main(["solve", str(e1_file), "--alg", "G", "--out", str(sol_path)]) == 0
        _, _, sol = bqp.read_solution(sol_path.read_text(), e1)
        assert sol.objective == 2

    def test_bad_expression(self, e1_file, capsys):
        assert main(["solve", str(e1_file), "--alg", "Zz"]) == 1

    def test_missing_file(self, capsys):
        assert main(["solve", "no/such/file.bqp", "--alg", "G"]) == 1


class TestExactCommand:
    def test_reports_optimum(self, e1_file, capsys):
        assert main(["exact", str(e1_file)]) == 0
        assert "optimum:   3" in capsys.readouterr().out


class TestExportCommands:
    def test_export_lp(self, e1_file, tmp_path):
        out = tmp_path / "e1.lp"
        assert main(["export-lp", str(e1_file), "--out", str(out)]) == 0
        assert "Maximize" in out.read_text()

    def test_export_lp_warm_start(self, e1_file, tmp_path):
        out = tmp_path / "e1.lp"
        assert main(["export-lp", str(e1_file), "--warm-start", "--out", str(out)]) == 0
        assert "\\ start x_1 1" in out.read_text()

    def test_export_qubo(self, e1_file, tmp_path):
        out = tmp_path / "e1.qubo"
        assert main(["export-qubo", str(e1_file), "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "4 7"


class TestVerifyCommand:
    def test_good_certificate(self, e1_file, tmp_path, e1, capsys):
        sol_path = tmp_path / "g.bqpsol"
        sol_path.write_text(bqp.write_solution(bqp.greedy(e1), e1))
        assert main(["verify", str(e1_file), str(sol_path)]) == 0
        assert "OK" in capsys.readouterr().out

    def test_tampered_certificate(self, e1_file, tmp_path, e1, capsys):
        sol_path = tmp_path / "bad.bqpsol"
        sol_path.write_text(bqp.write_solution(bqp.greedy(e1), e1).replace("objective 2", "objective 9"))
        assert main(["verify", str(e1_file), str(sol_path)]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_store_verification(self, e1_file, tmp_path, e1, capsys):
        store_path = tmp_path / "best.jsonl"
        bqp.BestKnownStore(store_path).update(e1, bqp.greedy(e1), algorithm="G")
        assert main(["verify", str(e1_file), "--store", str(store_path)]) == 0
        assert "store best 2" in capsys.readouterr().out


class TestBenchCommand:
    def test_trivial_gap_is_full(self, e1_file, tmp_path, capsys):
        csv_path = tmp_path / "rows.csv"
        code = main(
            [
                "bench",
                "--instances",
                str(e1_file),
                "--algs",
                "T,G",
                "--repetitions",
                "1",
                "--seed",
                "5",
                "--csv",
                str(csv_path),
            ]
        )
        assert code == 0
        rows = list(csv.DictReader(csv_path.open()))
        by_alg = {r["alg"]: r for r in rows}
        # session best is greedy's 2, so T shows the full gap
        assert by_alg["T"]["gap_pct"] == "100.0000"
        assert by_alg["G"]["gap_pct"] == "0.0000"

    def test_deterministic_rows_excluding_time(self, e1_file, tmp_path):
        def run(name):
            path = tmp_path / name
            main(
                [
                    "bench",
                    "--instances",
                    str(e1_file),
                    "--algs",
                    "M(Vex1),P2",
                    "--iters",
                    "5",
                    "--repetitions",
                    "2",
                    "--seed",
                    "9",
                    "--csv",
                    str(path),
                ]
            )
            rows = list(csv.DictReader(path.open()))
            for r in rows:
                r.pop("time_ms")
            return rows

        assert run("a.csv") == run("b.csv")

    def test_store_updated_only_on_improvement(self, e1_file, tmp_path, e1):
        store_path = tmp_path / "best.jsonl"
        args = [
            "bench",
            "--instances",
            str(e1_file),
            "--algs",
            "G",
            "--repetitions",
            "1",
            "--seed",
            "1",
            "--store",
            str(store_path),
        ]
        assert main(args) == 0
        first = store_path.read_text()
        assert main(args) == 0
        assert store_path.read_text() == first  # greedy never beats the stored 2
        assert bqp.BestKnownStore(store_path).best_objective(e1) == 2

    def test_equal_time_reference_policy(self, e1_file, tmp_path, capsys):
        code = main(
            [
                "bench",
                "--instances",
                str(e1_file),
                "--algs",
                "M(A)",
                "--ref",
                "Vex2",
                "--repetitions",
                "1",
                "--seed",
                "2",
            ]
        )
        assert code == 0
        table = capsys.readouterr().out
        assert "Vex2" in table and "M(A)" in table
