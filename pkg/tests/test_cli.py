import json
import math
import os

import pytest

from banditlab.cli import dispatch

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestHardness:
    def test_closed_form(self, capsys):
        code, out, _ = run(capsys, "hardness", "--means", "0.5,0.45")
        assert code == 0
        assert "delta=0.05" in out
        assert "H1=20" in out
        assert "H2=400" in out

    def test_rank_weighted(self, capsys):
        code, out, _ = run(capsys, "hardness", "--means", "0.9,0.8,0.7", "--p", "1.0")
        assert code == 0
        assert "Hp_prime=200" in out

    def test_tied_top_is_domain_error(self, capsys):
        code, _, err = run(capsys, "hardness", "--means", "0.5,0.5")
        assert code == 1
        assert "error:" in err


class TestGammaInterval:
    def test_table_row(self, capsys, tmp_path):
        out_prefix = str(tmp_path / "gi")
        code, out, _ = run(
            capsys,
            "gamma-interval",
            "--L", "256", "--delta", "0.05", "--beta", "e",
            "--T", "1e6", "--h2-bar", "102000",
            "--out", out_prefix,
        )
        assert code == 0
        assert "(empty)" in out
        assert "hi=1.38155e-05" in out
        with open(out_prefix + ".csv") as fh:
            header = fh.readline().strip()
        assert header == "T,lo,hi,empty"
        assert os.path.exists(out_prefix + ".meta.json")

    def test_bad_beta_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(capsys, "gamma-interval", "--L", "2", "--delta", "0.1",
                "--beta", "nope", "--T", "1e6")
        assert exc.value.code == 2


class TestBounds:
    def test_ucbe_failure_value(self, capsys):
        code, out, _ = run(
            capsys, "bounds", "--kind", "ucbe_failure",
            "--L", "2", "--T", "1e4", "--alpha", "13",
        )
        assert code == 0
        assert "ucbe_failure=2.76732" in out
        assert "(vacuous)" in out

    def test_multiple_kinds_csv(self, capsys, tmp_path):
        out_prefix = str(tmp_path / "b")
        code, out, _ = run(
            capsys, "bounds", "--kind", "carpentier_lower,b1",
            "--L", "64", "--T", "1e5", "--h2", "25200",
            "--delta-lower", "0.05", "--reward-range", "1.0", "--phi", "1.0",
            "--out", out_prefix,
        )
        assert code == 0
        assert "carpentier_lower=" in out
        assert "b1=" in out
        with open(out_prefix + ".csv") as fh:
            rows = fh.read().strip().splitlines()
        assert rows[0] == "kind,value,vacuous,condition_ok"
        assert len(rows) == 3

    def test_missing_input_is_domain_error(self, capsys):
        code, _, err = run(capsys, "bounds", "--kind", "ucbe_failure")
        assert code == 1
        assert "error:" in err


class TestSimulate:
    def test_shorthand_instance(self, capsys, tmp_path):
        out_prefix = str(tmp_path / "sim")
        code, out, _ = run(
            capsys, "simulate", "--algo", "ucbe", "--a", "10",
            "--instance", "bern:L=4,delta=0.2",
            "--T", "200", "--trials", "3", "--seed", "1",
            "--out", out_prefix,
        )
        assert code == 0
        assert "mean_regret=" in out
        assert os.path.exists(out_prefix + ".trials.csv")
        assert os.path.exists(out_prefix + ".agg.csv")
        with open(out_prefix + ".meta.json") as fh:
            meta = json.load(fh)
        assert meta["algorithm"] == "ucbe"
        assert meta["trials"] == 3

    def test_byte_identical_reruns(self, capsys, tmp_path):
        argv = [
            "simulate", "--algo", "bobw", "--gamma", "0.01",
            "--instance", "bern:L=4,delta=0.2",
            "--T", "200", "--trials", "3",
        ]
        bodies = []
        for name in ("x", "y"):
            prefix = str(tmp_path / name)
            code, _, _ = run(capsys, *argv, "--out", prefix)
            assert code == 0
            with open(prefix + ".trials.csv", "rb") as fh:
                bodies.append(fh.read())
        assert bodies[0] == bodies[1]

    def test_missing_algo_param(self, capsys):
        code, _, err = run(
            capsys, "simulate", "--algo", "bobw",
            "--instance", "bern:L=4,delta=0.2", "--T", "100", "--trials", "1",
        )
        assert code == 1
        assert "--gamma is required" in err

    def test_bad_shorthand(self, capsys):
        code, _, err = run(
            capsys, "simulate", "--algo", "sh",
            "--instance", "bern:L=4,spread=0.2", "--T", "100", "--trials", "1",
        )
        assert code == 1
        assert "error:" in err

    def test_ucbalpha_fixed_confidence(self, capsys):
        code, out, _ = run(
            capsys, "simulate", "--algo", "ucbalpha", "--alpha", "2",
            "--conf-delta", "0.05", "--instance", "bern:L=2,delta=0.4",
            "--T", "100", "--cap", "3000", "--trials", "2",
        )
        assert code == 0
        assert "mean_stop_time=" in out

    def test_smoke_run_low_failure(self, capsys):
        code, out, _ = run(
            capsys, "simulate", "--algo", "bobw", "--gamma", "0.9",
            "--instance", "bern:L=8,delta=0.1",
            "--T", "20000", "--trials", "200", "--seed", "7",
        )
        assert code == 0
        failure = float(out.split("failure_probability=")[1].split()[0])
        assert failure <= 0.05

    def test_json_instance_file(self, capsys, tmp_path):
        from banditlab import bernoulli_line, save_instance

        path = str(tmp_path / "inst.json")
        save_instance(bernoulli_line(3, 0.3), path)
        code, out, _ = run(
            capsys, "simulate", "--algo", "sh", "--instance", path,
            "--T", "120", "--trials", "2",
        )
        assert code == 0


class TestPareto:
    def test_sweep_output(self, capsys):
        code, out, _ = run(
            capsys, "pareto", "--gammas", "1e-4,1e-2",
            "--instance", "bern:L=4,delta=0.2", "--T", "200", "--trials", "3",
        )
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith("gamma=")]
        assert len(lines) == 2
        assert lines[0].startswith("gamma=0.0001 ")

    def test_unsorted_grid(self, capsys):
        code, _, err = run(
            capsys, "pareto", "--gammas", "1e-2,1e-4",
            "--instance", "bern:L=4,delta=0.2", "--T", "200", "--trials", "2",
        )
        assert code == 1


class TestLowerBound:
    def test_bern_family_files(self, capsys, tmp_path):
        out_prefix = str(tmp_path / "fam")
        code, out, _ = run(
            capsys, "lower-bound", "--family", "bern", "--L", "3",
            "--d", "0.1,0.2", "--out", out_prefix,
        )
        assert code == 0
        assert "wrote 3 instance spec files" in out
        from banditlab import gap_profile, load_instance

        for k in (1, 2, 3):
            inst = load_instance(f"{out_prefix}.instance{k}.json")
            assert gap_profile(inst).optimal_arm == k - 1

    def test_adversarial_table(self, capsys, tmp_path):
        out_prefix = str(tmp_path / "adv")
        code, out, _ = run(
            capsys, "lower-bound", "--family", "adv", "--L", "4",
            "--T", "200", "--eps", "0.1", "--sigma", "0.333",
            "--instance-index", "2", "--out", out_prefix,
        )
        assert code == 0
        assert "empirical optimum arm 1" in out
        from banditlab import load_adversarial_csv

        table = load_adversarial_csv(out_prefix + ".table.csv")
        assert table.T == 200
        assert table.n_arms == 4


class TestDataset:
    def test_movielens(self, capsys, tmp_path):
        out_prefix = str(tmp_path / "ml")
        code, out, _ = run(
            capsys, "dataset", "--source", "movielens",
            "--path", os.path.join(FIXTURES, "ratings_small.csv"),
            "--min-ratings", "2", "--out", out_prefix,
        )
        assert code == 0
        assert "L=2" in out
        from banditlab import load_instance

        inst = load_instance(out_prefix + ".instance.json")
        assert inst.arms[0].mean == pytest.approx(4.5)

    def test_pkis2(self, capsys, tmp_path):
        out_prefix = str(tmp_path / "pk")
        code, out, _ = run(
            capsys, "dataset", "--source", "pkis2",
            "--path", os.path.join(FIXTURES, "pkis2_small.csv"),
            "--kinase", "KIT", "--out", out_prefix,
        )
        assert code == 0
        assert "L=4" in out
        from banditlab import load_instance

        inst = load_instance(out_prefix + ".instance.json")
        assert inst.arms[1].log_mean == pytest.approx(0.0)

    def test_missing_kinase_flag(self, capsys):
        code, _, err = run(
            capsys, "dataset", "--source", "pkis2",
            "--path", os.path.join(FIXTURES, "pkis2_small.csv"),
            "--out", "/tmp/should-not-exist",
        )
        assert code == 1
        assert "--kinase is required" in err

    def test_unknown_kinase_exit_code(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "dataset", "--source", "pkis2",
            "--path", os.path.join(FIXTURES, "pkis2_small.csv"),
            "--kinase", "NOPE", "--out", str(tmp_path / "pk"),
        )
        assert code == 1


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            dispatch(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            dispatch(["hardness"])
        assert exc.value.code == 2
