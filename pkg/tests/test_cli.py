import json
import math

import pytest

from cqlab import alternating, bounds
from cqlab.cli import main
from cqlab.common import INFINITE
from cqlab.labeled_graphs import TWO_LABEL, make_construction, min_critical_matching_bruteforce


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGolden:
    def test_clique_headline(self, capsys):
        code, out, _ = run(capsys, "bounds", "clique", "--delta", "1", "--ell", "3")
        assert code == 0
        assert out.strip() == "1.577350269"

    def test_gamma_upper_prints_fraction(self, capsys):
        code, out, _ = run(capsys, "gamma", "upper", "--ell", "4")
        assert code == 0
        assert out.strip() == "7/16"

    def test_beta_brute(self, capsys):
        code, out, _ = run(capsys, "beta", "brute", "--k", "1", "--x", "2")
        assert code == 0
        assert out.strip() == "0"

    def test_cvector(self, capsys):
        code, out, _ = run(capsys, "gamma", "cvector", "--ell", "4")
        assert code == 0
        assert out.strip() == "(1, 4, 2, 1) S=8"

    def test_epscheck(self, capsys):
        code, out, _ = run(capsys, "gamma", "epscheck", "--ell", "6", "--epsilon", "1/64")
        assert code == 0
        assert out.strip() == "true"


class TestThinAdapter:
    def test_clique_equals_library(self, capsys):
        code, out, _ = run(capsys, "bounds", "clique", "--delta", "1.4", "--ell", "inf")
        lib = bounds.clique_alpha_upper(bounds.CliqueBoundQuery(delta=1.4, ell=INFINITE))
        assert out.strip() == f"{lib:.9f}"

    def test_dense_json_mirrors_solution(self, capsys):
        code, out, _ = run(capsys, "bounds", "dense", "--delta", "1", "--ell", "2",
                           "--eta", "0.93")
        payload = json.loads(out)
        sol = bounds.dense_alpha_upper(bounds.DenseBoundQuery(delta=1.0, ell=2, eta=0.93))
        assert payload["alpha0"] == sol.alpha0
        assert payload["alpha1"] == sol.alpha1
        assert payload["alpha2"] == sol.alpha2
        assert payload["m1"] == sol.m1
        assert payload["case"] == sol.case

    def test_gamma_verify_matches_bruteforce(self, capsys):
        code, out, _ = run(capsys, "gamma", "verify", "--construction", "two",
                           "--n", "8", "--output", "json")
        payload = json.loads(out)
        lab = make_construction(TWO_LABEL, 8)
        _, rep = min_critical_matching_bruteforce(lab, 4)
        assert payload["critical_count"] == rep.critical_count
        assert payload["ratio"] == "2/7"

    def test_threshold(self, capsys):
        code, out, _ = run(capsys, "bounds", "threshold", "--delta", "1",
                           "--ell", "inf", "--alpha", "2")
        assert code == 0
        assert abs(float(out.strip()) - 0.98226) < 5e-5

    def test_gamma_upper_json(self, capsys):
        code, out, _ = run(capsys, "gamma", "upper", "--ell", "inf", "--output", "json")
        payload = json.loads(out)
        assert payload["bound"] == "1/2"
        assert payload["bound_float"] == 0.5


class TestTableL2:
    def test_plain_table(self, capsys):
        code, out, _ = run(capsys, "bounds", "table-l2")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 9  # header + 8 rows
        first = lines[1].split()
        assert first[0] == "0.930"
        assert first[1] == "2.411634"
        assert first[2] == "2.413270"

    def test_csv_table(self, capsys):
        code, out, _ = run(capsys, "bounds", "table-l2", "--output", "csv")
        lines = out.strip().splitlines()
        assert lines[0] == "eta,alpha1,alpha2"
        assert len(lines) == 9


class TestSweep:
    def test_csv_columns_and_stability(self, capsys, tmp_path):
        args = ["bounds", "sweep", "--delta", "1", "--ells", "inf,3",
                "--eta-from", "0.97", "--eta-to", "0.99", "--step", "0.01"]
        code, out1, _ = run(capsys, *args)
        assert code == 0
        code, out2, _ = run(capsys, *args)
        assert out1 == out2  # byte-stable
        lines = out1.strip().splitlines()
        assert lines[0] == "eta,ell,trivial,alpha0,alpha1,alpha2,m1,p_at_opt"
        # 3 grid etas x 2 ells + 2 appended eta=1 rows
        assert len(lines) == 1 + 3 * 2 + 2

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "sweep.csv"
        code, out, _ = run(capsys, "bounds", "sweep", "--delta", "1", "--ells", "2",
                           "--eta-from", "0.98", "--eta-to", "0.99", "--step", "0.01",
                           "--out", str(target), "--no-eta1")
        assert code == 0
        text = target.read_text()
        assert text.splitlines()[0].startswith("eta,ell,")
        assert "wrote" in out


class TestBetaCommands:
    def test_build_check_roundtrip(self, capsys, tmp_path):
        target = tmp_path / "k4.rbg"
        code, out, _ = run(capsys, "beta", "build", "--k", "4", "--x", "8",
                           "--out", str(target))
        assert code == 0
        g = alternating.redblue_from_text(target.read_text())
        assert out.strip() == str(len(g.blue_edges))
        code, out, _ = run(capsys, "beta", "check", str(target), "--k", "4")
        assert code == 0
        assert out.strip() == "3"  # max blue path = k - 1

    def test_check_infeasible_for_small_k(self, capsys, tmp_path):
        target = tmp_path / "k4.rbg"
        run(capsys, "beta", "build", "--k", "4", "--x", "8", "--out", str(target))
        code, out, _ = run(capsys, "beta", "check", str(target), "--k", "3")
        assert code == 1  # 3 blue edges in a path >= k = 3

    def test_check_cycle_errors(self, capsys, tmp_path):
        target = tmp_path / "cyc.rbg"
        target.write_text("2\n1 3\n2 4\n")
        code, out, err = run(capsys, "beta", "check", str(target), "--k", "5")
        assert code == 1
        assert "cycle present" in err


class TestSimulateCommand:
    def test_greedy_plain_size(self, capsys):
        code, out, _ = run(capsys, "simulate", "greedy", "--n", "256", "--delta", "1.5",
                           "--seed", "3")
        assert code == 0
        size = int(out.strip())
        assert 2 <= size <= 16

    def test_greedy_json(self, capsys):
        code, out, _ = run(capsys, "simulate", "greedy", "--n", "256", "--delta", "1.5",
                           "--seed", "3", "--output", "json")
        payload = json.loads(out)
        assert payload["is_clique"] is True
        assert payload["budget"] == math.floor(256**1.5)

    def test_amplify_flag(self, capsys):
        code, out, _ = run(capsys, "simulate", "greedy", "--n", "512", "--delta", "1.2",
                           "--seed", "3", "--amplify", "--output", "json")
        payload = json.loads(out)
        assert payload["meta"]["amplified"] is True
        assert payload["meta"]["blocks"] == round(math.log2(512))

    def test_round_limited_ell(self, capsys):
        code, out, _ = run(capsys, "simulate", "greedy", "--n", "512", "--delta", "1",
                           "--ell", "3", "--seed", "3", "--output", "json")
        payload = json.loads(out)
        assert payload["rounds_used"] == 3
        assert payload["is_clique"] is True
        assert payload["queries_used"] <= payload["budget"]

    def test_transcript_export(self, capsys, tmp_path):
        target = tmp_path / "run.csv"
        code, out, _ = run(capsys, "simulate", "greedy", "--n", "64", "--delta", "1.5",
                           "--seed", "1", "--transcript", str(target))
        assert code == 0
        lines = target.read_text().strip().splitlines()
        assert lines
        r, u, v, bit = lines[0].split(",")
        assert bit in ("0", "1")


class TestErrorPaths:
    def test_usage_error_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bounds", "clique", "--delta", "1", "--bogus-flag"])
        assert exc.value.code == 2

    def test_domain_error_exit_1(self, capsys):
        code, out, err = run(capsys, "gamma", "verify", "--construction", "four",
                             "--n", "6", "--brute-force")
        assert code == 1
        assert "too small" in err

    def test_infeasible_instance_exit_1(self, capsys):
        code, out, err = run(capsys, "beta", "brute", "--k", "2", "--x", "9")
        assert code == 1
        assert "instance too large" in err

    def test_one_label_bound_rejected(self, capsys):
        code, out, err = run(capsys, "bounds", "clique", "--delta", "1", "--ell", "1")
        assert code == 1
        assert "error:" in err
