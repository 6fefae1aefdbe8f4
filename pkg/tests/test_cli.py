"""Command-line interface: output formats, reproducibility, exit codes."""

import json
from fractions import Fraction

import pytest

from gaussmoments import moments as M
from gaussmoments.cli import main
from gaussmoments.rng import SplitMix64
from util import rand_mixture

P31 = 2 ** 31 - 1


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_params(tmp_path, params, name="params.json"):
    path = tmp_path / name
    path.write_text(json.dumps(M.mixture_params_to_json(params)))
    return str(path)


def write_moments(tmp_path, mv, name="moments.json"):
    path = tmp_path / name
    path.write_text(json.dumps(M.moment_vector_to_json(mv)))
    return str(path)


class TestMoments:
    def test_standard_normal_values(self, capsys, tmp_path):
        p = M.MixtureParams(
            (M.GaussianParams((Fraction(0),), (Fraction(1),)),),
            (Fraction(1),))
        code, out, _ = run(capsys, "moments", "--params",
                           write_params(tmp_path, p), "--d", "6")
        assert code == 0
        data = json.loads(out)
        assert [v["num"] for v in data["values"]] == [1, 0, 1, 0, 3, 0, 15]

    def test_empty_components_is_domain_error(self, capsys, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text(json.dumps({"n": 1, "k": 0, "components": []}))
        code, _, err = run(capsys, "moments", "--params", str(path), "--d", "3")
        assert code == 1
        assert "empty components" in err

    def test_dimension_check(self, capsys, tmp_path):
        rng = SplitMix64(1)
        p = rand_mixture(rng, 2, 2)
        code, _, err = run(capsys, "moments", "--params",
                           write_params(tmp_path, p), "--d", "3", "--n", "5")
        assert code == 1 and "n=2" in err


class TestCumulants:
    def test_from_params(self, capsys, tmp_path):
        p = M.MixtureParams(
            (M.GaussianParams((Fraction(2),), (Fraction(3),)),),
            (Fraction(1),))
        code, out, _ = run(capsys, "cumulants", "--params",
                           write_params(tmp_path, p), "--d", "4")
        assert code == 0
        vals = {tuple(v["idx"]): Fraction(v["num"], v["den"])
                for v in json.loads(out)["values"]}
        assert vals == {(1,): 2, (2,): 3, (3,): 0, (4,): 0}

    def test_from_moments_file(self, capsys, tmp_path):
        mv = M.univariate_moments(1, 2, 3)
        code, out, _ = run(capsys, "cumulants", "--moments",
                           write_moments(tmp_path, mv))
        assert code == 0
        assert json.loads(out)["d"] == 3


class TestCheck:
    def test_member_by_all_methods(self, capsys, tmp_path):
        mv = M.univariate_moments(Fraction(1, 2), Fraction(3), 6)
        path = write_moments(tmp_path, mv)
        for method in ("gd", "willink", "cumulant"):
            code, out, _ = run(capsys, "check", "--moments", path,
                               "--method", method)
            assert code == 0
            assert json.loads(out)["member"] is True

    def test_non_member_with_witness(self, capsys, tmp_path):
        vals = {(i,): Fraction(i == 0) for i in range(7)}
        vals[(3,)] = Fraction(5)
        path = write_moments(tmp_path, M.MomentVector(1, 6, vals))
        verdicts = {}
        for method in ("gd", "willink", "cumulant"):
            code, out, _ = run(capsys, "check", "--moments", path,
                               "--method", method)
            data = json.loads(out)
            verdicts[method] = data["member"]
            assert data["witness"] is not None
        assert verdicts == {"gd": False, "willink": False, "cumulant": False}

    def test_mixture_moments_are_not_on_the_variety(self, capsys, tmp_path):
        rng = SplitMix64(5)
        p = rand_mixture(rng, 2, 2, distinct_first=True)
        path = write_moments(tmp_path, M.mixture_moments(p, 4))
        code, out, _ = run(capsys, "check", "--moments", path,
                           "--method", "willink")
        assert json.loads(out)["member"] is False

    def test_gd_requires_univariate(self, capsys, tmp_path):
        rng = SplitMix64(6)
        mv = M.mixture_moments(rand_mixture(rng, 2, 1), 3)
        code, _, err = run(capsys, "check", "--moments",
                           write_moments(tmp_path, mv), "--method", "gd")
        assert code == 1 and "n = 1" in err


class TestCensusAndDim:
    def test_census_csv_json_round_trip(self, capsys):
        args = ("census", "--d", "3", "--n", "5..6", "--k", "3..4",
                "--defective-only", "--seed", "11", "--prime", str(P31),
                "--trials", "1")
        code, csv_out, _ = run(capsys, *args, "--format", "csv")
        assert code == 0
        code, json_out, _ = run(capsys, *args, "--format", "json")
        assert code == 0
        lines = [l for l in csv_out.splitlines() if not l.startswith("#")]
        header = lines[0].split(",")
        csv_rows = [dict(zip(header, map(int, l.split(","))))
                    for l in lines[1:]]
        data = json.loads(json_out)
        assert csv_rows == data["rows"]
        assert data["config"]["prng"] == "splitmix64-v1"

    def test_byte_identical_reruns(self, capsys):
        args = ("census", "--d", "3", "--n", "5..5", "--k", "3..3",
                "--seed", "4", "--prime", str(P31), "--trials", "2")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_markdown_table(self, capsys):
        code, out, _ = run(capsys, "census", "--d", "3", "--n", "5..5",
                           "--k", "3..3", "--seed", "4", "--prime", str(P31),
                           "--trials", "1", "--format", "markdown")
        assert code == 0
        assert out.splitlines()[1].startswith("| n | k | d |")

    def test_dim_prints_row_and_certificate(self, capsys):
        code, out, _ = run(capsys, "dim", "--n", "3", "--d", "3", "--k", "2",
                           "--seed", "3", "--prime", str(P31),
                           "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert data["row"]["dim"] == 17
        assert data["certificate"]["ranks"] == [17, 17, 17]

    def test_env_defaults_are_echoed(self, capsys, monkeypatch):
        monkeypatch.setenv("GAUSSMOMENTS_SEED", "777")
        monkeypatch.setenv("GAUSSMOMENTS_PRIME", str(P31))
        code, out, _ = run(capsys, "dim", "--n", "1", "--d", "4", "--k", "1",
                           "--format", "json")
        assert code == 0
        cfg = json.loads(out)["config"]
        assert cfg["seed"] == 777 and cfg["prime"] == P31

    def test_composite_prime_rejected(self, capsys):
        code, _, err = run(capsys, "dim", "--n", "1", "--d", "3", "--k", "1",
                           "--prime", "91")
        assert code == 2 and "not prime" in err

    def test_prime_must_exceed_d_factorial(self, capsys):
        code, _, err = run(capsys, "census", "--d", "4", "--n", "1..1",
                           "--k", "1..1", "--prime", "23")
        assert code == 2 and "must exceed" in err

    def test_usage_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["census", "--d", "3"])  # missing --n/--k
        assert exc.value.code == 2


class TestFormulas:
    def test_deg_sec2_g1_with_extrapolation_flag(self, capsys):
        code, out, _ = run(capsys, "formulas", "--deg-sec2-g1", "--d", "5..12")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "d,value,note"
        values = [l.split(",") for l in lines[1:]]
        assert [v[1] for v in values] == \
            ["9", "39", "105", "225", "420", "714", "1134", "1710"]
        assert values[-1][2] == "extrapolated" and values[-2][2] == ""

    def test_trisecant(self, capsys):
        code, out, _ = run(capsys, "formulas", "--deg-sec3-x", "--d", "9")
        assert out.splitlines()[1] == "9,2497"

    def test_dim_d3(self, capsys):
        code, out, _ = run(capsys, "formulas", "--dim-d3", "--n", "9",
                           "--k", "4")
        assert out.splitlines()[1] == "9,4,181"

    def test_conj_eleven(self, capsys):
        code, out, _ = run(capsys, "formulas", "--conj-eleven", "--n", "12",
                           "--r", "8")
        assert out.splitlines()[1] == "12,8,20,21"

    def test_missing_arguments(self, capsys):
        code, _, err = run(capsys, "formulas", "--dim-d3")
        assert code == 2


class TestRecoverCli:
    def test_round_trip(self, capsys, tmp_path):
        rng = SplitMix64(9)
        p = rand_mixture(rng, 3, 2, distinct_first=True)
        mv = M.mixture_moments(p, 3)
        code, out, _ = run(capsys, "recover", "--moments",
                           write_moments(tmp_path, mv),
                           "--mu11", str(p.components[0].mean[0]),
                           "--mu21", str(p.components[1].mean[0]))
        assert code == 0
        data = json.loads(out)
        assert data["residual"] == "0"
        assert M.mixture_params_from_json(data["params"]) == p

    def test_off_variety_is_domain_error(self, capsys, tmp_path):
        rng = SplitMix64(10)
        p = rand_mixture(rng, 3, 2, distinct_first=True)
        mv = M.mixture_moments(p, 3)
        vals = dict(mv.values)
        vals[(0, 3, 0)] = vals[(0, 3, 0)] + 1
        bad = M.MomentVector(3, 3, vals)
        code, _, err = run(capsys, "recover", "--moments",
                           write_moments(tmp_path, bad),
                           "--mu11", "4", "--mu21=-9/2")
        assert code == 1 and "secant" in err


class TestStructuralAndMatrix:
    def test_structural_range(self, capsys):
        code, out, _ = run(capsys, "structural", "--d", "7..8")
        lines = out.splitlines()
        assert lines[1] == "7,True,True,True"
        assert lines[2] == "8,True,True,True"

    def test_matrix_gd(self, capsys):
        code, out, _ = run(capsys, "matrix", "--which", "gd", "--d", "3")
        assert out.splitlines()[0] == '"0","m0","2*m1"'

    def test_matrix_hb(self, capsys):
        code, out, _ = run(capsys, "matrix", "--which", "hb", "--d", "3")
        assert out.splitlines()[1] == '"x","y","z","0"'

    def test_matrix_willink_numeric(self, capsys, tmp_path):
        mv = M.univariate_moments(0, 1, 4)
        code, out, _ = run(capsys, "matrix", "--which", "willink", "--d", "4",
                           "--n", "1", "--moments", write_moments(tmp_path, mv))
        assert code == 0
        assert out.splitlines()[0] == '"1","0","0"'

    def test_matrix_willink_needs_n(self, capsys):
        code, _, err = run(capsys, "matrix", "--which", "willink", "--d", "4")
        assert code == 2
