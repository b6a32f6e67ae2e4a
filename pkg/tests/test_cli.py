import json
from pathlib import Path

import numpy as np
import pytest

from dbacv import (
    Acvf,
    acvf_from_ma,
    chakar_signal,
    demo_ma6,
    dbacf,
    gamma0_hat,
    gammah_hat,
    gen_ma,
    ordinary_diff,
    replicate_rng,
    sample_signal,
)
from dbacv.cli import main
from dbacv.io import acvf_to_dict, dump_json, load_json, ma_model_to_dict, write_series_csv

DATA = Path(__file__).parent / "data"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestEstimate:
    def test_constant_series(self, tmp_path, capsys):
        p = tmp_path / "y.csv"
        write_series_csv(p, np.full(40, 2.0))
        code, out, err = run(["estimate", "--input", str(p), "--m", "2"], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["gamma"] == [0.0, 0.0, 0.0]
        assert d["schema"] == 1

    def test_d_override_matches_library(self, tmp_path, capsys):
        rng = np.random.default_rng(4)
        y = rng.standard_normal(120)
        p = tmp_path / "y.csv"
        write_series_csv(p, y)
        code, out, _ = run(["estimate", "--input", str(p), "--m", "1", "--d", "0"], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["gamma"][0] == gamma0_hat(y, 1, 0.0)
        assert d["gamma"][1] == gammah_hat(y, 1, 1, 0.0)
        assert d["weights_used"] == [0.0, 0.0]

    def test_default_matches_dbacf(self, tmp_path, capsys):
        rng = np.random.default_rng(5)
        y = rng.standard_normal(200)
        p = tmp_path / "y.csv"
        write_series_csv(p, y)
        code, out, _ = run(["estimate", "--input", str(p), "--m", "2", "--with-acf"], capsys)
        e = dbacf(y, 2)
        d = json.loads(out)
        assert code == 0
        assert d["gamma"] == e.gamma.tolist()
        assert d["acf"] == (e.gamma / e.gamma[0]).tolist()

    def test_missing_m_exits_3(self, tmp_path, capsys):
        p = tmp_path / "y.csv"
        write_series_csv(p, np.ones(30))
        code, _, err = run(["estimate", "--input", str(p)], capsys)
        assert code == 3
        assert err.startswith("E_ARGS:")

    def test_missing_input_exits_2(self, capsys):
        code, _, err = run(["estimate", "--input", "/nope/none.csv", "--m", "1"], capsys)
        assert code == 2
        assert err.startswith("E_IO:")

    def test_domain_error_exits_3(self, tmp_path, capsys):
        p = tmp_path / "y.csv"
        write_series_csv(p, np.ones(5))
        code, _, err = run(["estimate", "--input", str(p), "--m", "2"], capsys)
        assert code == 3
        assert err.startswith("E_DOMAIN:")


class TestProject:
    def test_valid_passthrough(self, tmp_path, capsys):
        p = tmp_path / "a.json"
        dump_json(acvf_to_dict(Acvf(1, [1.0, 0.4])), p)
        code, out, _ = run(["project", "--input", str(p), "--n", "25"], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["report"]["converged"]
        assert np.allclose(d["first_row"], [1.0, 0.4], atol=1e-8)

    def test_invalid_repaired(self, tmp_path, capsys):
        p = tmp_path / "a.json"
        dump_json(acvf_to_dict(Acvf(1, [1.0, 0.7])), p)
        code, out, _ = run(["project", "--input", str(p), "--n", "20"], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["report"]["min_eigenvalue"] >= -1e-8
        assert d["report"]["converged"]

    def test_non_convergent_still_exit_0(self, tmp_path, capsys):
        p = tmp_path / "a.json"
        dump_json(acvf_to_dict(Acvf(1, [1.0, 0.7])), p)
        code, out, _ = run(["project", "--input", str(p), "--n", "20",
                            "--max-iter", "1", "--tol", "1e-14"], capsys)
        assert code == 0
        assert not json.loads(out)["report"]["converged"]


class TestMafit:
    def test_roundtrip_files(self, tmp_path, capsys):
        p = tmp_path / "a.json"
        dump_json(acvf_to_dict(Acvf(1, [1.25, 0.5])), p)
        code, out, _ = run(["mafit", "--input", str(p)], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["theta"][0] == pytest.approx(0.5, abs=1e-9)
        assert d["sigma2"] == pytest.approx(1.0, abs=1e-9)

    def test_invalid_acvf_exits_3(self, tmp_path, capsys):
        p = tmp_path / "a.json"
        dump_json(acvf_to_dict(Acvf(1, [1.0, 0.7])), p)
        code, _, err = run(["mafit", "--input", str(p)], capsys)
        assert code == 3
        assert err.startswith("E_DOMAIN:")


class TestSegment:
    def test_noiseless_recovery(self, tmp_path, capsys):
        from dbacv import StepSignal, change_indices
        sig = StepSignal([0.35, 0.7], [0.0, 2.0, -1.0])
        n = 120
        p = tmp_path / "y.csv"
        write_series_csv(p, sample_signal(sig, n))
        code, out, _ = run(["segment", "--input", str(p), "--m", "1",
                            "--reps", "200", "--seed", "9"], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["k_hat"] == 2
        assert d["changepoints"] == change_indices(sig, n).tolist()

    def test_bad_alpha_exits_3(self, tmp_path, capsys):
        p = tmp_path / "y.csv"
        write_series_csv(p, np.arange(60.0))
        code, _, err = run(["segment", "--input", str(p), "--m", "1",
                            "--alpha", "1.5"], capsys)
        assert code == 3
        assert err.startswith("E_DOMAIN:")

    def test_demo_golden(self, tmp_path, capsys):
        # end-to-end run with the known demo noise model, recorded output
        model = demo_ma6()
        y = sample_signal(chakar_signal(), 1600) + gen_ma(model, 1600, replicate_rng(20260810, 0))
        yp = tmp_path / "y.csv"
        write_series_csv(yp, y)
        ap = tmp_path / "acvf.json"
        dump_json(acvf_to_dict(acvf_from_ma(model)), ap)
        out_p = tmp_path / "fit.json"
        code, _, _ = run(["segment", "--input", str(yp), "--m", "6",
                          "--noise-acvf", str(ap), "--alpha", "0.05",
                          "--reps", "1000", "--seed", "20260810",
                          "--output", str(out_p)], capsys)
        assert code == 0
        got = load_json(out_p)
        want = load_json(DATA / "jusd_demo_golden.json")
        assert got == want
        assert got["k_hat"] == 6


class TestBench:
    def test_reps1_smoke(self, capsys):
        code, out, _ = run(["bench", "--n", "120", "--reps", "1", "--m", "2",
                            "--seed", "1", "--gamma1", "0.2"], capsys)
        assert code == 0
        assert out.splitlines()[0] == "gamma1,estimator,lag,mse,se,reps,n,seed"

    def test_unknown_estimator_exits_3(self, capsys):
        code, _, err = run(["bench", "--estimators", "O,Z", "--reps", "1",
                            "--n", "100"], capsys)
        assert code == 3
        assert err.startswith("E_DOMAIN:")

    def test_golden_csv(self, capsys):
        code, out, _ = run(["bench", "--n", "1600", "--reps", "100", "--m", "2",
                            "--seed", "11", "--gamma1", "0,0.4,-0.4",
                            "--estimators", "O,R"], capsys)
        assert code == 0
        assert out == (DATA / "bench_golden.csv").read_text()

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "bench.cfg"
        cfg.write_text("n = 150\nreps = 2\nm = 2\nseed = 5\ngamma1 = 0.1\n")
        code, out, _ = run(["bench", "--config", str(cfg)], capsys)
        assert code == 0
        assert ",150,5" in out.splitlines()[1]


class TestSimulate:
    def test_deterministic_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, _, _ = run(["simulate", "--n", "300", "--seed", "77",
                              "--signal", "chakar", "--gamma1", "0.4",
                              "--output", str(path)], capsys)
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_ma_model_noise(self, tmp_path, capsys):
        mp = tmp_path / "ma.json"
        dump_json(ma_model_to_dict(demo_ma6()), mp)
        out_p = tmp_path / "y.csv"
        code, _, _ = run(["simulate", "--n", "100", "--ma", str(mp),
                          "--output", str(out_p)], capsys)
        assert code == 0
        want = gen_ma(demo_ma6(), 100, replicate_rng(20210, 0))
        got = np.loadtxt(out_p)
        assert np.array_equal(got, want)

    def test_seed_bound(self, capsys):
        code, _, err = run(["simulate", "--n", "10", "--seed", "-1"], capsys)
        assert code == 3
        assert err.startswith("E_ARGS:")
