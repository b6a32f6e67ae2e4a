import numpy as np
import pytest

from dbacv import Acvf, DomainError, MaModel, StepSignal
from dbacv.estimators import AcvfEstimate
from dbacv.io import (
    acvf_from_dict,
    acvf_to_dict,
    banded_toeplitz_from_dict,
    banded_toeplitz_to_dict,
    bench_rows_to_csv,
    dump_json,
    estimate_from_dict,
    estimate_to_dict,
    load_json,
    ma_model_from_dict,
    ma_model_to_dict,
    read_matrix_csv,
    read_series_csv,
    step_fit_to_dict,
    step_signal_from_dict,
    step_signal_to_dict,
    write_matrix_csv,
    write_series_csv,
)
from dbacv.jusd import StepFit
from dbacv.projection import BandedToeplitz
from dbacv.sim import BenchRow


class TestSeriesCsv:
    def test_roundtrip(self, tmp_path):
        y = np.array([1.5, -2.25, 0.0, 1e-17])
        p = tmp_path / "y.csv"
        write_series_csv(p, y)
        assert np.array_equal(read_series_csv(p), y)

    def test_header_flag(self, tmp_path):
        p = tmp_path / "y.csv"
        write_series_csv(p, [1.0, 2.0], header=True)
        assert p.read_text().splitlines()[0] == "y"
        assert read_series_csv(p, header=True).tolist() == [1.0, 2.0]

    def test_single_value(self, tmp_path):
        p = tmp_path / "y.csv"
        write_series_csv(p, [4.0])
        assert read_series_csv(p).shape == (1,)

    def test_malformed_raises_oserror(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1.0\nnot-a-number\n")
        with pytest.raises(OSError):
            read_series_csv(p)


class TestMatrixCsv:
    def test_roundtrip(self, tmp_path):
        a = np.array([[1.0, 0.5], [0.5, 2.0]])
        p = tmp_path / "a.csv"
        write_matrix_csv(p, a)
        assert np.allclose(read_matrix_csv(p), a)


class TestJsonRoundtrips:
    def test_acvf(self):
        a = Acvf(2, [1.0, 0.4, 0.1])
        d = acvf_to_dict(a)
        assert d["schema"] == 1
        b = acvf_from_dict(d)
        assert b.m == a.m and b.gamma.tolist() == a.gamma.tolist()

    def test_schema_rejected(self):
        with pytest.raises(DomainError):
            acvf_from_dict({"schema": 2, "m": 0, "gamma": [1.0]})

    def test_estimate(self):
        e = AcvfEstimate(1, [0.9, 0.3], [1.0, 1.0], 500)
        f = estimate_from_dict(estimate_to_dict(e))
        assert f.n == 500 and f.gamma.tolist() == [0.9, 0.3]

    def test_step_signal(self):
        s = StepSignal([0.25, 0.5], [0.0, 1.0, -1.0])
        t = step_signal_from_dict(step_signal_to_dict(s))
        assert t.taus.tolist() == s.taus.tolist()
        assert t.levels.tolist() == s.levels.tolist()

    def test_ma_model(self):
        m = MaModel([0.5, -0.2], 1.7)
        m2 = ma_model_from_dict(ma_model_to_dict(m))
        assert m2.theta.tolist() == m.theta.tolist()
        assert m2.sigma2 == m.sigma2

    def test_banded_toeplitz(self):
        b = BandedToeplitz(10, 1, [2.0, 0.5])
        b2 = banded_toeplitz_from_dict(banded_toeplitz_to_dict(b))
        assert b2.n == 10 and b2.first_row.tolist() == [2.0, 0.5]

    def test_step_fit_dict(self):
        fit = StepFit([10, 20], [0.0, 1.0, 0.5], 2, 17.5, alpha=0.05)
        d = step_fit_to_dict(fit)
        assert d["k_hat"] == 2 and d["changepoints"] == [10, 20]
        assert d["quantile_used"] == 17.5 and d["schema"] == 1

    def test_dump_load(self, tmp_path):
        p = tmp_path / "x.json"
        text = dump_json({"schema": 1, "a": 1.5}, p)
        assert text.endswith("\n")
        assert load_json(p) == {"schema": 1, "a": 1.5}


class TestBenchCsv:
    def test_columns_and_determinism(self):
        rows = [BenchRow(0.4, "O", 1, 0.001234, 5e-05, 500, 1600, 42)]
        text = bench_rows_to_csv(rows)
        lines = text.splitlines()
        assert lines[0] == "gamma1,estimator,lag,mse,se,reps,n,seed"
        assert lines[1] == "0.4,O,1,0.001234,5e-05,500,1600,42"
        assert text == bench_rows_to_csv(rows)
