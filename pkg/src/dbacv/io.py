"""Serialization: single-column CSV for series, dense CSV for matrices, and
versioned JSON objects for the structured types."""
from __future__ import annotations

import json

import numpy as np

from .core import Acvf, DomainError, StepSignal
from .estimators import AcvfEstimate
from .jusd import StepFit
from .mafit import MaModel
from .projection import BandedToeplitz, ProjectionReport

__all__ = [
    "SCHEMA_VERSION",
    "read_series_csv",
    "write_series_csv",
    "read_matrix_csv",
    "write_matrix_csv",
    "acvf_to_dict",
    "acvf_from_dict",
    "estimate_to_dict",
    "estimate_from_dict",
    "step_signal_to_dict",
    "step_signal_from_dict",
    "ma_model_to_dict",
    "ma_model_from_dict",
    "banded_toeplitz_to_dict",
    "banded_toeplitz_from_dict",
    "report_to_dict",
    "step_fit_to_dict",
    "bench_rows_to_csv",
    "dump_json",
    "load_json",
]

SCHEMA_VERSION = 1


def write_series_csv(path, values, header: bool = False) -> None:
    y = np.asarray(values, dtype=float)
    with open(path, "w") as fh:
        if header:
            fh.write("y\n")
        for v in y:
            fh.write(f"{float(v)!r}\n")


def read_series_csv(path, header: bool = False) -> np.ndarray:
    try:
        return np.loadtxt(path, dtype=float, skiprows=1 if header else 0, ndmin=1)
    except ValueError as exc:
        raise OSError(f"cannot parse series CSV {path}: {exc}") from exc


def write_matrix_csv(path, a) -> None:
    np.savetxt(path, np.asarray(a, dtype=float), delimiter=",")


def read_matrix_csv(path) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    except ValueError as exc:
        raise OSError(f"cannot parse matrix CSV {path}: {exc}") from exc


def _check_schema(d: dict) -> None:
    if d.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise DomainError(f"unsupported schema version {d.get('schema')}")


def acvf_to_dict(acvf: Acvf) -> dict:
    return {"schema": SCHEMA_VERSION, "m": acvf.m, "gamma": acvf.gamma.tolist()}


def acvf_from_dict(d: dict) -> Acvf:
    _check_schema(d)
    gamma = np.asarray(d["gamma"], dtype=float)
    return Acvf(int(d.get("m", gamma.size - 1)), gamma)


def estimate_to_dict(e: AcvfEstimate) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "m": e.m,
        "gamma": e.gamma.tolist(),
        "weights_used": e.weights_used.tolist(),
        "n": e.n,
    }


def estimate_from_dict(d: dict) -> AcvfEstimate:
    _check_schema(d)
    return AcvfEstimate(int(d["m"]), d["gamma"], d["weights_used"], int(d["n"]))


def step_signal_to_dict(s: StepSignal) -> dict:
    return {"schema": SCHEMA_VERSION, "taus": s.taus.tolist(), "levels": s.levels.tolist()}


def step_signal_from_dict(d: dict) -> StepSignal:
    _check_schema(d)
    return StepSignal(np.asarray(d["taus"], dtype=float), np.asarray(d["levels"], dtype=float))


def ma_model_to_dict(m: MaModel) -> dict:
    return {"schema": SCHEMA_VERSION, "theta": m.theta.tolist(), "sigma2": m.sigma2}


def ma_model_from_dict(d: dict) -> MaModel:
    _check_schema(d)
    return MaModel(np.asarray(d["theta"], dtype=float), float(d["sigma2"]))


def banded_toeplitz_to_dict(b: BandedToeplitz) -> dict:
    return {"schema": SCHEMA_VERSION, "n": b.n, "m": b.m, "first_row": b.first_row.tolist()}


def banded_toeplitz_from_dict(d: dict) -> BandedToeplitz:
    _check_schema(d)
    return BandedToeplitz(int(d["n"]), int(d["m"]), np.asarray(d["first_row"], dtype=float))


def report_to_dict(r: ProjectionReport) -> dict:
    return {
        "iterations": r.iterations,
        "final_delta": r.final_delta,
        "converged": r.converged,
        "min_eigenvalue": r.min_eigenvalue,
    }


def step_fit_to_dict(fit: StepFit) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "k_hat": fit.k_hat,
        "changepoints": fit.changepoints.tolist(),
        "levels": fit.levels.tolist(),
        "alpha": fit.alpha,
        "quantile_used": fit.quantile_used,
    }


def bench_rows_to_csv(rows) -> str:
    lines = ["gamma1,estimator,lag,mse,se,reps,n,seed"]
    for r in rows:
        lines.append(f"{float(r.gamma1)!r},{r.estimator},{r.lag},{float(r.mse)!r},"
                     f"{float(r.se)!r},{r.reps},{r.n},{r.seed}")
    return "\n".join(lines) + "\n"


def dump_json(obj: dict, path=None) -> str:
    text = json.dumps(obj, indent=2) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
