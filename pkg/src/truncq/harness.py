"""Random ensembles, noise models, experiment orchestration and file I/O.

Experiments are described by a declarative spec and produce a JSON report
plus, for sweeps, a CSV grid suitable for external plotting.  Trials are
independent: each derives its own seed as base seed + trial index, so
results do not depend on the thread schedule.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .analysis import (
    ConstraintForm,
    PassedSampling,
    SearchBudget,
    Violated,
    bound_theorem35,
    rip_constant,
    tsap_check,
    tsap_constants_from_rip,
)
from .core import (
    DantzigSelector,
    LpBall,
    NoiseConstraint,
    NormTriple,
    TruncationSet,
    as_matrix,
    as_vector,
    sigma_k,
)
from .errors import InvalidInput, TruncqError
from .solvers_matrix import LinearMatrixMap, apply_map, solve_truncated_schatten
from .solvers_vector import (
    FirstJump,
    SolverConfig,
    isd_recover,
    solve_truncated_l1,
    solve_truncated_lq,
)

__all__ = [
    "SCHEMA_VERSION",
    "Flat",
    "Power",
    "Gaussian",
    "Bernoulli",
    "FromFile",
    "ExperimentKind",
    "ExperimentSpec",
    "ExperimentReport",
    "gaussian_matrix",
    "bernoulli_matrix",
    "sparse_signal",
    "add_noise",
    "run_experiment",
    "save_vector",
    "load_vector",
    "save_matrix",
    "load_matrix",
    "save_report",
    "load_report",
    "spec_from_dict",
]

SCHEMA_VERSION = 1
VERSION = "0.1.0"


# ---------------------------------------------------------------------------
# ensembles and signals
# ---------------------------------------------------------------------------


def gaussian_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """i.i.d. normal entries scaled by 1/sqrt(m); columns have near-unit l2."""
    if m < 1 or n < 1:
        raise InvalidInput("matrix dimensions must be positive")
    rng = np.random.default_rng(seed)
    return rng.standard_normal((m, n)) / math.sqrt(m)


def bernoulli_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """i.i.d. +-1/sqrt(m) entries."""
    if m < 1 or n < 1:
        raise InvalidInput("matrix dimensions must be positive")
    rng = np.random.default_rng(seed)
    return rng.choice([-1.0, 1.0], size=(m, n)) / math.sqrt(m)


@dataclass(frozen=True)
class Flat:
    """Nonzeros are +-1."""


@dataclass(frozen=True)
class Power:
    """Sorted nonzero magnitudes decay as j^(-exponent)."""

    exponent: float = 3.0


@dataclass(frozen=True)
class Gaussian:
    pass


@dataclass(frozen=True)
class Bernoulli:
    pass


@dataclass(frozen=True)
class FromFile:
    path: str


Ensemble = Gaussian | Bernoulli | FromFile
Decay = Flat | Power


def sparse_signal(n: int, k: int, decay: Decay = Flat(), seed: int = 0) -> np.ndarray:
    """Exactly k nonzeros at random positions with random signs."""
    if not (0 <= k <= n):
        raise InvalidInput(f"need 0 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    if k == 0:
        return x
    positions = rng.choice(n, size=k, replace=False)
    signs = rng.choice([-1.0, 1.0], size=k)
    if isinstance(decay, Flat):
        mags = np.ones(k)
    else:
        mags = (np.arange(1, k + 1, dtype=float)) ** (-decay.exponent)
    x[positions] = signs * mags
    return x


def add_noise(clean, model: NoiseConstraint, eps: float, a=None,
              seed: int = 0) -> np.ndarray:
    """b = clean + z with the noise scaled to hit the stated level exactly.

    LpBall: ||z||_p = eps.  DantzigSelector: ||A^T z||_inf = eps (needs the
    measurement matrix).  A Gaussian direction is drawn and rescaled.
    """
    b = as_vector(clean)
    if eps < 0:
        raise InvalidInput("noise level must be nonnegative")
    if eps == 0.0:
        return b.copy()
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(b.size)
    if isinstance(model, LpBall):
        p = model.p
        nrm = float(np.max(np.abs(z))) if math.isinf(p) else float(
            np.sum(np.abs(z) ** p) ** (1.0 / p)
        )
    else:
        if a is None:
            raise InvalidInput("Dantzig noise scaling needs the matrix A")
        arr = as_matrix(a)
        nrm = float(np.max(np.abs(arr.T @ z)))
    if nrm == 0.0:
        raise InvalidInput("degenerate noise direction")
    return b + z * (eps / nrm)


# ---------------------------------------------------------------------------
# experiment plumbing
# ---------------------------------------------------------------------------


class ExperimentKind(Enum):
    RECOVER = "recover"
    RECOVER_MATRIX = "recover-matrix"
    RIP = "rip"
    TSAP = "tsap"
    BOUND = "bound"
    SWEEP = "sweep"


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of an experiment run.

    `t` is the truncation-set size; None means oracle truncation (the
    complement of the true support for vectors, min(shape) for matrices).
    `method` selects the recovery route for sweeps: "oracle", "bp" (no
    truncation) or "isd".
    """

    kind: ExperimentKind
    m: int = 64
    n: int = 128
    k: int = 5
    t: int | None = None
    q: float = 1.0
    r: float = 2.0
    p: float = 2.0
    eta: float = 0.0
    eps: float = 0.0
    ensemble: Ensemble = Gaussian()
    decay: Decay = Flat()
    trials: int = 1
    seed: int = 0
    output: str | None = None
    threads: int = 1
    method: str = "oracle"
    dantzig: bool = False
    grid: tuple[int, ...] = ()
    success_threshold: float = 1e-4
    matrix_shape: tuple[int, int] = (8, 8)
    rank: int = 1
    n_measurements: int = 80
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidInput("trials must be >= 1")
        if self.m < 1 or self.n < 1 or self.k < 0:
            raise InvalidInput("dimensions must be positive")
        NormTriple(self.q, self.r, self.p)  # range check
        if self.method not in ("oracle", "bp", "isd"):
            raise InvalidInput(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class ExperimentReport:
    schema_version: int
    kind: str
    records: tuple[dict, ...]
    aggregates: dict
    environment: dict
    timestamp: str = ""  # informational; excluded from persisted JSON

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "records": list(self.records),
            "aggregates": self.aggregates,
            "environment": self.environment,
        }


def _ensemble_matrix(spec: ExperimentSpec, seed: int) -> np.ndarray:
    ens = spec.ensemble
    if isinstance(ens, Gaussian):
        return gaussian_matrix(spec.m, spec.n, seed)
    if isinstance(ens, Bernoulli):
        return bernoulli_matrix(spec.m, spec.n, seed)
    return load_matrix(ens.path)


def _oracle_truncation(x0: np.ndarray, spec: ExperimentSpec) -> TruncationSet:
    n = x0.size
    support = set(np.flatnonzero(x0).tolist())
    if spec.t is not None:
        # keep the t smallest-magnitude coordinates penalized
        order = np.argsort(np.abs(x0), kind="stable")
        return TruncationSet(tuple(int(i) for i in order[: spec.t]), n)
    comp = tuple(i for i in range(n) if i not in support)
    if not comp:
        return TruncationSet.full(n)
    return TruncationSet(comp, n)


def _noise_model(spec: ExperimentSpec) -> NoiseConstraint:
    if spec.dantzig:
        return DantzigSelector(spec.eta)
    return LpBall(spec.p, spec.eta)


def _solve_vector(a, b, t_set, spec: ExperimentSpec, x0=None):
    constraint = _noise_model(spec)
    if spec.method == "isd":
        return isd_recover(a, b, spec.q, constraint, config=spec.solver,
                           threshold_rule=FirstJump())
    if spec.q == 1.0:
        return solve_truncated_l1(a, b, t_set, constraint, config=spec.solver)
    return solve_truncated_lq(a, b, t_set, spec.q, constraint,
                              config=spec.solver)


def _recover_trial(spec: ExperimentSpec, index: int) -> dict:
    seed = spec.seed + index
    a = _ensemble_matrix(spec, seed)
    x0 = sparse_signal(spec.n, spec.k, spec.decay, seed)
    noise_model = (DantzigSelector(spec.eps) if spec.dantzig
                   else LpBall(spec.p, spec.eps))
    b = add_noise(a @ x0, noise_model, spec.eps, a, seed + 10_000)
    if spec.method == "bp":
        t_set = TruncationSet.full(spec.n)
    else:
        t_set = _oracle_truncation(x0, spec)
    record = {"trial": index, "seed": seed}
    try:
        rep = _solve_vector(a, b, t_set, spec)
    except TruncqError as exc:
        record.update(error_l2=math.inf, error_qq=math.inf, success=False,
                      failure=str(exc))
        return record
    diff = rep.solution - x0
    err2 = float(np.linalg.norm(diff))
    ref = float(np.linalg.norm(x0))
    record.update(
        error_l2=err2,
        error_qq=float(np.sum(np.abs(diff) ** spec.q)),
        relative_error=err2 / ref if ref > 0 else err2,
        success=bool(err2 <= spec.success_threshold * max(ref, 1e-30)),
        converged=bool(rep.converged),
        iterations=int(rep.iterations_used),
    )
    return record


def _recover_matrix_trial(spec: ExperimentSpec, index: int) -> dict:
    seed = spec.seed + index
    rng = np.random.default_rng(seed)
    mm, nn = spec.matrix_shape
    lmeas = spec.n_measurements
    sensing = rng.standard_normal((lmeas, mm, nn)) / math.sqrt(lmeas)
    lin_map = LinearMatrixMap(sensing)
    left = rng.standard_normal((mm, spec.rank))
    right = rng.standard_normal((nn, spec.rank))
    x0 = left @ right.T
    b = apply_map(lin_map, x0)
    if spec.eps > 0:
        b = add_noise(b, LpBall(spec.p, spec.eps), spec.eps, seed=seed + 10_000)
    t = spec.t if spec.t is not None else min(mm, nn)
    record = {"trial": index, "seed": seed}
    try:
        rep = solve_truncated_schatten(lin_map, b, t, spec.q,
                                       LpBall(spec.p, spec.eta),
                                       config=spec.solver)
    except TruncqError as exc:
        record.update(error_fro=math.inf, success=False, failure=str(exc))
        return record
    ref = float(np.linalg.norm(x0))
    err = float(np.linalg.norm(rep.solution - x0))
    record.update(
        error_fro=err,
        relative_error=err / ref if ref > 0 else err,
        success=bool(err <= 1e-3 * max(ref, 1e-30)),
        converged=bool(rep.converged),
        iterations=int(rep.iterations_used),
    )
    return record


def _rip_trial(spec: ExperimentSpec, index: int) -> dict:
    seed = spec.seed + index
    a = _ensemble_matrix(spec, seed)
    est = rip_constant(a, spec.k, spec.p)
    return {"trial": index, "seed": seed, "delta": est.delta,
            "exact": est.exact}


def _tsap_trial(spec: ExperimentSpec, index: int) -> dict:
    seed = spec.seed + index
    a = _ensemble_matrix(spec, seed)
    t = spec.t if spec.t is not None else min(spec.n, 2 * spec.k)
    tc_size = spec.n - t
    order = min(spec.n, 2 * (spec.k + tc_size))
    est = rip_constant(a, order, 2.0)
    record = {"trial": index, "seed": seed, "delta": est.delta}
    try:
        d1, _, beta = tsap_constants_from_rip(est.delta, 2.0, spec.k, tc_size)
    except TruncqError as exc:
        record.update(skipped=str(exc))
        return record
    rep = tsap_check(a, spec.k, t, NormTriple(spec.q, spec.r, spec.p),
                     d1, beta, ConstraintForm.LP,
                     SearchBudget(samples=2000, seed=seed),
                     certificate="isometry-derived constants")
    record.update(d=d1, beta=beta,
                  violated=isinstance(rep.verdict, Violated),
                  samples=(rep.verdict.samples
                           if isinstance(rep.verdict, PassedSampling) else 0))
    return record


BOUND_SLACK = 1e-6  # solver tolerance allowance for zero-bound noiseless cells


def _bound_trial(spec: ExperimentSpec, index: int) -> dict:
    seed = spec.seed + index
    a = _ensemble_matrix(spec, seed)
    x0 = sparse_signal(spec.n, spec.k, spec.decay, seed)
    b = add_noise(a @ x0, LpBall(spec.p, spec.eps), spec.eps, a, seed + 10_000)
    t_set = _oracle_truncation(x0, spec)
    t = len(t_set)
    tc_size = spec.n - t
    order = min(spec.n, 2 * (spec.k + tc_size))
    est = rip_constant(a, order, 2.0)
    record = {"trial": index, "seed": seed, "delta": est.delta}
    sig1 = sigma_k(x0, t_set, min(spec.k, t), 1.0)
    try:
        bound = bound_theorem35(est.delta, 2.0, spec.k, tc_size, t,
                                spec.eps, spec.eta, sig1)
    except TruncqError as exc:
        record.update(skipped=str(exc))
        return record
    try:
        rep = solve_truncated_l1(a, b, t_set, LpBall(spec.p, spec.eta),
                                 config=spec.solver)
    except TruncqError as exc:
        record.update(failure=str(exc))
        return record
    err2 = float(np.linalg.norm(rep.solution - x0))
    record.update(
        error_l2=err2,
        bound=bound.bound_value,
        violation=bool(err2 > bound.bound_value + BOUND_SLACK),
    )
    return record


def _run_trials(spec: ExperimentSpec, fn) -> list[dict]:
    indices = range(spec.trials)
    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            records = list(pool.map(lambda i: fn(spec, i), indices))
    else:
        records = [fn(spec, i) for i in indices]
    records.sort(key=lambda r: r["trial"])
    return records


def _aggregate(records: list[dict]) -> dict:
    agg: dict = {"trials": len(records)}
    successes = [r["success"] for r in records if "success" in r]
    if successes:
        agg["success_rate"] = float(np.mean(successes))
    errs = [r[key] for key in ("error_l2", "error_fro")
            for r in records if key in r and math.isfinite(r[key])]
    if errs:
        agg["mean_error"] = float(np.mean(errs))
        agg["max_error"] = float(np.max(errs))
    agg["violations"] = int(sum(1 for r in records
                                if r.get("violation") or r.get("violated")))
    agg["failures"] = int(sum(1 for r in records if "failure" in r))
    return agg


_TRIAL_FNS = {
    ExperimentKind.RECOVER: _recover_trial,
    ExperimentKind.RECOVER_MATRIX: _recover_matrix_trial,
    ExperimentKind.RIP: _rip_trial,
    ExperimentKind.TSAP: _tsap_trial,
    ExperimentKind.BOUND: _bound_trial,
}


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Run the trials described by the spec and optionally persist a report.

    The persisted JSON is canonical (sorted keys) and omits the timestamp
    so that identical specs produce byte-identical files.
    """
    if spec.kind is ExperimentKind.SWEEP:
        records, aggregates = _run_sweep(spec)
    else:
        records = _run_trials(spec, _TRIAL_FNS[spec.kind])
        aggregates = _aggregate(records)
    report = ExperimentReport(
        schema_version=SCHEMA_VERSION,
        kind=spec.kind.value,
        records=tuple(records),
        aggregates=aggregates,
        environment={"seed": spec.seed, "version": VERSION},
        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )
    if spec.output:
        save_report(report, spec.output)
        if spec.kind is ExperimentKind.SWEEP:
            _save_sweep_csv(records, _sweep_csv_path(spec.output))
    return report


def _run_sweep(spec: ExperimentSpec):
    if not spec.grid:
        raise InvalidInput("sweep needs a nonempty grid of m values")
    rows = []
    for g in spec.grid:
        sub = replace(spec, kind=ExperimentKind.RECOVER, m=int(g),
                      grid=(), output=None)
        recs = _run_trials(sub, _recover_trial)
        agg = _aggregate(recs)
        rows.append({
            "grid_value": int(g),
            "success_rate": agg.get("success_rate", 0.0),
            "mean_error": agg.get("mean_error", math.inf),
            "bound": 0.0,
            "violations": agg.get("violations", 0),
        })
    aggregates = {"grid_points": len(rows),
                  "best_success_rate": max(r["success_rate"] for r in rows)}
    return rows, aggregates


def _sweep_csv_path(output: str) -> str:
    path = Path(output)
    if path.suffix == ".csv":
        return str(path)
    return str(path.with_suffix(".csv"))


def _save_sweep_csv(rows: list[dict], path: str) -> None:
    fields = ["grid_value", "success_rate", "mean_error", "bound", "violations"]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows({k: row[k] for k in fields} for row in rows)
    except OSError as exc:
        raise InvalidInput(f"cannot write sweep CSV to {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def save_vector(path: str, x) -> None:
    arr = as_vector(x)
    try:
        with open(path, "w") as fh:
            fh.writelines(f"{v:.17g}\n" for v in arr)
    except OSError as exc:
        raise InvalidInput(f"cannot write vector to {path}: {exc}") from exc


def load_vector(path: str) -> np.ndarray:
    try:
        with open(path) as fh:
            values = [float(line) for line in fh if line.strip()]
    except OSError as exc:
        raise InvalidInput(f"cannot read vector from {path}: {exc}") from exc
    except ValueError as exc:
        raise InvalidInput(f"malformed vector file {path}: {exc}") from exc
    return as_vector(values)


def save_matrix(path: str, a) -> None:
    arr = as_matrix(a)
    try:
        np.savetxt(path, arr, delimiter=",", fmt="%.17g")
    except OSError as exc:
        raise InvalidInput(f"cannot write matrix to {path}: {exc}") from exc


def load_matrix(path: str) -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError as exc:
        raise InvalidInput(f"cannot read matrix from {path}: {exc}") from exc
    except ValueError as exc:
        raise InvalidInput(f"malformed matrix file {path}: {exc}") from exc
    return as_matrix(arr)


def save_report(report: ExperimentReport, path: str) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise InvalidInput(f"cannot write report to {path}: {exc}") from exc


def load_report(path: str) -> ExperimentReport:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read report from {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed report file {path}: {exc}") from exc
    return ExperimentReport(
        schema_version=data["schema_version"],
        kind=data["kind"],
        records=tuple(data["records"]),
        aggregates=data["aggregates"],
        environment=data["environment"],
    )


# ---------------------------------------------------------------------------
# config parsing (JSON mirror of ExperimentSpec)
# ---------------------------------------------------------------------------

_DECAYS = {"flat": Flat}


def _parse_decay(value) -> Decay:
    if value is None or value == "flat":
        return Flat()
    if isinstance(value, dict) and value.get("kind") == "power":
        return Power(float(value.get("exponent", 3.0)))
    if value == "power":
        return Power()
    raise InvalidInput(f"unknown decay spec {value!r}")


def _parse_ensemble(value) -> Ensemble:
    if value is None or value == "gaussian":
        return Gaussian()
    if value == "bernoulli":
        return Bernoulli()
    if isinstance(value, dict) and "path" in value:
        return FromFile(str(value["path"]))
    raise InvalidInput(f"unknown ensemble spec {value!r}")


def spec_from_dict(data: dict) -> ExperimentSpec:
    """Build an ExperimentSpec from a JSON-style dict (the --config format)."""
    if "kind" not in data:
        raise InvalidInput("config is missing the experiment kind")
    try:
        kind = ExperimentKind(str(data["kind"]))
    except ValueError as exc:
        raise InvalidInput(f"unknown experiment kind {data['kind']!r}") from exc
    kwargs: dict = {"kind": kind}
    for name in ("m", "n", "k", "t", "trials", "seed", "threads",
                 "rank", "n_measurements"):
        if name in data and data[name] is not None:
            kwargs[name] = int(data[name])
    for name in ("q", "r", "p", "eta", "eps", "success_threshold"):
        if name in data and data[name] is not None:
            kwargs[name] = float(data[name])
    if "method" in data:
        kwargs["method"] = str(data["method"])
    if "dantzig" in data:
        kwargs["dantzig"] = bool(data["dantzig"])
    if "output" in data and data["output"]:
        kwargs["output"] = str(data["output"])
    if "grid" in data and data["grid"]:
        kwargs["grid"] = tuple(int(g) for g in data["grid"])
    if "matrix_shape" in data and data["matrix_shape"]:
        mm, nn = data["matrix_shape"]
        kwargs["matrix_shape"] = (int(mm), int(nn))
    kwargs["decay"] = _parse_decay(data.get("decay"))
    kwargs["ensemble"] = _parse_ensemble(data.get("ensemble"))
    if "solver" in data and data["solver"]:
        kwargs["solver"] = SolverConfig(**data["solver"])
    return ExperimentSpec(**kwargs)
