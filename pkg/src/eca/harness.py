"""Seeded simulation harness: configs, per-replication records, CSV I/O,
effective-sample sweeps, ROC aggregation and external-data analysis.

Replication ``r`` draws its data with seed ``base_seed ^ r`` and is computed
independently, so results do not depend on how replications are scheduled.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import DataError, ECAError, NumericError, ParseError
from .fantope import FantopeParams, default_lambda
from .ftpm import FtpmParams, ftpm_top_m
from .sampling import (
    DISTRIBUTIONS,
    SCHEMES,
    CovarianceSpec,
    build_spike_covariance,
    model_for,
    sample,
    scheme_n,
    scheme_spec,
)
from .scatter import multivariate_kendall, pearson_cov, tca_covariance
from .spectral import sin_angle

METHODS = {"eca": multivariate_kendall, "tca": tca_covariance, "tp": pearson_cov}
FAILURE_LIMIT = 0.10


class ExperimentAborted(NumericError):
    """Too many replications failed."""


@dataclass
class ExperimentConfig:
    """One simulation setting; JSON files mirror these fields.

    ``n`` and ``d`` default to the scheme's values. ``covariance`` replaces
    the numbered scheme with a custom spec given as
    ``{"d": ..., "components": [[eigenvalue, size], ...], "baseline": ...}``.
    ``k_grid`` overrides ``k`` with a sweep. ``lam_scale`` multiplies the
    default Fantope penalty.
    """

    scheme: int = 1
    distribution: str = "normal"
    method: str = "eca"
    n: int | None = None
    d: int | None = None
    m: int = 1
    k: int = 10
    k_grid: list[int] | None = None
    replications: int = 200
    base_seed: int = 0
    output_dir: str = "results"
    workers: int = 1
    lam_scale: float = 1.0
    timing: bool = False
    covariance: dict | None = None

    def __post_init__(self):
        if self.covariance is None and self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {sorted(SCHEMES)}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {sorted(DISTRIBUTIONS)}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {sorted(METHODS)}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.m < 1 or self.k < 1 or self.workers < 1:
            raise ValueError("m, k and workers must be >= 1")
        if self.k_grid is not None:
            if not self.k_grid or min(self.k_grid) < 1:
                raise ValueError("k_grid must be a nonempty list of positive integers")
            self.k_grid = sorted({int(k) for k in self.k_grid})
        if self.base_seed < 0:
            raise ValueError("base_seed must be >= 0")
        if self.lam_scale < 0:
            raise ValueError("lam_scale must be >= 0")

    @property
    def spec(self) -> CovarianceSpec:
        if self.covariance is not None:
            c = self.covariance
            return CovarianceSpec(int(c["d"]), tuple(tuple(x) for x in c["components"]), float(c["baseline"]))
        return scheme_spec(self.scheme, self.d)

    @property
    def sample_size(self) -> int:
        if self.n is not None:
            return self.n
        if self.covariance is not None:
            raise ValueError("n is required with a custom covariance")
        return scheme_n(self.scheme)

    @property
    def ks(self) -> list[int]:
        return list(self.k_grid) if self.k_grid is not None else [self.k]

    @classmethod
    def from_json(cls, path, **overrides) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**raw)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass
class ExperimentRecord:
    scheme: str
    distribution: str
    method: str
    n: int
    d: int
    k: int
    replication: int
    angles: tuple[float | None, ...]
    support_tpr: float | None
    support_fpr: float | None
    wall_time_ms: float | None
    seed: int
    status: str = "ok"
    nnz: tuple[int, ...] = field(default=(), repr=False)

    def validate(self):
        for a in self.angles:
            if a is not None and not 0.0 <= a <= 1.0:
                raise NumericError(f"angle {a} outside [0, 1]")
        for name in ("support_tpr", "support_fpr"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise NumericError(f"{name}={v} outside [0, 1]")


def record_header(m: int) -> list[str]:
    return (["scheme", "distribution", "method", "n", "d", "k", "replication"]
            + [f"angle_{j + 1}" for j in range(m)]
            + ["support_tpr", "support_fpr", "wall_time_ms", "seed", "status"])


def fmt(x) -> str:
    """17 significant digits for floats, empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def support_rates(estimated: Iterable[int], truth: Iterable[int], d: int) -> tuple[float, float]:
    """(TPR, FPR) of an estimated support against the true one."""
    est, tru = set(estimated), set(truth)
    tpr = len(est & tru) / len(tru) if tru else 1.0
    fpr = len(est - tru) / (d - len(tru)) if d > len(tru) else 0.0
    return tpr, fpr


def scatter_matrix(X, method: str) -> np.ndarray:
    return METHODS[method](X)


def _replicate(config: ExperimentConfig, r: int) -> list[ExperimentRecord]:
    """All k values for replication r; a failure yields one error row per k."""
    spec = config.spec
    d, n, m = spec.d, config.sample_size, config.m
    if m > spec.m:
        raise ValueError(f"m={m} exceeds the {spec.m} planted components")
    V = spec.eigenvectors()
    truth = sorted(set().union(*(spec.supports()[j] for j in range(m))))
    seed = config.base_seed ^ r
    scheme = "custom" if config.covariance is not None else str(config.scheme)
    common = dict(scheme=scheme, distribution=config.distribution, method=config.method,
                  n=n, d=d, replication=r, seed=seed)
    out = []
    try:
        X = sample(model_for(build_spike_covariance(spec), config.distribution), n, seed=seed)
        M = scatter_matrix(X, config.method)
        lam = config.lam_scale * default_lambda(M, n)
    except ECAError as exc:
        return [ExperimentRecord(k=k, angles=(None,) * m, support_tpr=None, support_fpr=None,
                                 wall_time_ms=None, status=f"error:{type(exc).__name__}", **common)
                for k in config.ks]
    for k in config.ks:
        t0 = time.perf_counter()
        try:
            params = FtpmParams(k=min(k, d), init_sparsity=min(k, d), fantope=FantopeParams(lam=lam))
            found = ftpm_top_m(M, m, params)
        except ECAError as exc:
            out.append(ExperimentRecord(k=k, angles=(None,) * m, support_tpr=None, support_fpr=None,
                                        wall_time_ms=None, status=f"error:{type(exc).__name__}", **common))
            continue
        elapsed = (time.perf_counter() - t0) * 1e3 if config.timing else None
        angles = tuple(sin_angle(found[j].vector, V[:, j]) for j in range(m))
        est = set().union(*(res.support for res in found))
        tpr, fpr = support_rates(est, truth, d)
        rec = ExperimentRecord(k=k, angles=angles, support_tpr=tpr, support_fpr=fpr,
                               wall_time_ms=elapsed, nnz=tuple(res.nnz for res in found), **common)
        rec.validate()
        out.append(rec)
    return out


def _replicate_single_thread(args):
    config, r = args
    with threadpool_limits(limits=1):
        return _replicate(config, r)


def _map_replications(config: ExperimentConfig, reps: Sequence[int]) -> list[list[ExperimentRecord]]:
    jobs = [(config, r) for r in reps]
    if config.workers == 1:
        return [_replicate_single_thread(j) for j in jobs]
    ctx = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=config.workers, mp_context=ctx) as pool:
        return list(pool.map(_replicate_single_thread, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))


def run_experiment(config: ExperimentConfig, out: str | Path | None = None) -> list[ExperimentRecord]:
    """Run every replication and k; optionally write the records CSV.

    Records are sorted by (k, replication). Raises ``ExperimentAborted`` when
    more than 10% of the rows are error rows.
    """
    rows = [rec for batch in _map_replications(config, range(config.replications)) for rec in batch]
    rows.sort(key=lambda rec: (rec.k, rec.replication))
    failed = sum(rec.status != "ok" for rec in rows)
    if failed > FAILURE_LIMIT * len(rows):
        raise ExperimentAborted(f"{failed} of {len(rows)} replications failed")
    if out is not None:
        write_records(rows, out, config.m)
    return rows


def write_records(rows: Sequence[ExperimentRecord], path, m: int):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(record_header(m))
        for rec in rows:
            w.writerow([rec.scheme, rec.distribution, rec.method, rec.n, rec.d, rec.k, rec.replication]
                       + [fmt(a) for a in rec.angles]
                       + [fmt(rec.support_tpr), fmt(rec.support_fpr), fmt(rec.wall_time_ms), rec.seed, rec.status])


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def _mean_se(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else float("nan")
    return float(v.mean()), se


def summarize(rows: Sequence[ExperimentRecord]) -> list[dict]:
    """Per-k means over successful rows: summed angle, angle_1, support size, TPR, FPR."""
    out = []
    for k in sorted({rec.k for rec in rows}):
        ok = [rec for rec in rows if rec.k == k and rec.status == "ok"]
        if not ok:
            continue
        angle_sum, angle_sum_se = _mean_se([sum(rec.angles) for rec in ok])
        angle_1, angle_1_se = _mean_se([rec.angles[0] for rec in ok])
        out.append(dict(
            k=k,
            reps=len(ok),
            angle_1=angle_1,
            angle_1_se=angle_1_se,
            angle_sum=angle_sum,
            angle_sum_se=angle_sum_se,
            total_nnz=float(np.mean([sum(rec.nnz) for rec in ok])),
            tpr=float(np.mean([rec.support_tpr for rec in ok])),
            fpr=float(np.mean([rec.support_fpr for rec in ok])),
        ))
    return out


SUMMARY_COLUMNS = ["k", "reps", "angle_1", "angle_1_se", "angle_sum", "angle_sum_se", "total_nnz", "tpr", "fpr"]


def default_k_grid(d: int) -> list[int]:
    """Even k from 2 up to 2d/5."""
    return list(range(2, max(2, 2 * d // 5) + 1, 2))


def sweep_effective_sample(d_list: Sequence[int], n_list: Sequence[int], distribution: str = "normal",
                           reps: int = 200, k: int = 10, base_seed: int = 0, workers: int = 1,
                           scheme: int = 1, method: str = "eca", out=None) -> list[dict]:
    """Mean leading-angle error over a (d, n) grid on a scheme's covariance shape."""
    table = []
    for d in d_list:
        for n in n_list:
            cfg = ExperimentConfig(scheme=scheme, distribution=distribution, method=method, n=n, d=d,
                                   k=k, replications=reps, base_seed=base_seed, workers=workers)
            rows = [rec for rec in run_experiment(cfg) if rec.status == "ok"]
            mean, se = _mean_se([rec.angles[0] for rec in rows])
            table.append(dict(d=d, n=n, log_d_over_n=math.log(d) / n, mean_angle=mean, se=se, reps=len(rows)))
    if out is not None:
        cols = ["d", "n", "log_d_over_n", "mean_angle", "se", "reps"]
        write_table(out, cols, ([row[c] for c in cols] for row in table))
    return table


def roc_sweep(config: ExperimentConfig, k_grid: Sequence[int] | None = None, out=None) -> list[dict]:
    """Average (FPR, TPR) of the estimated support per k."""
    grid = list(k_grid) if k_grid is not None else (config.k_grid or default_k_grid(config.spec.d))
    rows = run_experiment(replace(config, k_grid=grid))
    table = [dict(k=s["k"], fpr=s["fpr"], tpr=s["tpr"]) for s in summarize(rows)]
    if out is not None:
        write_table(out, ["k", "fpr", "tpr"], ([t["k"], t["fpr"], t["tpr"]] for t in table))
    return table


# external data ----------------------------------------------------------------


def load_csv(path, header: bool = False) -> tuple[np.ndarray, list[str] | None]:
    """Read a rectangular numeric CSV. Returns ``(X, names)``."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if not rows:
        raise ParseError(f"{path}: empty input")
    names = None
    start = 0
    if header:
        names = [c.strip() for c in rows[0]]
        start = 1
        if len(rows) == 1:
            raise ParseError(f"{path}: header present but no data rows")
    width = len(names) if names is not None else len(rows[0])
    data = np.empty((len(rows) - start, width))
    for i, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise ParseError(f"{path}: row {i} has {len(row)} fields, expected {width}")
        for j, cell in enumerate(row, start=1):
            try:
                data[i - start - 1, j - 1] = float(cell)
            except ValueError:
                raise ParseError(f"{path}: row {i}, column {j}: non-numeric value {cell!r}") from None
    return data, names


def leverage(x) -> np.ndarray:
    """Hat-matrix diagonal of a simple regression on the single regressor x."""
    x = np.asarray(x, dtype=float)
    c = x - x.mean()
    ss = float(c @ c)
    if ss == 0:
        raise DataError("regressor has zero variance")
    return 1.0 / x.size + c ** 2 / ss


@dataclass
class AnalysisResult:
    loadings: np.ndarray
    scores: np.ndarray
    leverage: np.ndarray
    high_leverage: int
    names: list[str]


def analyze(X, method: str = "eca", m: int = 3, k: int = 40, lam_scale: float = 1.0,
            names: Sequence[str] | None = None, threshold: float = 0.05, out_dir=None) -> AnalysisResult:
    """Top-m sparse components of a data matrix plus score and leverage tables.

    Leverage is computed from regressing the first component scores on the
    second; with m = 1 it uses the first scores alone.
    """
    from .sampling import check_data

    X = check_data(X)
    n, d = X.shape
    if method not in METHODS:
        raise ValueError(f"method must be one of {sorted(METHODS)}")
    if not 1 <= m <= d:
        raise ValueError(f"m must be in [1, {d}]")
    names = list(names) if names is not None else [f"x{j + 1}" for j in range(d)]
    M = scatter_matrix(X, method)
    lam = lam_scale * default_lambda(M, n)
    found = ftpm_top_m(M, m, FtpmParams(k=min(k, d), init_sparsity=min(k, d), fantope=FantopeParams(lam=lam)))
    L = np.column_stack([res.vector for res in found])
    S = X @ L
    h = leverage(S[:, 1] if m > 1 else S[:, 0])
    result = AnalysisResult(L, S, h, int(np.count_nonzero(h > threshold)), names)
    if out_dir is not None:
        out_dir = Path(out_dir)
        comp = [f"component_{j + 1}" for j in range(m)]
        write_table(out_dir / "loadings.csv", ["variable"] + comp,
                    ([names[i]] + list(L[i]) for i in range(d)))
        write_table(out_dir / "scores.csv", ["row"] + comp + ["leverage"],
                    ([i + 1] + list(S[i]) + [h[i]] for i in range(n)))
    return result
