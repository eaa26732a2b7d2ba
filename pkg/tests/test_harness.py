import csv

import numpy as np
import pytest

from eca import harness
from eca.errors import NumericError, ParseError
from eca.harness import (
    ExperimentAborted,
    ExperimentConfig,
    analyze,
    default_k_grid,
    leverage,
    load_csv,
    record_header,
    roc_sweep,
    run_experiment,
    summarize,
    support_rates,
    sweep_effective_sample,
)
from eca.sampling import CovarianceSpec, build_spike_covariance, model_for, sample, scheme_spec


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


# config -----------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(replications=0)
    with pytest.raises(ValueError):
        ExperimentConfig(method="svd")
    with pytest.raises(ValueError):
        ExperimentConfig(distribution="laplace")
    with pytest.raises(ValueError):
        ExperimentConfig(scheme=7)
    assert ExperimentConfig(k_grid=[10, 5, 5]).ks == [5, 10]


def test_config_json_round_trip(tmp_path):
    cfg = ExperimentConfig(scheme=3, distribution="ec2", method="tca", k=7, replications=5)
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    assert ExperimentConfig.from_json(path) == cfg
    assert ExperimentConfig.from_json(path, k=9, method=None).k == 9
    path.write_text('{"scheme": 1, "colour": "red"}')
    with pytest.raises(ValueError, match="colour"):
        ExperimentConfig.from_json(path)


def test_custom_covariance():
    cfg = ExperimentConfig(covariance={"d": 12, "components": [[4.0, 3]], "baseline": 1.0}, n=40,
                           k=3, replications=2)
    rows = run_experiment(cfg)
    assert rows[0].scheme == "custom" and rows[0].d == 12
    with pytest.raises(ValueError):
        ExperimentConfig(covariance={"d": 12, "components": [[4.0, 3]], "baseline": 1.0}).sample_size


def test_default_k_grid():
    assert default_k_grid(100) == list(range(2, 41, 2))


# records ----------------------------------------------------------------------


def test_support_rates():
    assert support_rates(range(10), range(10), 100) == (1.0, 0.0)
    assert support_rates(range(100), range(10), 100) == (1.0, 1.0)
    assert support_rates([0, 50], range(10), 100) == (0.1, 1 / 90)


def test_csv_schema_and_precision(tmp_path):
    cfg = ExperimentConfig(scheme=1, m=2, k=10, replications=3, base_seed=5)
    rows = run_experiment(cfg, tmp_path / "r.csv")
    table = read_rows(tmp_path / "r.csv")
    assert table[0] == record_header(2)
    assert table[0][:7] == ["scheme", "distribution", "method", "n", "d", "k", "replication"]
    assert [int(r[6]) for r in table[1:]] == [0, 1, 2]
    assert [int(r[-2]) for r in table[1:]] == [5 ^ 0, 5 ^ 1, 5 ^ 2]
    col = {name: i for i, name in enumerate(table[0])}
    for rec, line in zip(rows, table[1:]):
        assert float(line[col["angle_1"]]) == rec.angles[0]
        assert float(line[col["angle_2"]]) == rec.angles[1]
        assert line[col["wall_time_ms"]] == ""
        assert line[col["status"]] == "ok"


def test_run_twice_byte_identical(tmp_path):
    cfg = ExperimentConfig(scheme=2, distribution="t3", k=10, replications=1, base_seed=11)
    run_experiment(cfg, tmp_path / "a.csv")
    run_experiment(cfg, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_worker_count_does_not_change_output(tmp_path):
    cfg = ExperimentConfig(scheme=1, distribution="t3", m=2, k_grid=[5, 10], replications=6, base_seed=3)
    run_experiment(cfg, tmp_path / "w1.csv")
    cfg.workers = 3
    run_experiment(cfg, tmp_path / "w3.csv")
    assert (tmp_path / "w1.csv").read_bytes() == (tmp_path / "w3.csv").read_bytes()


def test_timing_column(tmp_path):
    cfg = ExperimentConfig(scheme=1, k=10, replications=1, timing=True)
    rows = run_experiment(cfg)
    assert rows[0].wall_time_ms > 0


def test_scheme1_gaussian_accuracy():
    cfg = ExperimentConfig(scheme=1, n=100, k=10, replications=200)
    rows = run_experiment(cfg)
    assert np.mean([r.angles[0] for r in rows]) <= 0.35


def test_failures_are_isolated(monkeypatch):
    real = harness.scatter_matrix

    def flaky(X, method, calls=[0]):
        calls[0] += 1
        if calls[0] == 3:
            raise NumericError("injected")
        return real(X, method)

    monkeypatch.setattr(harness, "scatter_matrix", flaky)
    rows = run_experiment(ExperimentConfig(scheme=1, k=10, replications=20))
    bad = [r for r in rows if r.status != "ok"]
    assert len(bad) == 1 and bad[0].replication == 2 and bad[0].status == "error:NumericError"
    assert bad[0].angles == (None,)
    assert all(r.angles[0] is not None for r in rows if r.status == "ok")
    assert len(summarize(rows)) == 1 and summarize(rows)[0]["reps"] == 19


def test_too_many_failures_abort(monkeypatch):
    def broken(X, method):
        raise NumericError("injected")

    monkeypatch.setattr(harness, "scatter_matrix", broken)
    with pytest.raises(ExperimentAborted):
        run_experiment(ExperimentConfig(scheme=1, k=10, replications=5))


# sweeps -----------------------------------------------------------------------


def test_sweep_limits(tmp_path):
    big = sweep_effective_sample([32], [3200], reps=5, out=tmp_path / "s.csv")
    assert big[0]["mean_angle"] <= 0.1
    small = sweep_effective_sample([64], [10], reps=50)
    assert small[0]["mean_angle"] >= 0.8
    table = read_rows(tmp_path / "s.csv")
    assert table[0] == ["d", "n", "log_d_over_n", "mean_angle", "se", "reps"]
    assert float(table[1][2]) == np.log(32) / 3200


def test_roc_endpoints():
    cfg = ExperimentConfig(covariance={"d": 20, "components": [[8.0, 4]], "baseline": 1.0}, n=400,
                           replications=5)
    table = {row["k"]: row for row in roc_sweep(cfg, [4, 20])}
    assert (table[4]["fpr"], table[4]["tpr"]) == (0.0, 1.0)
    assert (table[20]["fpr"], table[20]["tpr"]) == (1.0, 1.0)


def test_roc_eca_dominates_tp_under_t3():
    grid = [5, 10, 20]
    tables = {}
    for method in ("eca", "tp"):
        cfg = ExperimentConfig(scheme=1, n=100, distribution="t3", method=method, replications=30)
        tables[method] = roc_sweep(cfg, grid)
    for e, t in zip(tables["eca"], tables["tp"]):
        assert e["tpr"] >= t["tpr"] - 0.05


# external data ----------------------------------------------------------------


def test_load_csv(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2\n3,4\n5,6\n")
    X, names = load_csv(p)
    np.testing.assert_array_equal(X, [[1, 2], [3, 4], [5, 6]])
    assert names is None
    p.write_text("a,b\n1,2\n3,4\n5,6\n")
    X, names = load_csv(p, header=True)
    np.testing.assert_array_equal(X, [[1, 2], [3, 4], [5, 6]])
    assert names == ["a", "b"]


def test_load_csv_errors(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("")
    with pytest.raises(ParseError, match="empty"):
        load_csv(p)
    p.write_text("1,2\n3\n")
    with pytest.raises(ParseError, match="row 2"):
        load_csv(p)
    p.write_text("1,2\n3,abc\n")
    with pytest.raises(ParseError, match="row 2, column 2"):
        load_csv(p)


def test_leverage():
    h = leverage([0.0, 0.0, 0.0, 3.0])
    np.testing.assert_allclose(h, [1 / 4 + 1 / 12] * 3 + [1 / 4 + 9 / 12])
    assert h.sum() == pytest.approx(2)


def test_analyze_matches_experiment_path(tmp_path):
    spec = scheme_spec(1)
    X = sample(model_for(build_spike_covariance(spec), "normal"), 100, seed=4)
    path = tmp_path / "d.csv"
    np.savetxt(path, X, delimiter=",", fmt="%.17g")
    Y, _ = load_csv(path)
    assert np.array_equal(X, Y)
    res = analyze(Y, "eca", m=2, k=10, out_dir=tmp_path)
    cfg = ExperimentConfig(scheme=1, n=100, m=2, k=10, replications=1, base_seed=4)
    rec = run_experiment(cfg)[0]
    V = spec.eigenvectors()
    for j in range(2):
        angle = np.sqrt(max(0.0, 1 - (res.loadings[:, j] @ V[:, j]) ** 2))
        assert angle == pytest.approx(rec.angles[j], abs=1e-7)
    loadings = read_rows(tmp_path / "loadings.csv")
    assert loadings[0] == ["variable", "component_1", "component_2"]
    assert np.max(np.abs(np.array([r[1:] for r in loadings[1:]], dtype=float) - res.loadings)) <= 1e-12
    scores = read_rows(tmp_path / "scores.csv")
    assert len(scores) == 101 and scores[0][-1] == "leverage"


def test_analyze_sparsity_on_wide_data(rng):
    X = rng.standard_t(3, size=(150, 116))
    res = analyze(X, "eca", m=3, k=40)
    assert res.loadings.shape == (116, 3)
    assert all(np.count_nonzero(res.loadings[:, j]) <= 40 for j in range(3))


def test_leverage_diagnostic_favours_eca():
    spec = CovarianceSpec(40, [(6.0, 10), (3.0, 10), (2.0, 10)], 1.0)
    S = build_spike_covariance(spec)
    eca_total = tp_total = 0
    for seed in range(10):
        X = sample(model_for(S, "normal"), 544, seed=seed)
        rng = np.random.default_rng(10_000 + seed)
        # 5% of rows carry Cauchy noise on five coordinates outside every support
        X[:27, 30:35] += rng.standard_cauchy((27, 5))
        eca_total += analyze(X, "eca", m=3, k=10).high_leverage
        tp_total += analyze(X, "tp", m=3, k=10).high_leverage
    assert eca_total < tp_total
