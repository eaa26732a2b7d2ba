"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import DataError, NumericError
from .fantope import FantopeParams, default_lambda
from .ftpm import FtpmParams, select_k
from .harness import (
    METHODS,
    SUMMARY_COLUMNS,
    ExperimentConfig,
    analyze,
    default_k_grid,
    load_csv,
    roc_sweep,
    run_experiment,
    summarize,
    sweep_effective_sample,
    write_table,
)
from .sampling import DISTRIBUTIONS, build_spike_covariance, model_for, sample

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(p, experiment: bool = True):
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--scheme", type=int, choices=range(1, 7))
    p.add_argument("--dist", choices=sorted(DISTRIBUTIONS))
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    if experiment:
        p.add_argument("--reps", type=int)
        p.add_argument("--method", choices=sorted(METHODS))
        p.add_argument("--k", type=int)
        p.add_argument("--k-grid", type=_int_list, help="comma-separated k values")
        p.add_argument("--m", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--lam-scale", type=float)
        p.add_argument("--timing", action="store_true", default=None, help="record wall_time_ms")
        p.add_argument("--plot", action="store_true", help="also write a PNG of the summary")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eca", description="Elliptical component analysis experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-cov", help="write a scheme covariance matrix")
    _common(p, experiment=False)

    p = sub.add_parser("simulate", help="write one simulated data matrix")
    _common(p, experiment=False)

    p = sub.add_parser("run", help="replicated experiment, per-replication CSV plus summary")
    _common(p)

    p = sub.add_parser("sweep", help="mean angle over a (d, n) grid")
    _common(p)
    p.add_argument("--d-list", type=_int_list, default=[32, 64])
    p.add_argument("--n-list", type=_int_list, default=[25, 50, 100, 200, 400, 800])

    p = sub.add_parser("roc", help="support TPR/FPR per k")
    _common(p)

    for name, helptext in (("analyze", "sparse components of a CSV data set"),
                           ("select-k", "choose k on a validation split")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--data", help="numeric CSV, rows are observations")
        p.add_argument("--header", action="store_true", help="first CSV row holds column names")
        if name == "select-k":
            p.add_argument("--split", type=float, default=0.5, help="training fraction")
    return parser


def _config(args) -> ExperimentConfig:
    overrides = dict(
        scheme=args.scheme, distribution=args.dist, method=getattr(args, "method", None), n=args.n, d=args.d,
        m=getattr(args, "m", None), k=getattr(args, "k", None), k_grid=getattr(args, "k_grid", None),
        replications=getattr(args, "reps", None), base_seed=args.seed, output_dir=args.out,
        workers=getattr(args, "workers", None), lam_scale=getattr(args, "lam_scale", None),
        timing=getattr(args, "timing", None),
    )
    if args.config:
        return ExperimentConfig.from_json(args.config, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def _outdir(args, cfg: ExperimentConfig) -> Path:
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _data(args, cfg: ExperimentConfig):
    if args.data:
        return load_csv(args.data, header=args.header)
    X = sample(model_for(build_spike_covariance(cfg.spec), cfg.distribution), cfg.sample_size, seed=cfg.base_seed)
    return X, None


def cmd_gen_cov(args):
    cfg = _config(args)
    out = _outdir(args, cfg)
    path = out / f"sigma_scheme{cfg.scheme}_d{cfg.spec.d}.csv"
    np.savetxt(path, build_spike_covariance(cfg.spec), delimiter=",", fmt="%.17g")
    print(path)


def cmd_simulate(args):
    cfg = _config(args)
    out = _outdir(args, cfg)
    X = sample(model_for(build_spike_covariance(cfg.spec), cfg.distribution), cfg.sample_size, seed=cfg.base_seed)
    path = out / f"data_scheme{cfg.scheme}_{cfg.distribution}_seed{cfg.base_seed}.csv"
    np.savetxt(path, X, delimiter=",", fmt="%.17g")
    print(path)


def cmd_run(args):
    cfg = _config(args)
    out = _outdir(args, cfg)
    rows = run_experiment(cfg, out / "records.csv")
    summary = summarize(rows)
    write_table(out / "summary.csv", SUMMARY_COLUMNS, ([s[c] for c in SUMMARY_COLUMNS] for s in summary))
    for s in summary:
        print(f"k={s['k']:>3}  nnz={s['total_nnz']:.1f}  angle_1={s['angle_1']:.4f}  angle_sum={s['angle_sum']:.4f}")
    if args.plot:
        from .plots import line_plot

        line_plot({cfg.method: ([s["total_nnz"] for s in summary], [s["angle_sum"] for s in summary])},
                  "total support size", "mean summed |sin angle|", out / "summary.png")


def cmd_sweep(args):
    cfg = _config(args)
    out = _outdir(args, cfg)
    table = sweep_effective_sample(args.d_list, args.n_list, cfg.distribution, cfg.replications, cfg.k,
                                   cfg.base_seed, cfg.workers, cfg.scheme, cfg.method, out=out / "sweep.csv")
    for row in table:
        print(f"d={row['d']:>4} n={row['n']:>5} log(d)/n={row['log_d_over_n']:.4f} angle={row['mean_angle']:.4f}")
    if args.plot:
        from .plots import line_plot

        series = {}
        for d in args.d_list:
            pts = [r for r in table if r["d"] == d]
            series[f"d={d}"] = ([r["log_d_over_n"] for r in pts], [r["mean_angle"] for r in pts])
        line_plot(series, "log d / n", "mean |sin angle|", out / "sweep.png")


def cmd_roc(args):
    cfg = _config(args)
    out = _outdir(args, cfg)
    table = roc_sweep(cfg, cfg.k_grid or default_k_grid(cfg.spec.d), out=out / "roc.csv")
    for row in table:
        print(f"k={row['k']:>3} fpr={row['fpr']:.4f} tpr={row['tpr']:.4f}")
    if args.plot:
        from .plots import line_plot

        line_plot({cfg.method: ([r["fpr"] for r in table], [r["tpr"] for r in table])},
                  "false positive rate", "true positive rate", out / "roc.png")


def cmd_analyze(args):
    cfg = _config(args)
    out = _outdir(args, cfg)
    X, names = _data(args, cfg)
    res = analyze(X, cfg.method, cfg.m, cfg.k, cfg.lam_scale, names=names, out_dir=out)
    nnz = [int(np.count_nonzero(res.loadings[:, j])) for j in range(res.loadings.shape[1])]
    print(f"components: {len(nnz)}  nonzeros: {nnz}  high-leverage points: {res.high_leverage}")
    if args.plot and res.scores.shape[1] > 1:
        from .plots import _pyplot

        plt = _pyplot()
        fig, ax = plt.subplots(figsize=(4, 4))
        ax.scatter(res.scores[:, 0], res.scores[:, 1], s=6)
        ax.set_xlabel("component 1 score")
        ax.set_ylabel("component 2 score")
        fig.tight_layout()
        fig.savefig(out / "scores.png")
        plt.close(fig)


def cmd_select_k(args):
    cfg = _config(args)
    out = _outdir(args, cfg)
    X, _ = _data(args, cfg)
    if not 0 < args.split < 1:
        raise UsageError("--split must be in (0, 1)")
    cut = int(round(args.split * X.shape[0]))
    if cut < 2 or X.shape[0] - cut < 2:
        raise DataError("each split needs at least 2 observations")
    est = METHODS[cfg.method]
    K = est(X[:cut])
    grid = cfg.k_grid or default_k_grid(X.shape[1])
    params = FtpmParams(k=grid[0], fantope=FantopeParams(lam=cfg.lam_scale * default_lambda(K, cut)))
    sel = select_k(X[:cut], X[cut:], grid, params, estimator=est)
    write_table(out / "select_k.csv", ["k", "score"], sorted(sel.scores.items()))
    print(f"selected k = {sel.k}")


COMMANDS = {
    "gen-cov": cmd_gen_cov,
    "simulate": cmd_simulate,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "roc": cmd_roc,
    "analyze": cmd_analyze,
    "select-k": cmd_select_k,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, TypeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
