"""ECA vs TCA vs TP for the leading eigenvector on schemes 1-3 over a k sweep."""

import argparse
from pathlib import Path

from eca.harness import SUMMARY_COLUMNS, ExperimentConfig, run_experiment, summarize, write_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=200, help="replications (1000 for full scale)")
    ap.add_argument("--schemes", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--dists", nargs="+", default=["normal", "t3", "ec1", "ec2"])
    ap.add_argument("--k-grid", type=int, nargs="+", default=[2, 4, 6, 8, 10, 12, 15, 20, 30, 40])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/leading_vector")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    for scheme in args.schemes:
        for dist in args.dists:
            series = {}
            for method in ("eca", "tca", "tp"):
                cfg = ExperimentConfig(scheme=scheme, distribution=dist, method=method, k_grid=args.k_grid,
                                       replications=args.reps, base_seed=args.seed, workers=args.workers)
                stem = out / f"scheme{scheme}_{dist}_{method}"
                summary = summarize(run_experiment(cfg, stem.with_suffix(".records.csv")))
                write_table(stem.with_suffix(".summary.csv"), SUMMARY_COLUMNS,
                            ([s[c] for c in SUMMARY_COLUMNS] for s in summary))
                series[method] = ([s["total_nnz"] for s in summary], [s["angle_1"] for s in summary])
                print(f"scheme {scheme} {dist:>6} {method}: "
                      + " ".join(f"{s['k']}:{s['angle_1']:.3f}" for s in summary))
            if args.plot:
                from eca.plots import line_plot

                line_plot(series, "support size", "mean |sin angle|", out / f"scheme{scheme}_{dist}.png")


if __name__ == "__main__":
    main()
