"""Support-recovery ROC (FPR vs TPR over k) for ECA, TCA and TP on schemes 1-3."""

import argparse
from pathlib import Path

from eca.harness import ExperimentConfig, roc_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=200, help="replications (1000 for full scale)")
    ap.add_argument("--schemes", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--dists", nargs="+", default=["normal", "t3", "ec1", "ec2"])
    ap.add_argument("--k-grid", type=int, nargs="+", default=[1, 2, 4, 6, 8, 10, 12, 15, 20, 30, 40, 60])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/roc")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    for scheme in args.schemes:
        for dist in args.dists:
            series = {}
            for method in ("eca", "tca", "tp"):
                cfg = ExperimentConfig(scheme=scheme, distribution=dist, method=method,
                                       replications=args.reps, base_seed=args.seed, workers=args.workers)
                table = roc_sweep(cfg, args.k_grid, out=out / f"scheme{scheme}_{dist}_{method}.csv")
                series[method] = ([r["fpr"] for r in table], [r["tpr"] for r in table])
            if args.plot:
                from eca.plots import line_plot

                line_plot(series, "false positive rate", "true positive rate", out / f"scheme{scheme}_{dist}.png")
            print(f"scheme {scheme} {dist}: done")


if __name__ == "__main__":
    main()
