"""Mean leading-angle error over a (d, n) grid, normal and t(3) data.

Curves for different d should overlap when plotted against log(d)/n.
"""

import argparse
from pathlib import Path

from eca.harness import sweep_effective_sample


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=200, help="replications per cell (1000 for full scale)")
    ap.add_argument("--d-list", type=int, nargs="+", default=[32, 64, 100])
    ap.add_argument("--n-list", type=int, nargs="+", default=[10, 25, 50, 100, 200, 400, 800])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/effective_sample")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    for dist in ("normal", "t3"):
        table = sweep_effective_sample(args.d_list, args.n_list, dist, args.reps, k=10, base_seed=args.seed,
                                       workers=args.workers, out=out / f"sweep_{dist}.csv")
        if args.plot:
            from eca.plots import line_plot

            series = {f"d={d}": ([r["log_d_over_n"] for r in table if r["d"] == d],
                                 [r["mean_angle"] for r in table if r["d"] == d]) for d in args.d_list}
            line_plot(series, "log d / n", "mean |sin angle|", out / f"sweep_{dist}.png")
        print(f"wrote {out / f'sweep_{dist}.csv'}")


if __name__ == "__main__":
    main()
