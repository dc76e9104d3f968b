"""eps ln(-lambda) against its limit -4 pi / U for several grid resolutions.

    python3 scripts/sweep_study.py --potential gaussian --resolutions 16,24,32 --out sweep.csv
"""
import argparse
import math
import sys

from weakbs.cli import render_csv
from weakbs.grid import default_grid
from weakbs.potential import builtin, integral_U
from weakbs.weakcoupling import sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--potential", default="disk")
    ap.add_argument("--eps", default="0.5,0.4,0.3,0.25,0.2,0.15")
    ap.add_argument("--resolutions", default="16,24,32")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()
    V = builtin(args.potential)
    U = integral_U(V).value
    eps = [float(e) for e in args.eps.split(",")]
    rows = []
    for n in (int(x) for x in args.resolutions.split(",")):
        grid = default_grid(V, n)
        for r in sweep(V, grid, eps, U=U, jobs=args.jobs):
            rows.append((n, len(grid), r.epsilon, r.eps_times_ln, abs(r.eps_times_ln + 4 * math.pi / U),
                         r.rel_dev, r.status))
    text = render_csv(("n_r", "nodes", "epsilon", "eps_times_ln", "deviation", "rel_dev", "status"), rows)
    if args.out:
        open(args.out, "w").write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
