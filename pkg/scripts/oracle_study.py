"""Finite-difference eigenvalue (coarse, fine, extrapolated) next to the Birman-Schwinger one."""
import argparse

from weakbs.grid import default_grid
from weakbs.oracle import cross_validate
from weakbs.potential import builtin
from weakbs.weakcoupling import find_root


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--potential", default="disk")
    ap.add_argument("--eps", default="0.6,0.5,0.4")
    ap.add_argument("--fd-n", default="80,120,160")
    args = ap.parse_args()
    V = builtin(args.potential)
    grid = default_grid(V)
    print("epsilon,fd_n,outcome,lambda_bs,lambda_fd,lambda_fd_fine,lambda_fd_ext,ln_rel_diff")
    for e in (float(x) for x in args.eps.split(",")):
        res = find_root(V, grid, e)
        for n in (int(x) for x in args.fd_n.split(",")):
            cv = cross_validate(V, e, res, n=n)
            print(f"{e},{n},{cv.outcome},{cv.lambda_bs!r},{cv.lambda_fd!r},{cv.lambda_fd_fine!r},"
                  f"{cv.lambda_fd_extrapolated!r},{cv.ln_rel_diff!r}")


if __name__ == "__main__":
    main()
