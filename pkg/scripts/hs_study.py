"""Nystrom Hilbert-Schmidt norm of Q(alpha) against the autocorrelation quadrature, under refinement."""
import argparse

from weakbs.bsop import assemble, hs_norm, hs_norm_quadrature
from weakbs.grid import default_grid
from weakbs.potential import builtin


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--potential", default="disk")
    ap.add_argument("--alpha", default="0.1,0.5,1,2,10")
    ap.add_argument("--resolutions", default="8,16,32")
    args = ap.parse_args()
    V = builtin(args.potential)
    alphas = [float(a) for a in args.alpha.split(",")]
    ref = {a: hs_norm_quadrature(V, a) for a in alphas}
    print("n_r,alpha,hs_nystrom,hs_quadrature,rel_err")
    for n in (int(x) for x in args.resolutions.split(",")):
        g = default_grid(V, n)
        for a in alphas:
            h = hs_norm(assemble(V, g, a))
            print(f"{n},{a},{h!r},{ref[a]!r},{abs(h - ref[a]) / ref[a]!r}")


if __name__ == "__main__":
    main()
