"""Log-squared self-interaction of the singular example V0 with its near/far split."""
from weakbs.potential import verify_example_v0


def main():
    rep = verify_example_v0()
    print(f"value (|u| < e)        {rep.value:.10g}")
    print(f"value (|u| < 1)        {rep.value_unit:.10g}")
    print(f"  far part  |u| >= |x|/2  {rep.omega1:.10g}")
    print(f"  near part |u| <  |x|/2  {rep.omega2:.10g}")
    print(f"shell 1 <= |u| < e     {rep.shell:.10g}")
    print(f"converged {rep.converged}, last refinement change {rep.refinement_change:.3g}")
    for cut, v in rep.history:
        print(f"  cutoff exp(-{cut:g}): {v:.10g}")


if __name__ == "__main__":
    main()
