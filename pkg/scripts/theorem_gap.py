"""How far desk-scale N is from the contradiction.

Prints both sides of Psi(N, y)^(1/2) / (3m) < 2^(8(2 pi(y) + 2)) in log2
form, then the range of log N each case of the case split covers.
"""

import argparse
import math
import sys

from friable.decomp import HYPOTHESIS_SCALE, case_classifier, theorem1_pipeline, theorem2_pipeline
from friable.smooth_core import build_factor_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, nargs="+", default=[10**3, 10**4, 10**5, 10**6])
    ap.add_argument("--y", type=int, nargs="+", default=[2, 3, 5, 7, 11])
    ap.add_argument("--a1", type=int, default=1)
    ap.add_argument("--a2", type=int, default=2)
    ap.add_argument("--m", type=int, default=2, help="m for the multiplicative report")
    args = ap.parse_args(argv)

    table = build_factor_table(max(args.N))
    print(f"{'kind':<6} {'N':>9} {'y':>4} {'M':>4} {'Psi':>9} {'log2 lhs':>9} {'rhs exp':>8} {'gap bits':>9}  case")
    for N in args.N:
        for y in args.y:
            for kind, rep in (("add", theorem1_pipeline(y, args.a1, args.a2, 1, N, table)),
                              ("mult", theorem2_pipeline(y, args.a1, args.a2, 1, N, args.m, table))):
                print(f"{kind:<6} {N:>9} {y:>4} {rep.M:>4} {rep.psi:>9} {rep.log2_lhs:9.2f} "
                      f"{rep.rhs_exponent:>8} {rep.log2_gap:9.2f}  {rep.case_label}")

    print("\nwhere each case lives, in terms of log N, for cutoff y")
    for y in args.y:
        case1_from = math.exp(y)                 # 2 <= y <= log log N
        case2_lo = y / HYPOTHESIS_SCALE          # y < 2^-32 log N
        case2 = f"({case2_lo:.4e}, {case1_from:.4e})" if case2_lo < case1_from else "empty"
        probe = max(case1_from, math.e * 1.0001)
        print(f"  y={y:<4} CASE1 for log N >= {case1_from:.4e} ({case_classifier(probe * 1.0001, y)}); "
              f"CASE2 window {case2}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
