"""Census of y-smooth pairs (n + d, n) inside a window.

For each prime cutoff y and gap d, list all pairs with both members
y-smooth and compare the count against 2^(8(2 pi(y) + 2)).

    python scripts/stormer_census.py --hi 1000000 --y 2 3 5 7 --d 1 2 3
"""

import argparse
import sys

from friable.smooth_core import build_factor_table
from friable.sunit import certify_count, smooth_pair_difference


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--hi", type=int, default=10**6)
    ap.add_argument("--lo", type=int, default=1)
    ap.add_argument("--y", type=int, nargs="+", default=[2, 3, 5, 7])
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    ap.add_argument("--show", type=int, default=12, help="pairs to print per row")
    args = ap.parse_args(argv)

    table = build_factor_table(args.hi)
    for y in args.y:
        for d in args.d:
            sol = smooth_pair_difference(y, d, args.lo, args.hi, table)
            rep = certify_count(sol)
            pairs = sol.int_pairs()
            shown = ", ".join(f"{x}-{z}" for x, z in pairs[: args.show])
            more = " ..." if len(pairs) > args.show else ""
            print(f"y={y:<3} d={d:<3} M={rep.M:<5} bound=2^{rep.bound_exponent:<4} {shown}{more}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
