"""Tabulate log Psi(x, y) / Z(x, y) over the de Bruijn grid.

    python scripts/debruijn_corridor.py [--csv out.csv]
"""

import argparse
import csv
import sys
import time

from friable.config import DeBruijnCorridor
from friable.psi import debruijn_ratio


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--csv", help="also write the table here")
    ap.add_argument("--lo", type=float, default=0.3)
    ap.add_argument("--hi", type=float, default=3.0)
    args = ap.parse_args(argv)

    corridor = DeBruijnCorridor(args.lo, args.hi)
    rows = []
    t0 = time.perf_counter()
    for x, y in corridor.points():
        r = debruijn_ratio(x, y)
        rows.append({"x": x, "y": y, "psi": r.count, "Z": r.Z, "log_psi": r.log_psi,
                     "ratio": r.ratio, "inside": corridor.contains(r.ratio)})
    print(f"{'x':>10} {'y':>5} {'Psi':>10} {'Z':>9} {'log Psi':>9} {'ratio':>7}")
    for row in rows:
        flag = "" if row["inside"] else "  <-- outside"
        print(f"{row['x']:>10} {row['y']:>5} {row['psi']:>10} {row['Z']:9.3f} "
              f"{row['log_psi']:9.3f} {row['ratio']:7.3f}{flag}")
    ratios = [row["ratio"] for row in rows]
    print(f"\n{len(rows)} points in {time.perf_counter() - t0:.1f}s, "
          f"ratio range [{min(ratios):.3f}, {max(ratios):.3f}], corridor [{corridor.lo}, {corridor.hi}]")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0 if all(row["inside"] for row in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
