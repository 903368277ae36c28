"""Scan the GHZ-W family and summarize the detection regions.

Writes the CSV region file and prints, for a few alpha columns, the beta
at which each criterion starts detecting.
"""

import argparse
import time

from entwit.thresholds import scan_region


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--criteria", default="theorem1,huber_iii,theorem3")
    ap.add_argument("--output", default="ghz_w_region.csv")
    args = ap.parse_args()

    t0 = time.perf_counter()
    grid = scan_region(args.n, args.criteria.split(","), (args.steps, args.steps))
    grid.to_csv(args.output)
    print(f"wrote {args.output} ({int(grid.valid.sum())} cells, {time.perf_counter() - t0:.2f} s)")

    cols = sorted({0, args.steps // 10, args.steps // 4, args.steps // 2})
    for c in grid.criteria:
        parts = []
        for ia in cols:
            b = grid.boundary(c, ia)
            parts.append(f"alpha={grid.alphas[ia]:.3f}: " + (", ".join(f"{x:.4f}" for x in b) or "-"))
        print(f"{c:>10}  " + " | ".join(parts))


if __name__ == "__main__":
    main()
