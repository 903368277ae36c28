"""Local-observable counts per criterion versus full tomography, (d^2 - 1)^n."""

import argparse

from entwit.measurements import observable_count


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=10)
    ap.add_argument("--d", type=int, default=2)
    args = ap.parse_args()
    print(f"{'n':>3} {'theorem1':>9} {'theorem3':>9} {'theorem2':>9} {'tomography':>12}")
    for n in range(3, args.nmax + 1):
        t1, t3, t2 = (observable_count(c, n)["total"] for c in ("theorem1", "theorem3", "theorem2"))
        print(f"{n:>3} {t1:>9} {t3:>9} {t2:>9} {(args.d ** 2 - 1) ** n:>12}")


if __name__ == "__main__":
    main()
