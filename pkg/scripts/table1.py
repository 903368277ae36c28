"""Print W-noise detection thresholds (noise weight) from closed forms and bisection."""

import argparse

from entwit.thresholds import FamilySpec, bisect_threshold, format_fraction, w_noise_closed_form


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmin", type=int, default=3)
    ap.add_argument("--nmax", type=int, default=9)
    args = ap.parse_args()
    print(f"{'n':>3}  {'theorem1':>10} {'bisect':>12}  {'huber_iii':>10} {'bisect':>12}  {'theorem3':>10}")
    for n in range(args.nmin, args.nmax + 1):
        row = [f"{n:>3}"]
        for crit in ("theorem1", "huber_iii"):
            exact = w_noise_closed_form(n, crit)
            num = bisect_threshold(FamilySpec("w-noise", n), crit).noise
            row.append(f"{format_fraction(exact):>10} {num:12.10f}")
        row.append(f"{format_fraction(w_noise_closed_form(n, 'theorem3')):>10}")
        print("  ".join(row))


if __name__ == "__main__":
    main()
