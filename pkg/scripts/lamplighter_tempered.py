"""Tempel'man constants of the lamplighter standard family and the greedy
tempered subsequence for a few values of C. Prints CSV."""
import argparse
import csv
import sys

from folnerlab import (
    Family,
    FolnerSequenceSpec,
    extract_tempered,
    lamplighter,
    lamplighter_standard,
    tempelman_constant,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--max", type=int, default=12)
    ap.add_argument("--C", type=float, nargs="+", default=[2.5, 3.0, 4.0, 8.0])
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "size", "c_n"])
    for n in range(1, args.max + 1):
        F = lamplighter_standard(n)
        w.writerow([n, len(F), float(tempelman_constant(F))])
    print()
    spec = FolnerSequenceSpec(lamplighter(), Family.LAMPLIGHTER_STANDARD, args.max)
    w.writerow(["C", "indices", "gaps"])
    for C in args.C:
        idx = extract_tempered(spec, C)
        gaps = [b - a for a, b in zip(idx, idx[1:])]
        w.writerow([C, " ".join(map(str, idx)), " ".join(map(str, gaps))])


if __name__ == "__main__":
    main()
