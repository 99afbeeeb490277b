"""Run the increasing Tempel'man construction on an abelian group and print
per-step data: torsion size, free rank, box size k, |F_n|, c_n."""
import argparse
import csv
import sys

from folnerlab import construct_abelian_tempelman, parse_group_dsl, tempelman_constant


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--group", default="Z/2xZ/3xZ^2")
    ap.add_argument("--N", type=int, default=20)
    args = ap.parse_args()

    G = parse_group_dsl(args.group)
    con = construct_abelian_tempelman(G, args.N)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "a_n", "torsion", "rank", "k", "size", "c_n", "bound"])
    for step, a in zip(con.steps, con.enumeration):
        c = tempelman_constant(step.F)
        w.writerow([step.n, " ".join(map(str, a.data)), len(step.torsion), step.free_rank, step.k,
                    len(step.F), f"{float(c):.6f}", 2**step.free_rank])


if __name__ == "__main__":
    main()
