"""Mean-square decay of box averages for the Bernoulli shift on Z^2, over
several seeds, so the single-path spread can be seen next to the MSE slope."""
import argparse
import json

from folnerlab import (
    BernoulliAction,
    Family,
    FolnerSequenceSpec,
    average,
    box_set,
    convergence_sweep,
    coordinate_function,
    free_abelian,
    mse_slope,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--indices", default="10,20,40,80")
    ap.add_argument("--paths", type=int, default=32)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--p", type=float, default=0.5)
    args = ap.parse_args()

    G = free_abelian(2)
    idx = [int(x) for x in args.indices.split(",")]
    spec = FolnerSequenceSpec(G, Family.BOXES, max(idx))
    phi = coordinate_function(2)
    F = box_set(G, max(idx))
    for seed in range(args.seeds):
        act = BernoulliAction(G, args.p, seed)
        res = convergence_sweep(act, phi, spec, idx, args.paths)
        single = average(act, phi, F)
        print(json.dumps({"seed": seed, "slope": round(mse_slope(res), 4),
                          "mse": [r.mse for r in res], "single_path_dev": round(single.deviation, 5)}))


if __name__ == "__main__":
    main()
