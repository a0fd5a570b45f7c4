"""Barycenter descent on the tree toward a random far point, one row per step."""
import argparse
import csv
import sys

import numpy as np

from hyperlab.boundary import limit_set_sample
from hyperlab.experiments import long_random_word
from hyperlab.filling import barycenter_descent, instance, line_witnesses
from hyperlab.presets import preset
from hyperlab.words import Word


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--distance", type=int, default=300_000)
    ap.add_argument("--K", type=float, default=101.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    m = preset("tree2")
    r = long_random_word(np.random.default_rng(args.seed), m.rank, args.distance)
    e = Word.identity()
    W = line_witnesses(m, e, r) + tuple(limit_set_sample(m, 4, 1))
    tr = barycenter_descent(instance(m, r, W, args.K), e)
    w = csv.writer(sys.stdout, lineterminator="\n")
    # on a tree ρ̂ equals the distance to the target
    w.writerow(["step", "rho", "decrease"])
    prev = None
    for k, st in enumerate(tr.steps):
        w.writerow([k, "%.12g" % st.rho, "" if prev is None else "%.12g" % (prev - st.rho)])
        prev = st.rho
    print(f"final distance {m.distance(tr.final_point, r)}, stop radius {tr.stop_radius:g}, "
          f"finding: {tr.finding or 'none'}", file=sys.stderr)


if __name__ == "__main__":
    main()
