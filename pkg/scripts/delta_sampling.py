"""δ̂ for the Schottky model against sample size and disk radius."""
import argparse
import csv
import sys

from hyperlab.gromov import SampleRegion, delta_estimate
from hyperlab.presets import preset


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="schottky")
    ap.add_argument("--radii", default="1,2,3,5")
    ap.add_argument("--max-count", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    m = preset(args.model)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["radius", "count", "delta", "doubled"])
    for r in (float(x) for x in args.radii.split(",")):
        n = args.max_count >> 4
        while n <= args.max_count:
            est = delta_estimate(m, SampleRegion(radius=r), count=n, seed=args.seed)
            w.writerow([r, n, "%.12g" % est.value, "%.12g" % est.doubled])
            n *= 2


if __name__ == "__main__":
    main()
