"""Literal against corrected main-relation defects over seeded tree cases."""
import argparse
import collections
import csv
import sys

import numpy as np

from hyperlab.busemann import Convention
from hyperlab.errors import PreconditionFailed
from hyperlab.experiments import random_word
from hyperlab.presets import preset
from hyperlab.spectrum import main_relation_defect


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    m = preset("tree2")
    rng = np.random.default_rng(args.seed)
    lit, corr = collections.Counter(), collections.Counter()
    done = skipped = 0
    while done < args.cases:
        eta, g = random_word(rng, 2, 1, 6), random_word(rng, 2, 1, 6)
        if not g.cyclic_length():
            continue
        try:
            r = main_relation_defect(m, eta, g, int(rng.integers(1, 31)), Convention.DIRECT)
        except PreconditionFailed:
            skipped += 1
            continue
        lit[r.literal.estimate] += 1
        corr[r.corrected.estimate] += 1
        done += 1
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["form", "defect", "count"])
    for name, hist in (("literal", lit), ("corrected", corr)):
        for k in sorted(hist):
            w.writerow([name, "%.12g" % k, hist[k]])
    print(f"{done} cases, {skipped} outside the preconditions", file=sys.stderr)


if __name__ == "__main__":
    main()
