"""Max spectrum difference over growing balls for two model pairs.

S₁ = {a, b} against S₂ = {a, ab} differ already at radius 1; the Schottky
group against its conjugate agrees to rounding at every radius.
"""
import argparse
import csv
import sys

from hyperlab.presets import preset
from hyperlab.spaces import FreeTree
from hyperlab.spectrum import mls_compare

PAIRS = (("tree2", "tree2-s2"), ("schottky", "schottky-conj"))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-radius", type=int, default=6)
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["model_a", "model_b", "radius", "words", "max_diff", "max_ratio", "witness"])
    ball = FreeTree(2).ball
    for a, b in PAIRS:
        A, B = preset(a), preset(b)
        for r in range(1, args.max_radius + 1):
            c = mls_compare(A, B, ball(r))
            w.writerow([a, b, r, c.count, "%.12g" % c.max_diff, "%.12g" % c.max_ratio, c.witness_diff or ""])


if __name__ == "__main__":
    main()
