"""c(γⁿ,γ⁻)/n enclosures and the coset defect for equal-spectrum matrix pairs."""
import argparse
import csv
import sys

from hyperlab.filling import coset_relation_defect
from hyperlab.presets import preset


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", default="a:a,b:ab,aB:a,ab:aB")
    ap.add_argument("--n", type=int, default=8)
    args = ap.parse_args()
    A, B = preset("schottky"), preset("schottky-conj")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["h", "gamma", "quantity", "n", "lower", "upper", "bound"])
    for pair in args.pairs.split(","):
        h, g = pair.split(":")
        c = coset_relation_defect(A, B, h, g, args.n)
        w.writerow([h, g, "defect", args.n, "%.12g" % c.defect.lower, "%.12g" % c.defect.upper, "%.12g" % c.bound])
        for k, v in c.ratios:
            w.writerow([h, g, "ratio", k, "%.12g" % v.lower, "%.12g" % v.upper, ""])


if __name__ == "__main__":
    main()
