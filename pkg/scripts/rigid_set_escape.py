"""Members of E_φ and E′ with lengths, budget counts and escape depths."""
import argparse
import csv
import sys

from hyperlab.presets import preset
from hyperlab.rigidsets import BudgetFunction, build_E_phi, build_E_prime, escape_trend, sparsity_check


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", default="ab")
    ap.add_argument("--budget", default="sqrt")
    ap.add_argument("--per-eta", type=int, default=2)
    args = ap.parse_args()
    m = preset("tree2")
    f = BudgetFunction.parse(args.budget)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["set", "index", "branch", "i", "n", "length", "f_length", "escape", "word_length"])
    for label, E in (("E_phi", build_E_phi(m, args.gamma, None, f, args.per_eta)), ("E_prime", build_E_prime(m, f))):
        trend = escape_trend(E, m)
        for k, (mem, esc) in enumerate(zip(E.members, trend)):
            w.writerow([label, k, mem.branch, mem.i, mem.n, mem.length, f(mem.length), "%.12g" % esc,
                        len(mem.element)])
        chk = sparsity_check(E, m, f, T_max=1e4)
        print(f"{label}: {len(E)} members, sparse up to 1e4: {chk.passed}", file=sys.stderr)


if __name__ == "__main__":
    main()
