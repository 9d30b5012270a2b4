"""Print pure and fractional equilibria for stars across a C/L grid."""
import argparse
from fractions import Fraction

from inoculation import generators as gen
from inoculation import optimum as opt
from inoculation.errors import PreconditionError
from inoculation.equilibria import star_fractional, star_fractional_profile
from inoculation.game import GameConfig, cost_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", type=int, nargs="+", default=[6, 8, 10, 12, 16])
    ap.add_argument("--ratios", nargs="+", default=["1/2", "1/3", "1/5"], help="C/L values")
    args = ap.parse_args()

    print(f"{'n':>3} {'C/L':>5} {'q root':>10} {'p leaf':>10} {'frac cost':>10} {'pure poa':>9}")
    for n in args.ns:
        for ratio in map(Fraction, args.ratios):
            C, L = ratio, 1
            try:
                p, q = star_fractional(n, C, L)
            except PreconditionError as exc:  # no interior solution in this regime
                print(f"{n:3d} {str(ratio):>5} {type(exc).__name__}")
                continue
            total = cost_profile(gen.star(n), GameConfig(C, L), star_fractional_profile(n, C, L)).total
            rep = opt.poa(gen.star(n), GameConfig(C, L))
            print(f"{n:3d} {str(ratio):>5} {str(q):>10} {str(p):>10} {total:10.5f} {rep.poa:9.4f}")


if __name__ == "__main__":
    main()
