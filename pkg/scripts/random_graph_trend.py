"""Track n / greedy-cost on G(n, c/n) over a wider range of n than the test grid.

The ratio climbs between n = 100 and n = 400 and flattens afterwards; this
script prints per-n means and the local log-log slope between neighbours.
"""
import argparse
import math

import numpy as np

from inoculation import generators as gen
from inoculation.game import GameConfig
from inoculation.optimum import greedy_optimum


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", type=int, nargs="+", default=[100, 200, 400, 800, 1600, 3200])
    ap.add_argument("--c", type=float, default=2.0)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()

    cfg = GameConfig(1, 1)
    prev = None
    print(f"{'n':>6} {'mean':>8} {'std':>7} {'min':>7} {'max':>7} {'slope':>7}")
    for n in args.ns:
        r = np.array([n / greedy_optimum(gen.gnp(n, args.c / n, s), cfg)[1] for s in range(args.seeds)])
        m = r.mean()
        slope = "" if prev is None else f"{math.log(m / prev[1]) / math.log(n / prev[0]):7.3f}"
        print(f"{n:6d} {m:8.3f} {r.std():7.3f} {r.min():7.3f} {r.max():7.3f} {slope}")
        prev = (n, m)


if __name__ == "__main__":
    main()
