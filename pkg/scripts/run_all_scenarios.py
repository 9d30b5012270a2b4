"""Run every experiment scenario and write CSV, fit JSON and SVG files."""
import argparse
import time
from pathlib import Path

from inoculation.experiments import SCENARIOS, Scenario, run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", choices=sorted(SCENARIOS), default=None)
    ap.add_argument("--stamp", action="store_true", help="add a generated-at header line")
    args = ap.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in args.only or SCENARIOS:
        t0 = time.perf_counter()
        res = run_scenario(Scenario(name, out=str(outdir / f"{name}.csv"), plot=str(outdir / f"{name}.svg"),
                                    reproducible=not args.stamp, workers=args.workers))
        errors = sum(1 for r in res.rows if r.get("error"))
        fits = ", ".join(f"{k}: {v['exponent']:.3f} (r2 {v['r2']:.4f})" for k, v in res.fits.items())
        print(f"{name:24s} rows={len(res.rows):4d} errors={errors} {time.perf_counter() - t0:6.1f}s  {fits}")


if __name__ == "__main__":
    main()
