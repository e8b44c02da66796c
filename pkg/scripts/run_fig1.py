"""Regenerate the four lambda4 classification maps as CSV + SVG, then cross-validate.

    python scripts/run_fig1.py --out fig1            # step 0.005
    python scripts/run_fig1.py --out fig1 --fast     # step 0.02 preset
"""

import argparse
import os
import sys
import time

from memsconv import sweep

LAMBDA4 = (0.0, 0.01, 0.03, 0.06)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="fig1")
    ap.add_argument("--step", type=float, default=0.005)
    ap.add_argument("--fast", action="store_true", help=f"use step {sweep.FAST_STEP}")
    ap.add_argument("--a-grid", type=int, default=101)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args(argv)
    step = sweep.FAST_STEP if args.fast else args.step
    os.makedirs(args.out, exist_ok=True)

    failed = False
    for l4 in LAMBDA4:
        stem = os.path.join(args.out, f"lambda4_{l4:.2f}")
        cfg = sweep.SweepConfig(lambda4=l4, step=step, a_grid_size=args.a_grid, workers=args.workers,
                                csv_path=stem + ".csv", svg_path=stem + ".svg")
        t0 = time.perf_counter()
        records = sweep.sweep(cfg)
        report = sweep.cross_validate(records)
        c = report.counts
        print(f"lambda4={l4:<5} points={len(records):5d} time={time.perf_counter() - t0:6.1f}s "
              f"green={c['GreenFeasible']} blue={c['BlueFeasible']} orange={c['OrangeInfeasible']} "
              f"black={c['BlackInfeasible']} violations={len(report.violations)}")
        failed |= not report.ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
