"""Sweep the free fractions around the default configuration.

    python3 scripts/tuning_sweep.py                      # 3x3x3 grid, winner orbit
    python3 scripts/tuning_sweep.py --points 5 --budget 150 --workers 4

Each fraction gets --points evenly spaced values in its --span around the
default. Budget beyond the grid is spent on coordinate descent.
"""

import argparse
import json
import time
from fractions import Fraction

from paramexcl.config import DEFAULT
from paramexcl.tuner import SearchSpace, summary_line, tune

FIELDS = ("s_alpha1", "s_gamma1", "s_gamma2")


def axis(center, span, points):
    if points == 1:
        return (center,)
    step = 2 * span / (points - 1)
    vals = (center - span + i * step for i in range(points))
    return tuple(v for v in vals if 0 < v < 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--points", type=int, default=3)
    ap.add_argument("--span", type=Fraction, default=Fraction(1, 20))
    ap.add_argument("--budget", type=int, default=None, help="default: grid size")
    ap.add_argument("--orbit", choices=["off", "winner", "all"], default="winner")
    ap.add_argument("--mode", choices=["compat", "strict"], default="compat")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--top", type=int, default=10)
    ap.add_argument("--json", action="store_true", help="print the full result as JSON")
    args = ap.parse_args()

    grids = {f: axis(getattr(DEFAULT, f), args.span, args.points) for f in FIELDS}
    space = SearchSpace.around(**grids)
    budget = args.budget or space.size
    t0 = time.perf_counter()
    result = tune(space, budget, args.mode, orbit=args.orbit, workers=args.workers)
    elapsed = time.perf_counter() - t0

    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
        return 0
    print(f"grid {space.size} points, evaluated {result.evaluated}, {len(result.frontier)} certifiable, {elapsed:.1f} s")
    for c in result.frontier[:args.top]:
        print("  " + summary_line(c))
    if result.failures:
        print("failures  " + "  ".join(f"{k}:{v}" for k, v in sorted(result.failures.items())))
    if result.winner_orbit is not None:
        print(f"winner orbit {result.winner_orbit.verdict.value}")
    return 0 if result.best else 1


if __name__ == "__main__":
    raise SystemExit(main())
