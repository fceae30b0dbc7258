"""Run every bundled robot on every bundled path and print one combined table.

    python3 scripts/run_experiments.py --out results

Runs are sequential so the recorded solve times are not inflated by
sharing a CPU. Columns are ``robot/path``; rows follow the per-run reports.
"""

import argparse
import json
import sys
import time
from pathlib import Path

from lieplan import assets
from lieplan.cli import main
from lieplan.metrics import HOLONOMIC_ONLY, ROWS


def main_(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--duration", type=float, help="shorten every path (s)")
    args = ap.parse_args(argv)

    cmd = ["run", "--all", "--out", args.out]
    if args.duration is not None:
        cmd += ["--duration", str(args.duration)]
    start = time.perf_counter()
    code = main(cmd)
    elapsed = time.perf_counter() - start
    if code:
        return code

    names = [f"{r}__{p}" for r in assets.ROBOTS for p in assets.PATHS]
    reports = {n: json.loads((Path(args.out) / n / "report.json").read_text()) for n in names}
    width = max(len(label) for _, label in ROWS)
    print()
    print(" " * width + "".join(f"{n.replace('__', '/'):>30}" for n in names))
    for field, label in ROWS:
        cells = []
        for n in names:
            v = reports[n].get(field)
            cells.append("-" if v is None and field in HOLONOMIC_ONLY else "n/a" if v is None else f"{v:.4f}")
        print(f"{label:<{width}}" + "".join(f"{c:>30}" for c in cells))
    print(f"\nsuite wall time {elapsed:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main_())
