#!/usr/bin/env python3
"""Run every property suite over the built-in corpus and write a report.

Usage: python scripts/run_suites.py [--depth N] [--seed S] [--out report.json]
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rtpl.cli import main as cli_main  # noqa: E402


def run() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--depth", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="suite_report.json")
    args = ap.parse_args()
    t0 = time.time()
    rc = cli_main(["check", "--suite", "all", "--depth", str(args.depth),
                   "--seed", str(args.seed), "--out", args.out])
    data = json.loads(Path(args.out).read_text())
    total_viol = sum(len(r["violations"]) for r in data["reports"])
    print(f"\n{len(data['reports'])} reports, {total_viol} violations, "
          f"{time.time() - t0:.1f}s -> {args.out}")
    return rc


if __name__ == "__main__":
    sys.exit(run())
