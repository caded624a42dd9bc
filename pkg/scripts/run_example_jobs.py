#!/usr/bin/env python3
"""Run every bundled job config through the CLI driver.

Writes one report directory per config under ./example_reports and prints a
summary table.  Useful as a post-install smoke run and as a usage example.
"""

import sys
from pathlib import Path

from vielbein.cli import main

ROOT = Path(__file__).resolve().parent.parent


def run_all(out_root: Path) -> int:
    configs = sorted((ROOT / "configs").glob("*.json"))
    if not configs:
        print("no configs found", file=sys.stderr)
        return 2
    worst = 0
    for cfg in configs:
        out = out_root / cfg.stem
        print(f"== {cfg.name}")
        code = main(["run", str(cfg), "--out", str(out), "--csv"])
        print(f"   exit {code}, report {out / 'report.json'}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(run_all(Path("example_reports")))
