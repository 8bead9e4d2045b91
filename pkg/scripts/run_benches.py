#!/usr/bin/env python3
"""Run the three example benches into bench_out/<name>/ and print summaries."""

import json
import sys
from pathlib import Path

from qfo.cli import main

HERE = Path(__file__).parent
BENCHES = ["lens_bench", "four_f_bench", "pulse_shaper_bench"]


def run(out_root: Path) -> int:
    worst = 0
    for name in BENCHES:
        out = out_root / name
        code = main(["run", str(HERE / f"{name}.toml"), "--out", str(out)])
        worst = max(worst, code)
        summary_path = out / "summary.json"
        if summary_path.exists():
            summary = json.loads(summary_path.read_text())
            norm = summary.get("output", {}).get("norm_sq")
            print(f"{name}: exit {code}, output norm^2 = {norm}")
        else:
            print(f"{name}: exit {code}")
    return worst


if __name__ == "__main__":
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("bench_out")
    sys.exit(run(root))
