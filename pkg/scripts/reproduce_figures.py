"""Simulate the bundled scenarios and write CSV, metrics and SVG figures.

    python3 scripts/reproduce_figures.py [out_dir]
"""

import sys
from pathlib import Path

from quadsmc.cli import cmd_simulate

SCENARIOS = ("fig3_attitude", "fig7_position", "motor_mode", "hover")


def main(out="figures"):
    status = 0
    for name in SCENARIOS:
        code = cmd_simulate(name, Path(out) / name)
        print(f"{name}: exit {code} -> {Path(out) / name}")
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:2]))
