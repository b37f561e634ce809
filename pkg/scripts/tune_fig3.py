"""Tune (alpha, k, q) on the attitude scenario and compare with the published gains.

    QUADSMC_THREADS=4 python3 scripts/tune_fig3.py [budget] [seed]
"""

import json
import sys

from quadsmc import config
from quadsmc.tune import optimize, trace_csv


def main(budget=200, seed=0):
    cfg = config.load("tune_fig3")
    prob = cfg.tune_problem()
    best, trace = optimize(prob, budget=int(budget), seed=int(seed))
    j0, jb = trace[0].f, min(e.f for e in trace)
    print(f"baseline ISE {j0:.6g}, best ISE {jb:.6g} after {len(trace)} evaluations")
    print(json.dumps(best.to_dict(), indent=2))
    with open("tune_trace.csv", "w") as fh:
        fh.write(trace_csv(trace, prob.free))


if __name__ == "__main__":
    main(*sys.argv[1:3])
