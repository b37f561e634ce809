"""Step-size studies behind the integrator and reaching-law checks.

Prints the closed-loop RK4 convergence rate on a smooth configuration and
the reaching-law residual under two surface-rate estimators as dt halves.
"""

import dataclasses

import numpy as np

from quadsmc import config
from quadsmc.control import sat
from quadsmc.sim import SimConfig, run, surface_rates


def closed_loop_rate():
    cfg = config.load("fig3_attitude")
    ic = (0.2, 1.0, 1.2, 0.0, 0.2, 0.1) + (0.0,) * 6

    def final(dt):
        sim = SimConfig(dt=dt, t_end=4.0, initial_state=ic, switching="saturation")
        return run(sim, cfg.params, cfg.gains, cfg.trajectory).state[-1]

    ref = final(0.00125)
    errs = {dt: np.max(np.abs(final(dt) - ref)) for dt in (0.04, 0.02, 0.01)}
    dts = sorted(errs, reverse=True)
    for a, b in zip(dts, dts[1:]):
        print(f"closed loop dt {a:g} -> {b:g}: error {errs[a]:.3e} -> {errs[b]:.3e}, rate {np.log2(errs[a] / errs[b]):.2f}")


def reaching_residual(dt, order):
    cfg = config.load("fig3_attitude")
    log = run(dataclasses.replace(cfg.sim, dt=dt, switching="saturation"), cfg.params, cfg.gains, cfg.trajectory)
    S = log.surfaces[:, 0]
    if order == 4:
        Sdot = surface_rates(log)[:, 0]
    else:
        Sdot = np.full_like(S, np.nan)
        Sdot[1:-1] = (S[2:] - S[:-2]) / (2 * dt)
    g, eps = cfg.gains, cfg.sim.epsilon
    r = Sdot + g.q[0] * np.array([sat(v / eps) for v in S]) + g.k[0] * S
    return float(np.sqrt(np.nanmean(r**2)))


def main():
    closed_loop_rate()
    for order in (2, 4):
        coarse, fine = reaching_residual(2e-3, order), reaching_residual(1e-3, order)
        print(f"reaching residual, order-{order} estimator: {coarse:.3e} -> {fine:.3e}, ratio {coarse / fine:.2f}")


if __name__ == "__main__":
    main()
