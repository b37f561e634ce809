"""Fixed-step RK4 closed-loop simulation, logging and tracking metrics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .actuation import ACTUATION_MODES, allocate, mixer_matrix, motor_step_derivative, steady_voltage_for
from .control import LOOPS, MODES, SWITCHING, Controller, GainSet
from .dynamics import rotor_residual, state_derivative
from .model import N_STATE, STATE_NAMES, QuadParams
from .trajectory import TrajectorySpec, sample

CSV_HEADER = (
    ("t",) + STATE_NAMES
    + tuple(f"{c}_d" for c in LOOPS)
    + ("U1", "U2", "U3", "U4")
    + tuple(f"S_{c}" for c in LOOPS)
    + tuple(f"e_{c}" for c in LOOPS)
)

# Loops whose tracking error is actively regulated in each controller mode.
# In attitude mode x and y are open loop.
REGULATED = {
    "attitude": ("phi", "theta", "psi", "z"),
    "position": LOOPS,
}


class NonFiniteState(ArithmeticError):
    def __init__(self, msg: str, t: float | None = None, log: "SimLog | None" = None):
        super().__init__(msg if t is None else f"{msg} at t={t:.6g}")
        self.t = t
        self.log = log


def rk4_step(f: Callable, s, t: float, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of ``ds/dt = f(t, s)``."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    s = np.asarray(s, dtype=float)
    h2 = 0.5 * dt
    k1 = f(t, s)
    k2 = f(t + h2, s + h2 * k1)
    k3 = f(t + h2, s + h2 * k2)
    k4 = f(t + dt, s + dt * k3)
    out = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NonFiniteState("non-finite state", t + dt)
    return out


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_end: float = 10.0
    initial_state: tuple = (0.0,) * N_STATE
    actuation: str = "ideal"
    mode: str = "attitude"
    switching: str = "sign"
    epsilon: float = 0.05
    stride: int = 1

    def __post_init__(self):
        object.__setattr__(self, "initial_state", tuple(float(v) for v in self.initial_state))
        if len(self.initial_state) != N_STATE or not all(map(math.isfinite, self.initial_state)):
            raise ValueError("initial_state needs 12 finite components")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be > 0")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be >= dt")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError("stride must be an integer >= 1")
        if self.actuation not in ACTUATION_MODES:
            raise ValueError(f"actuation mode must be one of {ACTUATION_MODES}")
        if self.mode not in MODES:
            raise ValueError(f"controller mode must be one of {MODES}")
        if self.switching not in SWITCHING:
            raise ValueError(f"switching must be one of {SWITCHING}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9))


@dataclass
class SimLog:
    """One row per logged step.

    ``lyapunov`` holds the per-loop diagnostic 0.5*z**2 + 0.5*S**2.
    """

    mode: str
    t: np.ndarray
    state: np.ndarray
    ref: np.ndarray
    u: np.ndarray
    surfaces: np.ndarray
    errors: np.ndarray
    rotor: np.ndarray
    lyapunov: np.ndarray
    alloc_clamped: np.ndarray
    virtual_clamped: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def table(self) -> np.ndarray:
        """Rows in CSV column order."""
        return np.column_stack([self.t, self.state, self.ref, self.u, self.surfaces, self.errors])

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.table():
            w.writerow([repr(float(v)) for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def diagnostics_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["t", "w1", "w2", "w3", "w4"]
            + [f"V_{c}" for c in LOOPS]
            + ["alloc_clamped", "virtual_clamped"]
        )
        for i in range(len(self)):
            w.writerow(
                [repr(float(self.t[i]))]
                + [repr(float(v)) for v in self.rotor[i]]
                + [repr(float(v)) for v in self.lyapunov[i]]
                + [int(self.alloc_clamped[i]), int(self.virtual_clamped[i])]
            )
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def column(self, name: str) -> np.ndarray:
        return self.table()[:, CSV_HEADER.index(name)]


class _Recorder:
    def __init__(self, mode: str):
        self.mode = mode
        self.rows = {k: [] for k in (
            "t", "state", "ref", "u", "surfaces", "errors", "rotor",
            "lyapunov", "alloc_clamped", "virtual_clamped",
        )}

    def add(self, t, s, out, w, alloc_clamped):
        r = self.rows
        r["t"].append(t)
        r["state"].append(np.array(s[:N_STATE], dtype=float))
        r["ref"].append(out.ref.value)
        r["u"].append(tuple(out.u))
        r["surfaces"].append(tuple(out.surfaces))
        r["errors"].append(out.z)
        r["rotor"].append(tuple(float(v) for v in w))
        r["lyapunov"].append(tuple(0.5 * z * z + 0.5 * S * S for z, S in zip(out.z, out.surfaces)))
        r["alloc_clamped"].append(bool(alloc_clamped))
        r["virtual_clamped"].append(bool(out.clamped))

    def build(self) -> SimLog:
        r = self.rows
        shapes = {"state": N_STATE, "ref": 6, "u": 4, "surfaces": 6, "errors": 6, "rotor": 4, "lyapunov": 6}
        arrays = {}
        for k, v in r.items():
            if k in shapes:
                arrays[k] = np.array(v, dtype=float).reshape(-1, shapes[k])
            elif k == "t":
                arrays[k] = np.array(v, dtype=float)
            else:
                arrays[k] = np.array(v, dtype=bool)
        return SimLog(mode=self.mode, **arrays)


def run(config: SimConfig, params: QuadParams, gains: GainSet, traj: TrajectorySpec) -> SimLog:
    """Integrate the closed loop from ``config.initial_state`` to ``config.t_end``.

    The controller is evaluated at every RK4 stage. In ``ideal`` actuation the
    rotor speeds are re-allocated once per step and held over its stages, so
    the controller and plant share the same gyroscopic residual. In ``motor``
    actuation the four rotor speeds are integrated alongside the airframe and
    the plant sees ``mix(rotor speeds)`` instead of the commanded vector.
    """
    ctrl = Controller(params, gains, config.mode, config.switching, config.epsilon)
    c = ctrl.constants
    dt, n = config.dt, config.n_steps
    rec = _Recorder(config.mode)
    motor = config.actuation == "motor"
    M = mixer_matrix(params)

    cache: dict = {}

    def ref_at(t):
        # each step samples at most three distinct times
        r = cache.get(t)
        if r is None:
            if len(cache) > 4:
                cache.clear()
            r = cache[t] = sample(traj, t)
        return r

    s = np.array(config.initial_state, dtype=float)
    out0 = ctrl.step(0.0, s, ref_at(0.0), 0.0)
    alloc = allocate(out0.u, params)
    w = alloc.speeds
    if motor:
        s = np.concatenate([s, w])

    def f_ideal(t, y):
        out = ctrl.step(t, y, ref_at(t), omega_r)
        return state_derivative(y, out.u, omega_r, c, params)

    def f_motor(t, y):
        w = y[N_STATE:]
        om = rotor_residual(w)
        out = ctrl.step(t, y, ref_at(t), om)
        target = allocate(out.u, params).speeds
        wdot = motor_step_derivative(w, steady_voltage_for(target, params), params)
        u_act = M @ (w * w)
        return np.concatenate([state_derivative(y, u_act, om, c, params), wdot])

    f = f_motor if motor else f_ideal
    omega_r = rotor_residual(w)
    for i in range(n + 1):
        t = i * dt
        if motor:
            w = s[N_STATE:]
            omega_r = rotor_residual(w)
            out = ctrl.step(t, s, ref_at(t), omega_r)
            alloc_flag = allocate(out.u, params).clamped
        else:
            out = ctrl.step(t, s, ref_at(t), omega_r)
            alloc = allocate(out.u, params)
            w, alloc_flag = alloc.speeds, alloc.clamped
            omega_r = rotor_residual(w)
            out = ctrl.step(t, s, ref_at(t), omega_r)
        if i % config.stride == 0:
            rec.add(t, s, out, w, alloc_flag)
        if i == n:
            break
        ctrl.commit(t, out)
        try:
            s = rk4_step(f, s, t, dt)
        except NonFiniteState as exc:
            raise NonFiniteState("non-finite state", exc.t, rec.build()) from None
        except ArithmeticError as exc:
            raise NonFiniteState(f"{type(exc).__name__}: {exc}", t + dt, rec.build()) from None
        if motor:
            s[N_STATE:] = np.maximum(s[N_STATE:], 0.0)
    return rec.build()


def _settling_time(t: np.ndarray, err: np.ndarray, band: float):
    outside = np.nonzero(np.abs(err) > band)[0]
    if len(outside) == 0:
        return float(t[0])
    last = outside[-1]
    if last == len(t) - 1:
        return None
    return float(t[last + 1])


def metrics(log: SimLog) -> dict:
    """Per-channel ISE, final and peak absolute error, 5% settling time.

    ISE is a left rectangle sum over the logged samples. The settling band is
    5% of the channel's peak |reference| over the run; channels with an
    all-zero reference use 5% of their peak |error| instead. A channel that
    is still outside its band at the last sample has settling time ``None``.
    """
    if len(log) == 0:
        raise ValueError("empty log")
    h = float(log.t[1] - log.t[0]) if len(log) > 1 else 0.0
    out = {"channels": {}}
    for j, name in enumerate(LOOPS):
        e = log.errors[:, j]
        scale = float(np.max(np.abs(log.ref[:, j])))
        if scale == 0.0:
            scale = float(np.max(np.abs(e)))
        band = 0.05 * scale
        out["channels"][name] = {
            "ise": float(np.sum(e[:-1] ** 2) * h),
            "final_abs_error": float(abs(e[-1])),
            "max_abs_error": float(np.max(np.abs(e))),
            "settling_time": _settling_time(log.t, e, band),
            "band": band,
        }
    reg = REGULATED[log.mode]
    out["regulated"] = list(reg)
    out["total_ise"] = float(sum(out["channels"][c]["ise"] for c in reg))
    return out


def surface_rates(log: SimLog) -> np.ndarray:
    """Fourth-order central difference of the logged surfaces.

    The two rows at each end have no centred stencil and are NaN.
    """
    S = log.surfaces
    h = float(log.t[1] - log.t[0])
    out = np.full_like(S, np.nan)
    if len(S) >= 5:
        out[2:-2] = (S[:-4] - 8.0 * S[1:-3] + 8.0 * S[3:-1] - S[4:]) / (12.0 * h)
    return out
