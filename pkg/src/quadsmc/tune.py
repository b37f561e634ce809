"""Bounded Nelder-Mead tuning of controller gains against tracking ISE."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .control import LOOPS, GainSet
from .model import QuadParams
from .sim import NonFiniteState, SimConfig, metrics, run
from .trajectory import TrajectorySpec

PENALTY = 1e12
DEFAULT_BOUNDS = (0.0, 1000.0)
GAIN_FIELDS = ("alpha", "k", "q")


def _component_slots(name: str) -> tuple[str, list[int]]:
    """'alpha' -> every loop; 'alpha.phi' -> one loop."""
    fld, _, loop = name.partition(".")
    if fld not in GAIN_FIELDS:
        raise ValueError(f"unknown gain component {name!r}")
    if not loop:
        return fld, list(range(6))
    if loop not in LOOPS:
        raise ValueError(f"unknown loop in gain component {name!r}")
    return fld, [LOOPS.index(loop)]


@dataclass(frozen=True)
class TuneProblem:
    """Which gain components are free, their box, and the scenario to score.

    A free component ``"alpha"`` moves every loop's alpha together;
    ``"alpha.theta"`` moves only the pitch loop.
    """

    config: SimConfig
    params: QuadParams
    trajectory: TrajectorySpec
    base_gains: GainSet = field(default_factory=GainSet)
    free: tuple = GAIN_FIELDS
    bounds: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(self.free))
        if not self.free:
            raise ValueError("at least one gain component must be free")
        for name in self.free:
            _component_slots(name)
        bounds = tuple(tuple(map(float, b)) for b in self.bounds) or (DEFAULT_BOUNDS,) * len(self.free)
        if len(bounds) != len(self.free):
            raise ValueError("need one (low, high) pair per free component")
        if any(not lo < hi for lo, hi in bounds):
            raise ValueError("bounds need low < high")
        object.__setattr__(self, "bounds", bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds])

    def vector(self, gains: GainSet) -> np.ndarray:
        out = []
        for name in self.free:
            fld, slots = _component_slots(name)
            out.append(getattr(gains, fld)[slots[0]])
        return np.array(out)

    def gains(self, x: Sequence[float]) -> GainSet:
        vals = {f: list(getattr(self.base_gains, f)) for f in GAIN_FIELDS}
        for name, v in zip(self.free, x):
            fld, slots = _component_slots(name)
            for j in slots:
                vals[fld][j] = float(v)
        return GainSet(**vals)

    def in_bounds(self, gains: GainSet) -> bool:
        x = self.vector(gains)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


def objective(gains: GainSet, problem: TuneProblem) -> float:
    """Total ISE of the regulated loops; diverged rollouts score ``PENALTY``."""
    if not problem.in_bounds(gains):
        raise ValueError("gains outside the tuning box")
    try:
        log = run(problem.config, problem.params, gains, problem.trajectory)
    except NonFiniteState:
        return PENALTY
    j = metrics(log)["total_ise"]
    return j if math.isfinite(j) else PENALTY


def vector_objective(x, problem: TuneProblem) -> float:
    try:
        gains = problem.gains(x)
    except ValueError:
        # e.g. alpha == 0 on the box edge
        return PENALTY
    return objective(gains, problem)


@dataclass
class TraceEntry:
    index: int
    x: tuple
    f: float
    best: float


def _workers() -> int:
    raw = os.environ.get("QUADSMC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    lower: Sequence[float],
    upper: Sequence[float],
    budget: int,
    seed: int = 0,
    spread: float = 0.1,
    workers: int = 1,
    xtol: float = 1e-9,
):
    """Minimise ``f`` inside a box with a projected Nelder-Mead simplex.

    Every trial point is clipped to the box before evaluation. The initial
    simplex perturbs each coordinate of ``x0`` by ``spread * |x0_i|`` (or
    ``spread`` of the box width when x0_i is 0) with a seed-dependent sign.
    Stops after ``budget`` evaluations or when the simplex collapses below
    ``xtol``. Returns ``(x_best, f_best, trace)``.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    x0 = np.clip(np.asarray(x0, dtype=float), lo, hi)
    n = len(x0)
    if budget < n + 1:
        raise ValueError(f"budget must be >= dimension + 1 = {n + 1}")
    rng = np.random.default_rng(seed)
    trace: list[TraceEntry] = []
    best = math.inf

    def record(points, values):
        nonlocal best
        for x, v in zip(points, values):
            best = min(best, v)
            trace.append(TraceEntry(len(trace), tuple(float(c) for c in x), float(v), best))

    def evaluate(points):
        points = [np.clip(p, lo, hi) for p in points][: budget - len(trace)]
        if workers > 1 and len(points) > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                values = list(ex.map(f, points))
        else:
            values = [f(p) for p in points]
        record(points, values)
        return points, values

    signs = rng.choice([-1.0, 1.0], size=n)
    verts = [x0]
    for i in range(n):
        step = spread * abs(x0[i]) if x0[i] != 0 else spread * (hi[i] - lo[i])
        v = x0.copy()
        v[i] += signs[i] * step
        if v[i] > hi[i] or v[i] < lo[i]:
            v[i] = x0[i] - signs[i] * step
        verts.append(v)
    simplex, fs = evaluate(verts)
    simplex, fs = list(simplex), list(fs)

    while len(trace) < budget:
        order = np.argsort(fs, kind="stable")
        simplex = [simplex[i] for i in order]
        fs = [fs[i] for i in order]
        if max(np.max(np.abs(v - simplex[0])) for v in simplex[1:]) < xtol:
            break
        centroid = np.mean(simplex[:-1], axis=0)
        (xr,), (fr,) = evaluate([centroid + (centroid - simplex[-1])])
        if fr < fs[0]:
            if len(trace) >= budget:
                simplex[-1], fs[-1] = xr, fr
                break
            (xe,), (fe,) = evaluate([centroid + 2.0 * (centroid - simplex[-1])])
            simplex[-1], fs[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fs[-2]:
            simplex[-1], fs[-1] = xr, fr
        else:
            if len(trace) >= budget:
                break
            if fr < fs[-1]:
                trial = centroid + 0.5 * (xr - centroid)
            else:
                trial = centroid + 0.5 * (simplex[-1] - centroid)
            (xc,), (fc,) = evaluate([trial])
            if fc < min(fr, fs[-1]):
                simplex[-1], fs[-1] = xc, fc
            else:
                shrunk = [simplex[0] + 0.5 * (v - simplex[0]) for v in simplex[1:]]
                pts, vals = evaluate(shrunk)
                for i, (p, v) in enumerate(zip(pts, vals)):
                    simplex[i + 1], fs[i + 1] = p, v
                if len(pts) < len(shrunk):
                    break

    i_best = int(np.argmin([e.f for e in trace]))
    return np.array(trace[i_best].x), trace[i_best].f, trace


class _Objective:
    # picklable wrapper so evaluations can fan out to worker processes
    def __init__(self, problem: TuneProblem):
        self.problem = problem

    def __call__(self, x) -> float:
        return vector_objective(x, self.problem)


def optimize(problem: TuneProblem, budget: int, seed: int = 0, spread: float = 0.1, workers: int | None = None):
    """Tune the free gains starting from ``problem.base_gains``.

    Returns ``(best GainSet, trace)``; the first trace entry is the base gains.
    """
    x0 = problem.vector(problem.base_gains)
    x, _, trace = nelder_mead(
        _Objective(problem), x0, problem.lower, problem.upper, budget, seed,
        spread=spread, workers=_workers() if workers is None else workers,
    )
    return problem.gains(x), trace


def trace_csv(trace: list[TraceEntry], names: Sequence[str]) -> str:
    lines = [",".join(["eval", "objective", "best"] + list(names))]
    for e in trace:
        lines.append(",".join([str(e.index), repr(e.f), repr(e.best)] + [repr(v) for v in e.x]))
    return "\n".join(lines) + "\n"
