import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadsmc import config
from quadsmc.control import GainSet
from quadsmc.model import QuadParams
from quadsmc.sim import SimConfig
from quadsmc.trajectory import TrajectorySpec, fig3_attitude
from quadsmc.tune import PENALTY, TuneProblem, _workers, nelder_mead, objective, optimize, vector_objective

J0 = 0.6711555512060837  # paper gains on the bundled tuning scenario


def test_quadratic_selftest():
    x, f, trace = nelder_mead(lambda x: (x[0] - 5.0) ** 2, [0.2285737], [0.0], [1000.0], 200, seed=0)
    assert x[0] == pytest.approx(5.0, abs=1e-3)
    assert f == trace[int(np.argmin([e.f for e in trace]))].f


@given(
    st.lists(st.floats(-50, 150), min_size=1, max_size=3),
    st.integers(0, 2**32 - 1),
)
def test_bounds_and_monotone_best(target, seed):
    n = len(target)
    lo, hi = np.zeros(n), np.full(n, 100.0)
    t = np.array(target)
    x, f, trace = nelder_mead(lambda x: float(np.sum((x - t) ** 2)), np.full(n, 10.0), lo, hi, 60, seed)
    assert len(trace) <= 60
    for e in trace:
        assert np.all(np.array(e.x) >= lo) and np.all(np.array(e.x) <= hi)
    best = [e.best for e in trace]
    assert all(b1 >= b2 for b1, b2 in zip(best, best[1:]))
    assert best[-1] == min(e.f for e in trace) == f


def test_seeded_determinism():
    f = lambda x: float(np.sum(np.abs(x - 3.3)))
    a = nelder_mead(f, [1.0, 2.0], [0, 0], [10, 10], 50, seed=7)[2]
    b = nelder_mead(f, [1.0, 2.0], [0, 0], [10, 10], 50, seed=7)[2]
    assert [(e.x, e.f) for e in a] == [(e.x, e.f) for e in b]


def test_budget_precondition():
    with pytest.raises(ValueError):
        nelder_mead(lambda x: 0.0, [1.0, 1.0], [0, 0], [2, 2], 2)


def test_problem_vector_mapping():
    prob = TuneProblem(SimConfig(), QuadParams(), TrajectorySpec(), GainSet(), free=("alpha", "k.theta"))
    g = prob.gains([2.0, 7.0])
    assert g.alpha == (2.0,) * 6
    assert g.k == (0.1, 7.0, 0.1, 0.1, 0.1, 0.1)
    np.testing.assert_array_equal(prob.vector(g), [2.0, 7.0])
    with pytest.raises(ValueError):
        TuneProblem(SimConfig(), QuadParams(), TrajectorySpec(), free=("beta",))


@pytest.fixture(scope="module")
def short_problem(params):
    cfg = SimConfig(t_end=2.0, initial_state=(-0.3, 1.0, 0.7, 0.0, -0.3, 0.1) + (0,) * 6)
    return TuneProblem(cfg, params, fig3_attitude(), GainSet.paper())


def test_objective(params, short_problem):
    hover = TuneProblem(SimConfig(t_end=1.0), params, TrajectorySpec(), GainSet.paper())
    assert objective(GainSet.paper(), hover) == 0.0
    with pytest.raises(ValueError):
        objective(GainSet.uniform(2000.0, 1.0, 1.0), short_problem)
    assert vector_objective([0.0, 0.1, 0.1], short_problem) == PENALTY
    assert 0 < objective(GainSet.paper(), short_problem) < PENALTY


def test_frozen_baseline():
    cfg = config.load("tune_fig3")
    assert objective(cfg.gains, cfg.tune_problem()) == pytest.approx(J0, rel=1e-9)


def test_optimize_improves_on_baseline(short_problem):
    best, trace = optimize(short_problem, budget=12, seed=1, workers=1)
    assert trace[0].x == tuple(short_problem.vector(GainSet.paper()))
    assert objective(best, short_problem) == trace[-1].best <= trace[0].f


def test_parallel_matches_serial(short_problem):
    a = optimize(short_problem, budget=8, seed=2, workers=1)[1]
    b = optimize(short_problem, budget=8, seed=2, workers=2)[1]
    assert [(e.x, e.f) for e in a] == [(e.x, e.f) for e in b]


def test_thread_env(monkeypatch):
    monkeypatch.setenv("QUADSMC_THREADS", "3")
    assert _workers() == 3
    monkeypatch.setenv("QUADSMC_THREADS", "junk")
    assert _workers() == 1
