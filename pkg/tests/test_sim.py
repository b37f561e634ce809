import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadsmc.control import GainSet
from quadsmc.sim import CSV_HEADER, NonFiniteState, SimConfig, SimLog, metrics, rk4_step, run, surface_rates
from quadsmc.trajectory import TrajectorySpec, constant, fig3_attitude

FIG3_IC = (-0.3, 1.0, 0.7, 0.0, -0.3, 0.1, 0, 0, 0, 0, 0, 0)


def synthetic_log(errors, dt=0.1, mode="attitude"):
    errors = np.asarray(errors, dtype=float)
    n = len(errors)
    z6 = np.zeros((n, 6))
    return SimLog(
        mode=mode, t=np.arange(n) * dt, state=np.zeros((n, 12)), ref=z6.copy(), u=np.zeros((n, 4)),
        surfaces=z6.copy(), errors=errors, rotor=np.zeros((n, 4)), lyapunov=z6.copy(),
        alloc_clamped=np.zeros(n, bool), virtual_clamped=np.zeros(n, bool),
    )


def exp_error(dt):
    s, t = np.array([1.0]), 0.0
    for _ in range(round(1 / dt)):
        s = rk4_step(lambda t, y: y, s, t, dt)
        t += dt
    return abs(s[0] - math.e)


def test_rk4_examples():
    s = rk4_step(lambda t, y: np.zeros_like(y), [1.0, 2.0], 0.0, 0.1)
    assert list(s) == [1.0, 2.0]
    assert exp_error(0.1) < 1e-5
    assert exp_error(0.1) / exp_error(0.05) == pytest.approx(16, rel=0.2)


def test_rk4_rejects_bad_input():
    with pytest.raises(ValueError):
        rk4_step(lambda t, y: y, [1.0], 0.0, 0.0)
    with pytest.raises(NonFiniteState):
        rk4_step(lambda t, y: y * np.inf, [1.0], 0.0, 0.1)


def test_config_validation():
    assert SimConfig(dt=0.1, t_end=1.0).n_steps == 10
    with pytest.raises(ValueError):
        SimConfig(dt=-1)
    with pytest.raises(ValueError):
        SimConfig(initial_state=(0,) * 11)
    with pytest.raises(ValueError):
        SimConfig(mode="velocity")


def test_hover_preserved(params):
    log = run(SimConfig(t_end=10.0), params, GainSet.paper(), TrajectorySpec())
    assert np.max(np.abs(log.state)) < 1e-9
    assert np.max(np.abs(log.u[:, 0] - params.m * params.g)) < 1e-9
    assert metrics(log)["total_ise"] == 0.0


@pytest.fixture(scope="module")
def fig3_log(params):
    cfg = SimConfig(t_end=10.0, initial_state=FIG3_IC)
    return run(cfg, params, GainSet.paper(), fig3_attitude())


def test_fig3_error_reduces(fig3_log):
    e = np.abs(fig3_log.errors[:, 0])
    assert e[10000] < e[1000]
    m = metrics(fig3_log)
    for ch in ("phi", "theta", "psi"):
        assert m["channels"][ch]["settling_time"] is not None


def test_run_is_deterministic(params, fig3_log):
    again = run(SimConfig(t_end=10.0, initial_state=FIG3_IC), params, GainSet.paper(), fig3_attitude())
    assert again.to_csv() == fig3_log.to_csv()


def test_csv_contract(fig3_log):
    text = fig3_log.to_csv()
    header, first = text.split("\n")[:2]
    assert header == (
        "t,phi,phi_dot,theta,theta_dot,psi,psi_dot,x,x_dot,y,y_dot,z,z_dot,phi_d,theta_d,psi_d,"
        "x_d,y_d,z_d,U1,U2,U3,U4,S_phi,S_theta,S_psi,S_x,S_y,S_z,e_phi,e_theta,e_psi,e_x,e_y,e_z"
    )
    assert len(CSV_HEADER) == 35 and len(first.split(",")) == 35
    assert text.count("\n") == len(fig3_log) + 1
    np.testing.assert_array_equal(fig3_log.column("e_phi"), fig3_log.errors[:, 0])


def test_stride(params):
    log = run(SimConfig(dt=0.01, t_end=1.0, stride=10), params, GainSet.paper(), fig3_attitude())
    np.testing.assert_allclose(log.t, np.arange(11) * 0.1, atol=1e-12)


def final_state(params, dt):
    cfg = SimConfig(dt=dt, t_end=4.0, initial_state=(0.2, 1.0, 1.2, 0, 0.2, 0.1) + (0,) * 6,
                    switching="saturation")
    return run(cfg, params, GainSet.paper(), fig3_attitude()).state[-1]


def test_closed_loop_order_smooth(params):
    ref = final_state(params, 0.0025)
    e = [np.max(np.abs(final_state(params, dt) - ref)) for dt in (0.04, 0.02)]
    assert math.log2(e[0] / e[1]) >= 3.8


def test_divergence_keeps_partial_log(params):
    # from rest the pitch error stays near 1 rad and theta drifts through pi/2
    with pytest.raises(NonFiniteState) as info:
        run(SimConfig(t_end=4.0), params, GainSet.paper(), fig3_attitude())
    log = info.value.log
    assert 1 < len(log) < 4001 and np.all(np.isfinite(log.state))


def test_motor_mode_tracks(params):
    cfg = SimConfig(t_end=3.0, initial_state=FIG3_IC, actuation="motor")
    log = run(cfg, params, GainSet.paper(), fig3_attitude())
    assert np.all(np.isfinite(log.state)) and np.all(log.rotor >= 0)
    assert abs(log.errors[-1, 0]) < abs(log.errors[0, 0])


def test_surface_decay_frozen_reference(params):
    traj = TrajectorySpec(phi=constant(0.2), theta=constant(-0.1), psi=constant(0.3), z=constant(1.0))
    cfg = SimConfig(t_end=3.0, switching="saturation")
    log = run(cfg, params, GainSet.paper(), traj)
    for j in (0, 1, 2, 5):
        S = np.abs(log.surfaces[:, j])
        assert np.all(np.diff(S) <= 1e-12)


def test_metrics_examples():
    m = metrics(synthetic_log(np.zeros((11, 6))))
    assert all(c["ise"] == 0 for c in m["channels"].values())
    e = np.full((101, 6), 0.5)
    m = metrics(synthetic_log(e, dt=0.1))
    assert m["channels"]["phi"]["ise"] == pytest.approx(0.25 * 10.0, abs=0.1 * 0.25)
    assert m["channels"]["phi"]["settling_time"] is None
    assert m["total_ise"] == pytest.approx(4 * m["channels"]["phi"]["ise"])


@given(st.integers(0, 3), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_surface_rates_exact_on_cubics(deg, a, b, c, d):
    log = synthetic_log(np.zeros((50, 6)), dt=0.01)
    t = log.t
    log.surfaces[:, 0] = a + b * t + c * t**2 + d * t**3
    rate = surface_rates(log)[2:-2, 0]
    np.testing.assert_allclose(rate, (b + 2 * c * t + 3 * d * t**2)[2:-2], atol=1e-9)
    assert np.all(np.isnan(surface_rates(log)[:2]))
