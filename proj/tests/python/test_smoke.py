"""Smoke tests for the Python bindings: pinned values, a short closed-loop
run, report plumbing, and exception mapping."""

import math
from pathlib import Path

import pytest

import backstep

SCENARIO = Path(__file__).resolve().parents[2] / "scenarios" / "example.cfg"


def test_example_plant_pinned_values():
    plant = backstep.example_plant()
    assert plant.n == 2
    assert plant.k_c == [3.8, 6.0]
    xdot = backstep.eval_dynamics(plant, [0.0, 0.0], 1.0, 0.0)
    assert xdot[0] == pytest.approx(0.0, abs=1e-15)
    assert xdot[1] == pytest.approx(0.6 + 10.5 + 0.4 * math.sin(1.0), abs=1e-12)


def test_delay_line_replay():
    line = backstep.DelayLine(2, 0.0)
    reads = []
    for k in range(1, 5):
        line.push(float(k))
        reads.append(line.read())
    assert reads == [0.0, 0.0, 1.0, 2.0]
    assert backstep.DelayLine.steps_for(0.01, 1e-4) == 100


def test_basis_partition_of_unity():
    fb = backstep.make_grid_basis([(-1.0, 1.0), (-1.0, 1.0)], [3, 3])
    xi = backstep.basis(fb, [0.3, -0.2])
    assert sum(xi) == pytest.approx(1.0, abs=1e-12)
    norm = backstep.regressor_norm(fb, [0.3, -0.2])
    assert 1.0 / 9.0 <= norm <= 1.0
    assert norm == pytest.approx(sum(v * v for v in xi), abs=1e-12)


def test_control_op_pinned_values():
    assert backstep.robust_tanh_term(1.0, 0.1) == pytest.approx(math.tanh(10.0), abs=1e-15)
    alpha = backstep.virtual_control_first(1.0, 2.0, 4.9, 0.0, 0.0, 0.0, 0.1)
    assert alpha == pytest.approx(-4.9 - 1.0 / 3.0, abs=1e-12)
    # Pure leakage when the coordinate is at zero.
    rate = backstep.delta_hat_rate(0.0, 2.0, 10.0, 10.0, 0.1, 0.5, 1)
    assert rate == pytest.approx(-50.0, abs=1e-12)


def test_rk4_step_pinned_value():
    out = backstep.rk4_step(lambda t, s: [-s[0]], 0.0, [1.0], 0.1)
    assert out[0] == pytest.approx(0.9048375, abs=1e-12)


def test_short_closed_loop_run():
    scenario = backstep.load_scenario(str(SCENARIO))
    scenario.T = 0.05
    scenario.h = 1e-3
    cfg = backstep.build_sim_config(scenario)
    traj = backstep.simulate(cfg)
    assert traj.samples() == 51
    assert traj.z[0][0] == pytest.approx(-0.5, abs=1e-12)
    assert all(math.isfinite(v) for v in traj.Vs)
    report = backstep.check_constraints(traj, cfg.ref.A0)
    assert [e.passed for e in report.entries[:4]] == [True, True, True, True]


def test_prerequisite_audit_flags_tight_bound():
    cfg = backstep.build_sim_config(backstep.load_scenario(str(SCENARIO)))
    rep = backstep.verify_prerequisites(cfg)
    assert rep.A0 == pytest.approx(math.sqrt(3.25), abs=1e-9)
    first = rep.entries[0]
    assert first.name == "k_c1 > A0 + k_b1"
    assert not first.passed
    assert not rep.passed


def test_exception_mapping():
    with pytest.raises(backstep.ConfigError):
        backstep.load_scenario("/nonexistent/scenario.cfg")
    with pytest.raises(backstep.BarrierViolationError):
        backstep.checked_margin(2.0 * (1.0 - 1e-12), 2.0, 1)
    with pytest.raises(backstep.ConfigError):
        backstep.DelayLine(0, 0.0)
