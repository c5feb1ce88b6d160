import math

import numpy as np
import pytest

from vinesim.control import (
    EstopLatch,
    JoystickInput,
    PidGains,
    PidState,
    SEG_BEND_CAP,
    bend_to_arc,
    map_joystick,
    pid_step,
    setpoint_to_strand_refs,
    terminal_controller_step,
)
from vinesim.kinematics import RangeError, SegmentGeometry, StrandLengths, strands_to_arc, planar_bend
from vinesim.plant import PlantConfig, make_plant, plant_tick

GEOM = SegmentGeometry()


def test_map_joystick_zero():
    sp = map_joystick(JoystickInput(x=0.0))
    assert sp.bends == (0.0, 0.0)


def test_map_joystick_half_fills_segment_one():
    sp = map_joystick(JoystickInput(x=-0.5))
    assert abs(sp.bends[0] + math.radians(60.0)) < 1e-12
    assert sp.bends[1] == 0.0


def test_map_joystick_full_spillover():
    sp = map_joystick(JoystickInput(x=1.0))
    assert abs(sp.bends[0] - math.radians(60.0)) < 1e-12
    assert abs(sp.bends[1] - math.radians(60.0)) < 1e-12


def test_map_joystick_odd_and_monotone():
    prev = 0.0
    for x in np.linspace(0.0, 1.0, 51):
        pos = map_joystick(JoystickInput(x=float(x)))
        neg = map_joystick(JoystickInput(x=float(-x)))
        total = pos.bends[0] + pos.bends[1]
        assert abs(total + (neg.bends[0] + neg.bends[1])) < 1e-12  # odd
        assert total >= prev - 1e-12  # monotone
        prev = total
        # spillover only once segment 1 saturates
        if abs(pos.bends[0]) < SEG_BEND_CAP - 1e-9:
            assert pos.bends[1] == 0.0


def test_map_joystick_clamps_and_keeps_y():
    sp = map_joystick(JoystickInput(x=3.0, y=0.4))
    assert abs(sp.bends[0] - math.radians(60.0)) < 1e-12
    assert sp.y_axis == 0.4


def test_refs_zero_setpoint():
    refs = setpoint_to_strand_refs(map_joystick(JoystickInput(x=0.0)), GEOM)
    assert refs == [GEOM.l0] * 6


def test_refs_extension_only_and_bend_preserved():
    # references must be reachable by pressurizing: no strand below l0
    for x in (0.2, -0.35, 0.7, -1.0, 1.0):
        refs = setpoint_to_strand_refs(map_joystick(JoystickInput(x=x)), GEOM)
        assert min(refs) >= GEOM.l0 - 1e-12
        sp = map_joystick(JoystickInput(x=x))
        for seg in range(2):
            arc = strands_to_arc(StrandLengths(*refs[3 * seg : 3 * seg + 3]), GEOM, validate=False)
            assert abs(planar_bend(arc) - sp.bends[seg]) < 1e-9


def test_refs_mean_is_reference_arc_length():
    sp = map_joystick(JoystickInput(x=0.8))
    refs = setpoint_to_strand_refs(sp, GEOM)
    for seg in range(2):
        arc = bend_to_arc(sp.bends[seg], GEOM)
        assert abs(sum(refs[3 * seg : 3 * seg + 3]) / 3.0 - arc.length) < 1e-12


def test_refs_range_error_propagates():
    from vinesim.control import SegmentSetpoint

    with pytest.raises(RangeError):
        setpoint_to_strand_refs(SegmentSetpoint(bends=(2.0, 0.0)), GEOM)


def test_pid_zero():
    u, st = pid_step(PidGains(), PidState(), 0.0, 0.01)
    assert u == 0.0
    assert st.integral == 0.0


def test_pid_proportional():
    u, _ = pid_step(PidGains(kp=0.05, ki=0.0, kd=0.0), PidState(), 10.0, 0.01)
    assert abs(u - 0.5) < 1e-12


def test_pid_saturation_freezes_integral():
    gains = PidGains(kp=0.05, ki=0.1, kd=0.0)
    u, st = pid_step(gains, PidState(), 100.0, 0.01)
    assert u == 1.0
    assert st.integral == 0.0  # frozen while saturated


def test_pid_integral_bounded():
    gains = PidGains(kp=0.0, ki=0.5, kd=0.0)
    st = PidState()
    for _ in range(10000):
        u, st = pid_step(gains, st, 5.0, 0.01)
        assert abs(gains.ki * st.integral) <= 1.0 + 1e-9
        assert -1.0 <= u <= 1.0


def test_pid_derivative_filter_reduces_noise_kick():
    rng = np.random.Generator(np.random.PCG64(0))
    noisy = PidGains(kp=0.0, ki=0.0, kd=0.02, deriv_tau=0.05)
    raw = PidGains(kp=0.0, ki=0.0, kd=0.02, deriv_tau=0.0)
    st_f, st_r = PidState(), PidState()
    us_f, us_r = [], []
    for _ in range(500):
        e = rng.normal(0.0, 0.5)
        uf, st_f = pid_step(noisy, st_f, e, 0.01)
        ur, st_r = pid_step(raw, st_r, e, 0.01)
        us_f.append(uf)
        us_r.append(ur)
    assert np.std(us_f) < 0.25 * np.std(us_r)


def test_terminal_controller_independence():
    gains = PidGains()
    states = [PidState(), PidState(), PidState()]
    refs = [210.0, 210.0, 210.0]
    meas = [210.0, 210.0, 210.0]
    cmds, states = terminal_controller_step(refs, meas, states, gains, 0.01)
    assert cmds == [0.0, 0.0, 0.0]
    refs[1] += 10.0
    cmds, _ = terminal_controller_step(refs, meas, states, gains, 0.01)
    assert cmds[0] == 0.0 and cmds[2] == 0.0
    assert cmds[1] > 0.0


def test_estop_latch():
    latch = EstopLatch()
    assert latch.update(True) is True  # engage edge
    cmds, throttle = latch.override([0.5, 0.2, -0.1], 0.9)
    assert cmds == [-1.0, -1.0, -1.0]
    assert throttle == 0.0
    assert latch.update(True) is False  # still engaged, no new edge
    latch.update(False)
    cmds, throttle = latch.override([0.5, 0.2, -0.1], 0.9)
    assert cmds == [0.5, 0.2, -0.1]
    assert throttle == 0.9


def _closed_loop_step(step_mm=10.0, t_end=4.0):
    """Single-strand closed loop, noise-free (the +/-2 % settling band of a
    10 mm step sits below the sensor noise floor)."""
    cfg = PlantConfig(sensor_sigma=0.0)
    geom = SegmentGeometry()
    gains = PidGains()
    plant = make_plant(cfg, geom)
    pid = [PidState(), PidState(), PidState()]
    refs = [geom.l0 * 1000.0 + step_mm, geom.l0 * 1000.0, geom.l0 * 1000.0]
    cmds3 = [0.0, 0.0, 0.0]
    ys = []
    for k in range(int(t_end / cfg.dt)):
        if k % 2 == 0:
            meas = [st.true_length * 1000.0 for st in plant.strands[:3]]
            cmds3, pid = terminal_controller_step(refs, meas, pid, gains, 0.01)
        plant = plant_tick(plant, cmds3 + [0.0] * 3, 0.0, cfg.dt, cfg, geom)
        ys.append((k * cfg.dt, plant.strands[0].true_length * 1000.0 - geom.l0 * 1000.0))
    return ys, step_mm


def test_closed_loop_step_response():
    ys, step = _closed_loop_step()
    peak = max(y for _, y in ys)
    assert (peak - step) / step < 0.20  # overshoot
    outside = [t for t, y in ys if abs(y - step) > 0.02 * step]
    settle = max(outside) if outside else 0.0
    assert settle < 2.0


def test_closed_loop_120deg_noise_free():
    from vinesim.runner import Simulation, SimConfig
    from vinesim.scenarios import load_bundled
    from vinesim.autopilot import ScriptPilot, PilotCommand

    cfg = SimConfig()
    cfg.plant.sensor_sigma = 0.0
    sim = Simulation(load_bundled("open_field"), seed=0, cfg=cfg)
    pilot = ScriptPilot(lambda s: PilotCommand(JoystickInput(x=1.0, throttle=0.0)))
    while sim.t < 5.0:
        sim.step(pilot)
    assert abs(math.degrees(sum(sim.bends())) - 120.0) <= 2.0
