#!/usr/bin/env python3
"""Gain tuning harness: step response, 120 deg closed loop, cruise ripple."""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from vinesim.control import JoystickInput, PidGains, PidState, terminal_controller_step
from vinesim.kinematics import SegmentGeometry
from vinesim.plant import PlantConfig, make_plant, plant_tick, drawwire_measure, segment_bends


def step_response(gains, sigma=0.0, step_mm=10.0, t_end=4.0):
    cfg = PlantConfig(sensor_sigma=sigma)
    geom = SegmentGeometry()
    plant = make_plant(cfg, geom)
    rng = np.random.Generator(np.random.PCG64(1))
    pid = [PidState(), PidState(), PidState()]
    refs = [geom.l0 * 1000.0] * 3
    refs[0] += step_mm
    cmds = [0.0, 0.0, 0.0]
    n = int(t_end / cfg.dt)
    ys = []
    for k in range(n):
        if k % 2 == 0:
            meas = [
                drawwire_measure(st.true_length, rng, cfg.sensor_sigma, cfg.sensor_quantum) * 1000.0
                for st in plant.strands[:3]
            ]
            cmds, pid = terminal_controller_step(refs, meas, pid, gains, 0.01)
        plant = plant_tick(plant, cmds + [0.0] * 3, 0.0, cfg.dt, cfg, geom)
        ys.append((k * cfg.dt, plant.strands[0].true_length * 1000.0 - geom.l0 * 1000.0))
    peak = max(y for _, y in ys)
    overshoot = (peak - step_mm) / step_mm * 100.0
    settle = None
    for i in range(len(ys) - 1, -1, -1):
        if abs(ys[i][1] - step_mm) > 0.02 * step_mm:
            settle = ys[i + 1][0] if i + 1 < len(ys) else None
            break
    else:
        settle = 0.0
    return overshoot, settle


def bend_test(gains, sigma=0.0005, t_end=8.0):
    """Closed loop through the real sim (network included) commanding x=1."""
    from vinesim.runner import Simulation, SimConfig
    from vinesim.scenarios import load_bundled
    from vinesim.autopilot import ScriptPilot, PilotCommand

    cfg = SimConfig(gains=gains)
    cfg.plant.sensor_sigma = sigma
    sim = Simulation(load_bundled("open_field"), seed=0, cfg=cfg)
    pilot = ScriptPilot(lambda s: PilotCommand(JoystickInput(x=1.0, throttle=0.0)))
    t_enter = None
    n = int(t_end / cfg.plant.dt)
    worst_after = 0.0
    for k in range(n):
        sim.step(pilot)
        total = math.degrees(sum(sim.bends()))
        if t_enter is None and abs(total - 120.0) <= 2.0:
            t_enter = sim.t
        if sim.t > 5.0:
            worst_after = max(worst_after, abs(total - 120.0))
    return t_enter, math.degrees(sum(sim.bends())), worst_after


def cruise_test(gains, sigma=0.0005, t_end=30.0):
    from vinesim.runner import Simulation, SimConfig
    from vinesim.scenarios import load_bundled
    from vinesim.autopilot import ScriptPilot, PilotCommand

    cfg = SimConfig(gains=gains)
    cfg.plant.sensor_sigma = sigma
    sim = Simulation(load_bundled("straight_corridor"), seed=0, cfg=cfg)
    pilot = ScriptPilot(lambda s: PilotCommand(JoystickInput(x=0.0, throttle=1.0)))
    n = int(t_end / cfg.plant.dt)
    speeds = []
    for k in range(n):
        sim.step(pilot)
        if sim.t > 5.0:
            speeds.append(sim.plant.last_speed * 60.0)
    return sum(speeds) / len(speeds), min(speeds)


if __name__ == "__main__":
    import itertools

    candidates = [
        PidGains(kp=0.05, ki=0.02, kd=0.005),
        PidGains(kp=0.15, ki=0.08, kd=0.0),
        PidGains(kp=0.25, ki=0.15, kd=0.0),
        PidGains(kp=0.4, ki=0.3, kd=0.0),
        PidGains(kp=0.25, ki=0.15, kd=0.002),
    ]
    for g in candidates:
        ov, st = step_response(g)
        te, final, worst = bend_test(g)
        mean_v, min_v = cruise_test(g, t_end=20.0)
        print(
            f"kp={g.kp} ki={g.ki} kd={g.kd}: overshoot={ov:.1f}% settle={st}s "
            f"| 120deg enter={te} final={final:.1f} worst>5s={worst:.2f} "
            f"| cruise mean={mean_v:.3f} min={min_v:.3f} m/min"
        )
