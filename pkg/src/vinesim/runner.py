"""Headless simulation runner.

Single-clock fixed-step loop: physics at 200 Hz, terminal control at
100 Hz, base command frames at 50 Hz, head/camera and telemetry at 20 Hz,
network deliveries interleaved by timestamp. Everything is deterministic
given (scenario, seed, command source).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import plant as plant_mod
from .autopilot import Autopilot, PilotCommand, ReplayPilot
from .control import JoystickInput, PidGains
from .kinematics import SegmentGeometry
from .netsim import (
    BaseStation,
    HeadNode,
    InternalNode,
    Network,
    NodeId,
    WIRED_LINK,
    WIRELESS_LINK,
)
from .plant import PlantConfig, make_plant, plant_tick, segment_bends
from .world import Scenario, World, effective_curvature, run_metrics

EXIT_VICTIM = 0
EXIT_ERROR = 1
EXIT_TUBE = 2
EXIT_TIMEOUT = 3

OUTCOME_BY_EXIT = {
    EXIT_VICTIM: "victim_found",
    EXIT_TUBE: "tube_exhausted",
    EXIT_TIMEOUT: "timeout",
    EXIT_ERROR: "error",
}

PHYSICS_DIV = 1  # 200 Hz
CONTROL_DIV = 2  # 100 Hz
COMMAND_DIV = 4  # 50 Hz
TELEMETRY_DIV = 10  # 20 Hz


@dataclass
class SimConfig:
    plant: PlantConfig = field(default_factory=PlantConfig)
    geometry: SegmentGeometry = field(default_factory=SegmentGeometry)
    gains: PidGains = field(default_factory=PidGains)
    wired_link: object = WIRED_LINK
    wireless_link: object = WIRELESS_LINK
    camera_fov: float = math.radians(120.0)
    camera_rays: int = 41
    box_initial_kpa: float = 15.0


@dataclass
class RunResult:
    exit_code: int
    outcome: str
    metrics: dict
    records: list


class Simulation:
    """One deterministic run; step() advances a single physics tick."""

    def __init__(self, scenario: Scenario, seed: int = 0, cfg: SimConfig | None = None):
        self.cfg = cfg or SimConfig()
        self.scenario = scenario
        self.seed = seed

        streams = np.random.SeedSequence(seed).spawn(5)
        self.rng_sensor = np.random.Generator(np.random.PCG64(streams[0]))
        link_rngs = {
            (int(NodeId.BASE), int(NodeId.INTERNAL)): np.random.Generator(np.random.PCG64(streams[1])),
            (int(NodeId.INTERNAL), int(NodeId.TERMINAL_SEG1)): np.random.Generator(np.random.PCG64(streams[2])),
            (int(NodeId.INTERNAL), int(NodeId.TERMINAL_SEG2)): np.random.Generator(np.random.PCG64(streams[3])),
            (int(NodeId.INTERNAL), int(NodeId.HEAD)): np.random.Generator(np.random.PCG64(streams[4])),
        }
        self.net = Network(link_rngs, wired=self.cfg.wired_link, wireless=self.cfg.wireless_link)

        geom = self.cfg.geometry
        self.base = BaseStation(geom)
        from .netsim.nodes import TerminalNode

        self.terminals = [
            TerminalNode(NodeId.TERMINAL_SEG1, geom, self.cfg.gains),
            TerminalNode(NodeId.TERMINAL_SEG2, geom, self.cfg.gains),
        ]
        self.head = HeadNode()
        self.internal = InternalNode()

        self.plant = make_plant(self.cfg.plant, geom, box_pressure=self.cfg.box_initial_kpa)
        self.world = World(scenario)

        self.tick = 0
        self.last_ranges = self.world.raycast_view(self.cfg.camera_fov, self.cfg.camera_rays)
        self.last_contact = self.world.contact()
        self.victim_found = False
        self.box_inflow = 0.0
        self.last_command = PilotCommand(JoystickInput(), box_inflow=0.0)

    @property
    def t(self) -> float:
        return self.tick * self.cfg.plant.dt

    def bends(self) -> list[float]:
        return segment_bends(self.plant, self.cfg.geometry, self.cfg.plant.n_segments)

    def path_curvature_cmd(self, bends) -> float:
        # positive joystick bend = rightward deflection = clockwise path
        total = sum(bends)
        return -total / (2.0 * self.cfg.geometry.l0)

    def step(self, pilot) -> None:
        t = self.t
        dt = self.cfg.plant.dt

        for when, node, frame in self.net.deliver_due(t):
            if node == NodeId.BASE:
                self.base.on_frame(frame, when)
            elif node == NodeId.TERMINAL_SEG1:
                self.terminals[0].on_frame(frame, when)
            elif node == NodeId.TERMINAL_SEG2:
                self.terminals[1].on_frame(frame, when)
            elif node == NodeId.INTERNAL:
                self.internal.on_frame(frame, when)

        if self.tick % COMMAND_DIV == 0:
            cmd = pilot(self)
            self.last_command = cmd
            self.box_inflow = min(max(cmd.box_inflow, 0.0), 1.0)
            for fr in self.base.command_step(t, cmd.joystick):
                self.net.send(t, NodeId.BASE, fr)

        if self.tick % CONTROL_DIV == 0:
            geom = self.cfg.geometry
            p = self.cfg.plant
            for seg, term in enumerate(self.terminals):
                meas = []
                for st in self.plant.strands[3 * seg : 3 * seg + 3]:
                    m = plant_mod.drawwire_measure(
                        st.true_length, self.rng_sensor, p.sensor_sigma, p.sensor_quantum
                    )
                    meas.append(m * 1000.0)
                term.control_step(t, meas)
            if self.tick % COMMAND_DIV == 2:  # 50 Hz, offset from setpoints
                for seg, term in enumerate(self.terminals):
                    pressures = [st.pressure for st in self.plant.strands[3 * seg : 3 * seg + 3]]
                    self.net.send(t, term.node_id, term.sensor_frame(pressures))

        if self.tick % TELEMETRY_DIV == 0:
            self.last_ranges = self.world.raycast_view(self.cfg.camera_fov, self.cfg.camera_rays)
            self.last_contact = self.world.contact()
            head_alive = self.plant.head.battery_remaining > 0.0
            if head_alive:
                self.victim_found = self.victim_found or self.world.victim_detected()
                fr = self.head.telemetry_frame(
                    self.plant.head.battery_remaining, self.victim_found, self.last_ranges
                )
                if fr is not None:
                    self.net.send(t, NodeId.HEAD, fr)

        self.plant.box.inflow_cmd = self.box_inflow
        valve_cmds = self.terminals[0].valve_cmds + self.terminals[1].valve_cmds

        def advance(v, dtick, bends):
            self.world.set_path_bend(-sum(bends))
            contact = self.world.contact()
            kappa = effective_curvature(self.path_curvature_cmd(bends), contact)
            return self.world.advance_tip(kappa, v * dtick, contact.braced)

        self.plant = plant_tick(
            self.plant,
            valve_cmds,
            self.base.throttle_out,
            dt,
            self.cfg.plant,
            self.cfg.geometry,
            advance_fn=advance,
        )
        self.tick += 1

    def telemetry_record(self) -> dict:
        bends = self.bends()
        link_gaps = self.base.tracker.gaps + sum(tm.tracker.gaps for tm in self.terminals)
        return {
            "t": round(self.t, 6),
            "x": round(self.world.pose.x, 6),
            "y": round(self.world.pose.y, 6),
            "theta": round(self.world.pose.theta, 6),
            "head_theta": round(self.world.head_heading, 6),
            "bend_deg": [round(math.degrees(b), 3) for b in bends],
            "lengths_mm": [round(st.true_length * 1000.0, 3) for st in self.plant.strands],
            "pressures_kpa": [round(st.pressure, 2) for st in self.plant.strands],
            "refs_mm": [round(r, 3) for r in self.base.last_refs_mm],
            "speed_m_min": round(self.plant.last_speed * 60.0, 4),
            "tube_m": round(self.plant.spool.tube_paid_out, 4),
            "path_m": round(self.world.trace.length, 4),
            "box_kpa": round(self.plant.box.pressure, 3),
            "battery_s": round(self.plant.head.battery_remaining, 2),
            "braced": self.last_contact.braced,
            "blocked": self.world.blocked,
            "estop": self.base.estop.engaged,
            "victim": self.victim_found,
            "ranges": [round(r, 3) for r in self.last_ranges],
            "link": {
                "tx": self.net.stats.tx,
                "dropped": self.net.stats.dropped,
                "delivered": self.net.stats.delivered,
                "gaps": link_gaps,
            },
        }

    def tube_exhausted(self) -> bool:
        return self.plant.spool.tube_paid_out >= 2.0 * self.scenario.max_tube


def run(
    scenario: Scenario,
    pilot=None,
    seed: int = 0,
    t_max: float = 1800.0,
    cfg: SimConfig | None = None,
    log_path=None,
    record_path=None,
    telemetry_sink=None,
    realtime: bool = False,
) -> RunResult:
    """Drive a simulation to termination.

    Exit codes: 0 victim found, 2 tube exhausted, 3 timeout (1 is reserved
    for load/pilot errors and raised exceptions, applied by the CLI).
    """
    sim = Simulation(scenario, seed=seed, cfg=cfg)
    if pilot is None:
        pilot = Autopilot(fov=sim.cfg.camera_fov)

    records: list[dict] = []
    log_file = open(log_path, "w") if log_path else None
    record_file = open(record_path, "w") if record_path else None
    exit_code = EXIT_TIMEOUT
    wall_start = time.monotonic()
    try:
        while True:
            sim.step(pilot)
            if record_file and (sim.tick - 1) % COMMAND_DIV == 0:
                cmd = sim.last_command
                record_file.write(
                    json.dumps(
                        {
                            "t": round(sim.t - sim.cfg.plant.dt, 6),
                            "x": cmd.joystick.x,
                            "y": cmd.joystick.y,
                            "throttle": cmd.joystick.throttle,
                            "estop": cmd.joystick.estop,
                            "box_inflow": cmd.box_inflow,
                        },
                        separators=(",", ":"),
                    )
                    + "\n"
                )
            if sim.tick % TELEMETRY_DIV == 0:
                rec = sim.telemetry_record()
                records.append(rec)
                if log_file:
                    log_file.write(json.dumps(rec, separators=(",", ":")) + "\n")
                if telemetry_sink is not None:
                    telemetry_sink(rec)
            if sim.victim_found:
                exit_code = EXIT_VICTIM
                break
            if sim.tube_exhausted():
                exit_code = EXIT_TUBE
                break
            if sim.t >= t_max:
                exit_code = EXIT_TIMEOUT
                break
            if realtime:
                lag = sim.t - (time.monotonic() - wall_start)
                if lag > 0.002:
                    time.sleep(lag)
    finally:
        if log_file:
            log_file.close()
        if record_file:
            record_file.close()

    metrics = run_metrics(records)
    metrics["outcome"] = OUTCOME_BY_EXIT[exit_code]
    metrics["seed"] = seed
    metrics["scenario"] = scenario.name
    return RunResult(exit_code=exit_code, outcome=metrics["outcome"], metrics=metrics, records=records)


def load_command_log(path) -> list[dict]:
    entries = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    ts = [e["t"] for e in entries]
    if ts != sorted(ts):
        raise ValueError("command log timestamps must be non-decreasing")
    return entries


def replay(log_entries, scenario: Scenario, seed: int = 0, **kwargs) -> RunResult:
    return run(scenario, pilot=ReplayPilot(log_entries), seed=seed, **kwargs)
