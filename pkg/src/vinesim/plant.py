"""Physical models: pneumatic strands, draw-wire sensors, eversion and
spool kinematics, supply-box pressure, head battery.

Everything advances at the fixed physics step (dt = 5 ms) and is fully
deterministic given the RNG streams handed in by the runner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .kinematics import SegmentGeometry, StrandLengths, strands_to_arc, planar_bend

P_MAX = 400.0  # kPa, strand supply pressure
BOX_P_MAX = 20.0  # kPa gauge


@dataclass
class PlantConfig:
    v_max: float = 0.1  # m/s, 6 m/min
    tau_p: float = 0.5  # s, pressure approach time constant
    tau_l: float = 0.1  # s, strand length lag
    # strain per kPa. 0.32/400 (32 % at full pressure) leaves headroom for a
    # 60 deg extension-only bend per segment, which needs 25.9 % on the
    # outermost strand.
    c_p: float = 0.32 / 400.0
    theta_block: float = math.radians(100.0)  # rad, eversion fully obstructed
    p_box_min: float = 5.0  # kPa, minimum box pressure for eversion
    box_fill_rate: float = 4.0  # kPa/s at full inflow command
    sensor_sigma: float = 0.0005  # m
    sensor_quantum: float = 0.0001  # m
    dt: float = 0.005  # s
    max_robot_length: float = 17.0  # m of everted tube path
    battery_capacity: float = 3600.0  # s
    n_segments: int = 2


@dataclass
class StrandState:
    pressure: float = 0.0  # kPa
    true_length: float = 0.21  # m


@dataclass
class BoxState:
    pressure: float = 0.0  # kPa gauge
    inflow_cmd: float = 0.0  # [0, 1]
    leak_coeff: float = 1.0  # kPa/s at full pressure


@dataclass
class SpoolState:
    tube_paid_out: float = 0.0  # m
    cable_paid_out: float = 0.0  # m


@dataclass
class HeadState:
    battery_remaining: float = 3600.0  # s


@dataclass
class PlantState:
    strands: list[StrandState] = field(default_factory=list)  # 6, segment-major
    box: BoxState = field(default_factory=BoxState)
    spool: SpoolState = field(default_factory=SpoolState)
    head: HeadState = field(default_factory=HeadState)
    last_speed: float = 0.0  # m/s, tip speed of the previous tick


def make_plant(cfg: PlantConfig, geom: SegmentGeometry, box_pressure: float = 15.0) -> PlantState:
    strands = [StrandState(0.0, geom.l0) for _ in range(3 * cfg.n_segments)]
    return PlantState(
        strands=strands,
        box=BoxState(pressure=box_pressure),
        head=HeadState(battery_remaining=cfg.battery_capacity),
    )


def valve_flow(u: float, p: float, tau_p: float) -> float:
    """Flow (kPa/s) produced by a proportional valve command u in [-1, 1].

    u > 0 fills toward P_MAX, u < 0 vents toward 0, u = 0 holds; |u|
    scales the rate.
    """
    if u > 1.0:
        u = 1.0
    elif u < -1.0:
        u = -1.0
    if u == 0.0:
        return 0.0
    target = P_MAX if u > 0.0 else 0.0
    return abs(u) * (target - p) / tau_p


def pressure_step(p: float, flow: float, dt: float) -> float:
    p2 = p + flow * dt
    if p2 < 0.0:
        return 0.0
    if p2 > P_MAX:
        return P_MAX
    return p2


def strand_length_from_pressure(p: float, geom: SegmentGeometry, c_p: float) -> float:
    """Kinetostatic strand length: linear strain in pressure."""
    return geom.l0 * (1.0 + c_p * p)


def drawwire_measure(true_length: float, rng, sigma: float, quantum: float) -> float:
    """Noisy, quantized draw-wire reading of a strand length (m)."""
    m = true_length
    if sigma > 0.0:
        m += rng.normal(0.0, sigma)
    if quantum > 0.0:
        m = round(m / quantum) * quantum
    return m


def eversion_speed(throttle: float, total_bend: float, box_p: float, cfg: PlantConfig) -> float:
    """Tip speed (m/s): throttle times max speed, derated linearly with the
    internal robot's total bend and gated on box pressure."""
    if throttle < 0.0:
        throttle = 0.0
    elif throttle > 1.0:
        throttle = 1.0
    derate = 1.0 - abs(total_bend) / cfg.theta_block
    if derate < 0.0:
        derate = 0.0
    gate = 1.0 if box_p >= cfg.p_box_min else 0.0
    return throttle * cfg.v_max * derate * gate


def spool_rates(v_tip: float) -> tuple[float, float]:
    """Tube and cable feed rates for a given tip speed; the tube moves at
    exactly twice the head speed."""
    return 2.0 * v_tip, v_tip


def box_pressure_step(box: BoxState, dt: float, fill_rate: float = 4.0) -> BoxState:
    p = box.pressure + (box.inflow_cmd * fill_rate - box.leak_coeff * box.pressure / BOX_P_MAX) * dt
    if p < 0.0:
        p = 0.0
    elif p > BOX_P_MAX:
        p = BOX_P_MAX
    return replace(box, pressure=p)


def segment_lengths(state: PlantState, seg: int) -> StrandLengths:
    s = state.strands[3 * seg : 3 * seg + 3]
    return StrandLengths(s[0].true_length, s[1].true_length, s[2].true_length)


def segment_bends(state: PlantState, geom: SegmentGeometry, n_segments: int) -> list[float]:
    """Signed planar bend (rad) of each segment from the true lengths."""
    out = []
    for seg in range(n_segments):
        arc = strands_to_arc(segment_lengths(state, seg), geom, validate=False)
        out.append(planar_bend(arc))
    return out


def total_bend_magnitude(state: PlantState, geom: SegmentGeometry, n_segments: int) -> float:
    return sum(abs(b) for b in segment_bends(state, geom, n_segments))


def plant_tick(
    state: PlantState,
    valve_cmds,
    throttle: float,
    dt: float,
    cfg: PlantConfig,
    geom: SegmentGeometry,
    advance_fn=None,
) -> PlantState:
    """One physics step: strand pressures and lengths, box, spools, battery.

    advance_fn(v, dt, bends) may shorten the tip advance (wall contact);
    by default the tip moves freely at the commanded speed.
    """
    strands = []
    for st, u in zip(state.strands, valve_cmds):
        p = pressure_step(st.pressure, valve_flow(u, st.pressure, cfg.tau_p), dt)
        target = strand_length_from_pressure(p, geom, cfg.c_p)
        l = st.true_length + (target - st.true_length) * (dt / cfg.tau_l)
        strands.append(StrandState(pressure=p, true_length=l))

    new_state = PlantState(
        strands=strands,
        box=state.box,
        spool=state.spool,
        head=state.head,
        last_speed=state.last_speed,
    )

    bends = segment_bends(new_state, geom, cfg.n_segments)
    v = eversion_speed(
        throttle,
        sum(abs(b) for b in bends),
        state.box.pressure,
        cfg,
    )
    # achieved advance may be shorter than commanded (wall contact)
    ds = advance_fn(v, dt, bends) if advance_fn is not None else v * dt

    new_state.box = box_pressure_step(state.box, dt, cfg.box_fill_rate)
    new_state.spool = SpoolState(
        tube_paid_out=state.spool.tube_paid_out + 2.0 * ds,
        cable_paid_out=state.spool.cable_paid_out + ds,
    )
    battery = state.head.battery_remaining - dt
    new_state.head = HeadState(battery_remaining=battery if battery > 0.0 else 0.0)
    new_state.last_speed = ds / dt if dt > 0.0 else 0.0
    return new_state
