"""The decentralized controller nodes and the network joining them.

Topology (matching the robot's cabling):

    BASE ---wired--- INTERNAL ---wired--- TERMINAL_SEG1
                         |-------wired--- TERMINAL_SEG2
                         |----wireless--- HEAD

The internal-robot computer forwards traffic between the base and the
other nodes. Terminals run the per-strand PID locally against their own
draw-wire readings; only reference values and telemetry cross the network,
which is what keeps the loop alive under latency and loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..control import (
    EstopLatch,
    JoystickInput,
    PidGains,
    PidState,
    map_joystick,
    setpoint_to_strand_refs,
    terminal_controller_step,
)
from ..kinematics import SegmentGeometry
from .frame import (
    Frame,
    FrameError,
    MsgType,
    NodeId,
    decode_frame,
    encode_frame,
    pack_head_telemetry,
    pack_sensor,
    pack_setpoint,
    pack_speed_cmd,
    unpack_head_telemetry,
    unpack_sensor,
    unpack_setpoint,
)
from .net import (
    WIRED_LINK,
    WIRELESS_LINK,
    EventQueue,
    FailsafeState,
    LinkModel,
    LinkStats,
    SeqTracker,
    link_transmit,
)

_ADJACENT = {
    (NodeId.BASE, NodeId.INTERNAL),
    (NodeId.INTERNAL, NodeId.TERMINAL_SEG1),
    (NodeId.INTERNAL, NodeId.TERMINAL_SEG2),
    (NodeId.INTERNAL, NodeId.HEAD),
}


def _next_hop(at: int, dst: int) -> int:
    if at == NodeId.BASE:
        return NodeId.INTERNAL
    if at == NodeId.INTERNAL:
        return NodeId.BASE if dst == NodeId.BASE else dst
    return NodeId.INTERNAL


class Network:
    """Event-queue network; every hop draws loss/jitter from its link RNG."""

    def __init__(self, rngs: dict, wired: LinkModel = WIRED_LINK, wireless: LinkModel = WIRELESS_LINK):
        self.queue = EventQueue()
        self.links: dict = {}
        self.rngs: dict = {}
        self.stats = LinkStats()
        self.down: set = set()
        for a, b in _ADJACENT:
            model = wireless if NodeId.HEAD in (a, b) else wired
            rng = rngs[tuple(sorted((int(a), int(b))))]
            for pair in ((a, b), (b, a)):
                self.links[pair] = model
                self.rngs[pair] = rng

    def set_link(self, a: int, b: int, model: LinkModel) -> None:
        for pair in ((a, b), (b, a)):
            if pair in self.links:
                self.links[pair] = model

    def sever(self, a: int, b: int, down: bool = True) -> None:
        for pair in ((a, b), (b, a)):
            if down:
                self.down.add(pair)
            else:
                self.down.discard(pair)

    def send(self, now: float, at: int, frame: Frame) -> None:
        hop = _next_hop(at, frame.dst)
        pair = (at, hop)
        self.stats.tx += 1
        if pair in self.down:
            self.stats.dropped += 1
            return
        when = link_transmit(self.links[pair], self.rngs[pair], now)
        if when is None:
            self.stats.dropped += 1
            return
        self.queue.push(when, hop, encode_frame(frame))

    def deliver_due(self, now: float):
        """Pop deliveries due by `now`; forward at the internal node.

        Yields (when, node_id, Frame) for final deliveries; malformed
        buffers are dropped and counted.
        """
        out = []
        while True:
            due = self.queue.pop_due(now)
            if not due:
                break
            for when, node, data in due:
                try:
                    frame = decode_frame(data)
                except FrameError:
                    self.stats.dropped += 1
                    continue
                if node == NodeId.INTERNAL and frame.dst != NodeId.INTERNAL:
                    self.send(when, NodeId.INTERNAL, frame)
                    continue
                self.stats.delivered += 1
                out.append((when, node, frame))
        return out


class _SeqCounter:
    def __init__(self):
        self._next: dict = {}

    def take(self, msg_type: int) -> int:
        seq = self._next.get(msg_type, 0)
        self._next[msg_type] = (seq + 1) & 0xFFFF
        return seq


@dataclass
class SensorReading:
    lengths_mm: tuple = (0.0, 0.0, 0.0)
    pressures_kpa: tuple = (0.0, 0.0, 0.0)
    when: float = -1.0


class BaseStation:
    """Supply-box computer: joystick mapping, reference generation, and the
    operator-facing view of sensor/head telemetry."""

    def __init__(self, geom: SegmentGeometry):
        self.geom = geom
        self.seq = _SeqCounter()
        self.estop = EstopLatch()
        self.tracker = SeqTracker()
        self.malformed = 0
        self.sensors = {0: SensorReading(), 1: SensorReading()}
        self.head_battery = None
        self.head_victim = False
        self.head_ranges = ()
        self.last_refs_mm = [geom.l0 * 1000.0] * 6
        self.throttle_out = 0.0

    def command_step(self, now: float, inp: JoystickInput) -> list[Frame]:
        """50 Hz: turn the latest pilot input into wire frames."""
        inp = inp.clamped()
        self.estop.update(inp.estop)
        frames = []
        terminals = (NodeId.TERMINAL_SEG1, NodeId.TERMINAL_SEG2)
        if self.estop.engaged:
            self.throttle_out = 0.0
            for dst in terminals:
                frames.append(
                    Frame(MsgType.ESTOP, NodeId.BASE, dst, self.seq.take(MsgType.ESTOP))
                )
        else:
            self.throttle_out = inp.throttle
            refs = setpoint_to_strand_refs(map_joystick(inp), self.geom)
            self.last_refs_mm = [r * 1000.0 for r in refs]
            for seg, dst in enumerate(terminals):
                payload = pack_setpoint(self.last_refs_mm[3 * seg : 3 * seg + 3])
                frames.append(
                    Frame(MsgType.SETPOINT, NodeId.BASE, dst, self.seq.take(MsgType.SETPOINT), payload)
                )
        for dst in terminals:
            frames.append(
                Frame(MsgType.HEARTBEAT, NodeId.BASE, dst, self.seq.take(MsgType.HEARTBEAT))
            )
        frames.append(
            Frame(
                MsgType.SPEED_CMD,
                NodeId.BASE,
                NodeId.INTERNAL,
                self.seq.take(MsgType.SPEED_CMD),
                pack_speed_cmd(self.throttle_out),
            )
        )
        return frames

    def on_frame(self, frame: Frame, when: float) -> None:
        self.tracker.update(frame.src, frame.msg_type, frame.seq)
        try:
            if frame.msg_type == MsgType.SENSOR:
                seg = 0 if frame.src == NodeId.TERMINAL_SEG1 else 1
                lengths, pressures = unpack_sensor(frame.payload)
                self.sensors[seg] = SensorReading(lengths, pressures, when)
            elif frame.msg_type == MsgType.HEAD_TELEMETRY:
                battery, victim, ranges = unpack_head_telemetry(frame.payload)
                self.head_battery = battery
                self.head_victim = victim
                self.head_ranges = ranges
        except Exception:
            self.malformed += 1


class TerminalNode:
    """Valve terminal: local PID on three strands, failsafe vent."""

    def __init__(self, node_id: int, geom: SegmentGeometry, gains: PidGains):
        self.node_id = node_id
        self.gains = gains
        self.seq = _SeqCounter()
        self.refs_mm = [geom.l0 * 1000.0] * 3
        self.pid = [PidState(), PidState(), PidState()]
        self.failsafe = FailsafeState()
        self.estopped = False
        self.tracker = SeqTracker()
        self.malformed = 0
        self.valve_cmds = [0.0, 0.0, 0.0]
        self.last_meas_mm = [geom.l0 * 1000.0] * 3

    def on_frame(self, frame: Frame, when: float) -> None:
        self.tracker.update(frame.src, frame.msg_type, frame.seq)
        if frame.msg_type == MsgType.SETPOINT:
            try:
                self.refs_mm = list(unpack_setpoint(frame.payload))
            except Exception:
                self.malformed += 1
                return
            self.failsafe.mark_rx(when)
            self.failsafe.recover()
            self.estopped = False
        elif frame.msg_type == MsgType.ESTOP:
            if not self.estopped:
                self.pid = [PidState(), PidState(), PidState()]
            self.estopped = True
            self.failsafe.mark_rx(when)
        elif frame.msg_type == MsgType.HEARTBEAT:
            self.failsafe.mark_rx(when)

    def control_step(self, now: float, meas_mm) -> list[float]:
        """100 Hz: PID against the local draw-wire readings."""
        self.last_meas_mm = list(meas_mm)
        if self.estopped or self.failsafe.check(now):
            self.pid = [PidState(), PidState(), PidState()]
            self.valve_cmds = [-1.0, -1.0, -1.0]
        else:
            self.valve_cmds, self.pid = terminal_controller_step(
                self.refs_mm, meas_mm, self.pid, self.gains, 0.01
            )
        return self.valve_cmds

    def sensor_frame(self, pressures_kpa) -> Frame:
        payload = pack_sensor(self.last_meas_mm, pressures_kpa)
        return Frame(
            MsgType.SENSOR, self.node_id, NodeId.BASE, self.seq.take(MsgType.SENSOR), payload
        )


class HeadNode:
    """Battery-powered sensing head; emits telemetry while alive."""

    def __init__(self):
        self.seq = _SeqCounter()

    def telemetry_frame(self, battery_s: float, victim: bool, ranges) -> Frame | None:
        if battery_s <= 0.0:
            return None
        eight = _downsample(ranges, 8)
        payload = pack_head_telemetry(battery_s, victim, eight)
        return Frame(
            MsgType.HEAD_TELEMETRY, NodeId.HEAD, NodeId.BASE, self.seq.take(MsgType.HEAD_TELEMETRY), payload
        )


class InternalNode:
    """SBC in the tube: forwards traffic (handled by Network) and keeps the
    last speed command as a link-health indicator."""

    def __init__(self):
        self.last_speed_cmd = 0.0
        self.malformed = 0

    def on_frame(self, frame: Frame, when: float) -> None:
        if frame.msg_type == MsgType.SPEED_CMD:
            try:
                from .frame import unpack_speed_cmd

                self.last_speed_cmd = unpack_speed_cmd(frame.payload)
            except Exception:
                self.malformed += 1


def _downsample(ranges, n: int):
    if not ranges:
        return [0.0] * n
    if len(ranges) <= n:
        vals = list(ranges) + [ranges[-1]] * (n - len(ranges))
        return vals[:n]
    step = (len(ranges) - 1) / (n - 1)
    return [ranges[int(round(i * step))] for i in range(n)]
