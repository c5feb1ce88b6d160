import numpy as np
import pytest

from vinesim.control import JoystickInput, PidGains
from vinesim.kinematics import SegmentGeometry
from vinesim.netsim import (
    BadCrc,
    BadLength,
    BadMagic,
    BaseStation,
    FailsafeState,
    Frame,
    FrameError,
    LinkModel,
    MsgType,
    Network,
    NodeId,
    SeqTracker,
    TerminalNode,
    Truncated,
    UnknownType,
    crc16,
    decode_frame,
    encode_frame,
    failsafe_check,
    link_transmit,
)
from vinesim.netsim.frame import pack_setpoint


def crc16_bitwise(data: bytes) -> int:
    """Independent bit-serial CRC-16/CCITT-FALSE used as the test oracle."""
    crc = 0xFFFF
    for b in data:
        crc ^= b << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ 0x1021) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


def test_crc_check_value():
    assert crc16(b"123456789") == 0x29B1
    assert crc16_bitwise(b"123456789") == 0x29B1


def test_crc_empty_is_init():
    assert crc16(b"") == 0xFFFF


def test_crc_matches_bitwise_oracle():
    rng = np.random.Generator(np.random.PCG64(0))
    for _ in range(200):
        data = rng.integers(0, 256, size=int(rng.integers(0, 64))).astype(np.uint8).tobytes()
        assert crc16(data) == crc16_bitwise(data)


def test_crc_self_check_with_big_endian_append():
    rng = np.random.Generator(np.random.PCG64(1))
    for _ in range(100):
        data = rng.integers(0, 256, size=20).astype(np.uint8).tobytes()
        assert crc16(data + crc16(data).to_bytes(2, "big")) == 0


def _random_frame(rng) -> Frame:
    return Frame(
        msg_type=int(rng.choice([t.value for t in MsgType])),
        src=int(rng.choice([n.value for n in NodeId])),
        dst=int(rng.choice([n.value for n in NodeId])),
        seq=int(rng.integers(0, 65536)),
        payload=rng.integers(0, 256, size=int(rng.integers(0, 65))).astype(np.uint8).tobytes(),
    )


def test_heartbeat_wire_size():
    # 2 magic + 1 version + 1 type + 1 src + 1 dst + 2 seq + 2 len + 2 crc
    frame = Frame(MsgType.HEARTBEAT, NodeId.BASE, NodeId.TERMINAL_SEG1, 0)
    assert len(encode_frame(frame)) == 12


def test_codec_round_trip():
    rng = np.random.Generator(np.random.PCG64(2))
    for _ in range(10_000):
        f = _random_frame(rng)
        assert decode_frame(encode_frame(f)) == f


def test_single_bit_flip_detected():
    rng = np.random.Generator(np.random.PCG64(3))
    for _ in range(20):
        wire = bytearray(encode_frame(_random_frame(rng)))
        for byte_i in range(len(wire)):
            for bit in range(8):
                flipped = bytearray(wire)
                flipped[byte_i] ^= 1 << bit
                with pytest.raises(FrameError):
                    decode_frame(bytes(flipped))


def test_decode_error_codes():
    good = encode_frame(Frame(MsgType.SENSOR, NodeId.TERMINAL_SEG1, NodeId.BASE, 5, b"x" * 24))
    with pytest.raises(BadMagic):
        decode_frame(b"\x00\x00" + good[2:])
    with pytest.raises(Truncated):
        decode_frame(good[:8])
    with pytest.raises(Truncated):
        decode_frame(good[:-3])
    with pytest.raises(BadLength):
        decode_frame(good + b"\x00")
    with pytest.raises(BadCrc):
        decode_frame(good[:-1] + bytes([good[-1] ^ 0xFF]))
    # oversized length field, crc irrelevant
    bad_len = bytearray(good)
    bad_len[8:10] = (200).to_bytes(2, "little")
    with pytest.raises(BadLength):
        decode_frame(bytes(bad_len))
    # unknown type with a valid crc
    raw = bytearray(encode_frame(Frame(MsgType.HEARTBEAT, 0, 0x10, 1)))
    raw[3] = 0x7F
    body = bytes(raw[:-2])
    with pytest.raises(UnknownType):
        decode_frame(body + crc16(body).to_bytes(2, "little"))


def test_decode_never_crashes_on_fuzz():
    rng = np.random.Generator(np.random.PCG64(4))
    for _ in range(50_000):
        buf = rng.integers(0, 256, size=int(rng.integers(0, 40))).astype(np.uint8).tobytes()
        try:
            decode_frame(buf)
        except FrameError:
            pass


def test_link_transmit_deterministic_latency():
    rng = np.random.Generator(np.random.PCG64(5))
    link = LinkModel(latency_ms=2.0, jitter_ms=0.0, loss_prob=0.0)
    assert link_transmit(link, rng, 1.0) == 1.002


def test_link_transmit_total_loss():
    rng = np.random.Generator(np.random.PCG64(6))
    link = LinkModel(loss_prob=1.0)
    assert all(link_transmit(link, rng, 0.0) is None for _ in range(100))


def test_link_loss_binomial():
    rng = np.random.Generator(np.random.PCG64(7))
    link = LinkModel(latency_ms=10.0, jitter_ms=2.0, loss_prob=0.02)
    n = 10_000
    drops = sum(1 for _ in range(n) if link_transmit(link, rng, 0.0) is None)
    sigma = (n * 0.02 * 0.98) ** 0.5
    assert abs(drops - 200) < 3 * sigma


def test_seq_tracker_gaps_and_wrap():
    tr = SeqTracker()
    tr.update(1, 1, 10)
    assert tr.update(1, 1, 11) == 0
    assert tr.update(1, 1, 14) == 2
    assert tr.gaps == 2
    tr.update(1, 1, 65535)
    assert tr.update(1, 1, 0) == 0  # clean wrap
    assert tr.update(1, 1, 3) == 2  # gap across wrap


def test_failsafe_timing():
    fs = FailsafeState(timeout=0.5)
    for t in np.arange(0.0, 2.0, 0.1):  # heartbeats every 100 ms
        fs.mark_rx(float(t))
        assert failsafe_check(fs, float(t)) is None
    # silence: trips just past timeout
    assert failsafe_check(fs, 1.9 + 0.5) is None
    assert failsafe_check(fs, 1.9 + 0.5001) == [-1.0, -1.0, -1.0]
    # latched until recovery even if a late heartbeat lands
    fs.mark_rx(2.5)
    assert failsafe_check(fs, 2.5) is not None
    fs.recover()
    assert failsafe_check(fs, 2.5) is None


def _mini_net(seed=0, wired=None, wireless=None):
    rngs = {
        tuple(sorted((int(a), int(b)))): np.random.Generator(np.random.PCG64(seed + i))
        for i, (a, b) in enumerate(
            [
                (NodeId.BASE, NodeId.INTERNAL),
                (NodeId.INTERNAL, NodeId.TERMINAL_SEG1),
                (NodeId.INTERNAL, NodeId.TERMINAL_SEG2),
                (NodeId.INTERNAL, NodeId.HEAD),
            ]
        )
    }
    kwargs = {}
    if wired:
        kwargs["wired"] = wired
    if wireless:
        kwargs["wireless"] = wireless
    return Network(rngs, **kwargs)


def test_base_to_terminal_roundtrip():
    geom = SegmentGeometry()
    net = _mini_net()
    base = BaseStation(geom)
    term = TerminalNode(NodeId.TERMINAL_SEG1, geom, PidGains())

    for fr in base.command_step(0.0, JoystickInput(x=0.5, throttle=0.3)):
        net.send(0.0, NodeId.BASE, fr)
    # wired hops: 2 ms to internal + 2 ms to terminal
    delivered = net.deliver_due(0.01)
    for when, node, fr in delivered:
        if node == NodeId.TERMINAL_SEG1:
            term.on_frame(fr, when)
    assert term.refs_mm != [geom.l0 * 1000.0] * 3  # setpoint landed

    # terminal runs its PID locally and reports back
    meas = [geom.l0 * 1000.0] * 3
    cmds = term.control_step(0.01, meas)
    assert any(c != 0.0 for c in cmds)
    net.send(0.01, NodeId.TERMINAL_SEG1, term.sensor_frame([10.0, 20.0, 30.0]))
    for when, node, fr in net.deliver_due(0.02):
        if node == NodeId.BASE:
            base.on_frame(fr, when)
    assert base.sensors[0].pressures_kpa == (10.0, 20.0, 30.0)
    assert base.tracker.gaps == 0


def test_estop_broadcast_vents_terminals():
    geom = SegmentGeometry()
    net = _mini_net()
    base = BaseStation(geom)
    terms = [
        TerminalNode(NodeId.TERMINAL_SEG1, geom, PidGains()),
        TerminalNode(NodeId.TERMINAL_SEG2, geom, PidGains()),
    ]
    for fr in base.command_step(0.0, JoystickInput(estop=True, throttle=1.0)):
        net.send(0.0, NodeId.BASE, fr)
    assert base.throttle_out == 0.0
    for when, node, fr in net.deliver_due(0.01):
        idx = 0 if node == NodeId.TERMINAL_SEG1 else 1
        terms[idx].on_frame(fr, when)
    for term in terms:
        assert term.control_step(0.01, [210.0] * 3) == [-1.0, -1.0, -1.0]
    # release: next setpoints resume control
    for fr in base.command_step(0.02, JoystickInput(x=0.0)):
        net.send(0.02, NodeId.BASE, fr)
    for when, node, fr in net.deliver_due(0.03):
        if node in (NodeId.TERMINAL_SEG1, NodeId.TERMINAL_SEG2):
            idx = 0 if node == NodeId.TERMINAL_SEG1 else 1
            terms[idx].on_frame(fr, when)
    assert not terms[0].estopped


def test_malformed_payload_counted():
    geom = SegmentGeometry()
    term = TerminalNode(NodeId.TERMINAL_SEG1, geom, PidGains())
    bad = Frame(MsgType.SETPOINT, NodeId.BASE, NodeId.TERMINAL_SEG1, 0, b"\x01\x02")
    term.on_frame(bad, 0.0)
    assert term.malformed == 1
    assert term.refs_mm == [geom.l0 * 1000.0] * 3


def test_network_deterministic():
    logs = []
    for _ in range(2):
        net = _mini_net(seed=0, wireless=LinkModel(latency_ms=10.0, jitter_ms=3.0, loss_prob=0.3))
        log = []
        for k in range(200):
            t = k * 0.01
            fr = Frame(MsgType.HEAD_TELEMETRY, NodeId.HEAD, NodeId.BASE, k, b"\x00" * 8)
            net.send(t, NodeId.HEAD, fr)
            for when, node, got in net.deliver_due(t + 0.05):
                log.append((round(when, 9), node, got.seq))
        logs.append((tuple(log), net.stats.tx, net.stats.dropped))
    assert logs[0] == logs[1]


def test_setpoint_payload_is_three_le_floats():
    payload = pack_setpoint([210.0, 198.5, 221.25])
    assert len(payload) == 12
    import struct

    assert struct.unpack("<fff", payload) == (210.0, 198.5, 221.25)
