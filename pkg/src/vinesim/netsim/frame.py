"""Bit-exact frame codec for the control network.

Wire layout (all multi-byte fields little-endian):

    offset  size  field
    0       2     magic 0xB0 0x0A
    2       1     version, 0x01
    3       1     msg_type
    4       1     src node id
    5       1     dst node id
    6       2     seq (per src and msg_type, wraps at 65536)
    8       2     payload length, <= 64
    10      len   payload
    10+len  2     CRC-16/CCITT-FALSE over bytes [0, 10+len)

An empty-payload frame is 12 bytes on the wire. Numeric payload fields are
32-bit little-endian IEEE-754 floats.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

from .crc import crc16

MAGIC = b"\xb0\x0a"
VERSION = 0x01
MAX_PAYLOAD = 64
HEADER_LEN = 10
OVERHEAD = HEADER_LEN + 2  # header + crc


class MsgType(IntEnum):
    SETPOINT = 0x01
    SENSOR = 0x02
    HEARTBEAT = 0x03
    ESTOP = 0x04
    HEAD_TELEMETRY = 0x05
    SPEED_CMD = 0x06


class NodeId(IntEnum):
    BASE = 0x00
    INTERNAL = 0x01
    TERMINAL_SEG1 = 0x10
    TERMINAL_SEG2 = 0x11
    HEAD = 0x20


class FrameError(ValueError):
    code = "frame_error"


class BadMagic(FrameError):
    code = "bad_magic"


class BadCrc(FrameError):
    code = "bad_crc"


class Truncated(FrameError):
    code = "truncated"


class BadLength(FrameError):
    code = "bad_length"


class UnknownType(FrameError):
    code = "unknown_type"


@dataclass(frozen=True)
class Frame:
    msg_type: int
    src: int
    dst: int
    seq: int
    payload: bytes = b""


def encode_frame(frame: Frame) -> bytes:
    if len(frame.payload) > MAX_PAYLOAD:
        raise BadLength(f"payload {len(frame.payload)} exceeds {MAX_PAYLOAD}")
    head = MAGIC + struct.pack(
        "<BBBBHH",
        VERSION,
        frame.msg_type,
        frame.src,
        frame.dst,
        frame.seq & 0xFFFF,
        len(frame.payload),
    )
    body = head + frame.payload
    return body + struct.pack("<H", crc16(body))


def decode_frame(buf: bytes) -> Frame:
    """Decode exactly one frame; never raises anything but FrameError."""
    if len(buf) < 2:
        raise Truncated(f"{len(buf)} bytes, need at least {OVERHEAD}")
    if buf[0:2] != MAGIC:
        raise BadMagic(f"got {buf[0]:#04x} {buf[1]:#04x}")
    if len(buf) < OVERHEAD:
        raise Truncated(f"{len(buf)} bytes, need at least {OVERHEAD}")
    version, msg_type, src, dst, seq, length = struct.unpack("<BBBBHH", buf[2:10])
    if length > MAX_PAYLOAD:
        raise BadLength(f"payload length {length} exceeds {MAX_PAYLOAD}")
    total = OVERHEAD + length
    if len(buf) < total:
        raise Truncated(f"{len(buf)} bytes, frame needs {total}")
    if len(buf) > total:
        raise BadLength(f"{len(buf)} bytes for a {total}-byte frame")
    (crc_rx,) = struct.unpack("<H", buf[total - 2 : total])
    if crc16(buf[: total - 2]) != crc_rx:
        raise BadCrc(f"crc mismatch on {total}-byte frame")
    if version != VERSION:
        raise UnknownType(f"unsupported version {version:#04x}")
    try:
        msg_type = MsgType(msg_type)
    except ValueError:
        raise UnknownType(f"msg_type {msg_type:#04x}") from None
    return Frame(msg_type=msg_type, src=src, dst=dst, seq=seq, payload=buf[10 : 10 + length])


# payload helpers ----------------------------------------------------------

def pack_setpoint(refs_mm) -> bytes:
    return struct.pack("<fff", *refs_mm)


def unpack_setpoint(payload: bytes) -> tuple[float, float, float]:
    return struct.unpack("<fff", payload)


def pack_sensor(lengths_mm, pressures_kpa) -> bytes:
    return struct.pack("<ffffff", *lengths_mm, *pressures_kpa)


def unpack_sensor(payload: bytes):
    vals = struct.unpack("<ffffff", payload)
    return vals[0:3], vals[3:6]


def pack_speed_cmd(throttle: float) -> bytes:
    return struct.pack("<f", throttle)


def unpack_speed_cmd(payload: bytes) -> float:
    return struct.unpack("<f", payload)[0]


def pack_head_telemetry(battery_s: float, victim: bool, ranges8) -> bytes:
    return struct.pack("<fB8f", battery_s, 1 if victim else 0, *ranges8)


def unpack_head_telemetry(payload: bytes):
    vals = struct.unpack("<fB8f", payload)
    return vals[0], bool(vals[1]), vals[2:]
