from .crc import crc16
from .frame import (
    Frame,
    FrameError,
    BadMagic,
    BadCrc,
    Truncated,
    BadLength,
    UnknownType,
    MsgType,
    NodeId,
    encode_frame,
    decode_frame,
)
from .net import (
    LinkModel,
    WIRED_LINK,
    WIRELESS_LINK,
    link_transmit,
    EventQueue,
    SeqTracker,
    FailsafeState,
    failsafe_check,
)
from .nodes import Network, BaseStation, TerminalNode, HeadNode, InternalNode

__all__ = [
    "crc16",
    "Frame",
    "FrameError",
    "BadMagic",
    "BadCrc",
    "Truncated",
    "BadLength",
    "UnknownType",
    "MsgType",
    "NodeId",
    "encode_frame",
    "decode_frame",
    "LinkModel",
    "WIRED_LINK",
    "WIRELESS_LINK",
    "link_transmit",
    "EventQueue",
    "SeqTracker",
    "FailsafeState",
    "failsafe_check",
    "Network",
    "BaseStation",
    "TerminalNode",
    "HeadNode",
    "InternalNode",
]
