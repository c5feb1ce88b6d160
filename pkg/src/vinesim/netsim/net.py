"""Links, the delivery event queue, and per-receiver sequence tracking.

Every hop is a LinkModel: fixed base latency plus uniform jitter, and an
independent drop probability. Deliveries are ordered by (time, insertion
counter), both deterministic, so the whole network replays exactly.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field


@dataclass(frozen=True)
class LinkModel:
    latency_ms: float = 2.0
    jitter_ms: float = 0.0
    loss_prob: float = 0.0


WIRED_LINK = LinkModel(latency_ms=2.0, jitter_ms=0.0, loss_prob=0.0)
WIRELESS_LINK = LinkModel(latency_ms=10.0, jitter_ms=2.0, loss_prob=0.02)


def link_transmit(link: LinkModel, rng, now: float):
    """Delivery time for one frame, or None if the link drops it."""
    if link.loss_prob > 0.0 and rng.random() < link.loss_prob:
        return None
    delay = link.latency_ms
    if link.jitter_ms > 0.0:
        delay += rng.uniform(0.0, link.jitter_ms)
    return now + delay / 1000.0


@dataclass
class LinkStats:
    tx: int = 0
    dropped: int = 0
    delivered: int = 0


class EventQueue:
    """Min-heap of (deliver_time, counter, dst, frame_bytes)."""

    def __init__(self):
        self._heap: list = []
        self._counter = 0

    def push(self, when: float, dst: int, data: bytes) -> None:
        heapq.heappush(self._heap, (when, self._counter, dst, data))
        self._counter += 1

    def pop_due(self, now: float):
        due = []
        while self._heap and self._heap[0][0] <= now:
            when, _, dst, data = heapq.heappop(self._heap)
            due.append((when, dst, data))
        return due

    def __len__(self) -> int:
        return len(self._heap)


class SeqTracker:
    """Detects gaps in per-(src, type) sequence numbers, wrap-aware."""

    def __init__(self):
        self._last: dict = {}
        self.gaps = 0

    def update(self, src: int, msg_type: int, seq: int) -> int:
        key = (src, msg_type)
        missed = 0
        if key in self._last:
            missed = (seq - self._last[key] - 1) & 0xFFFF
            self.gaps += missed
        self._last[key] = seq
        return missed


@dataclass
class FailsafeState:
    """Vent everything when the base has been silent for too long."""

    timeout: float = 0.5  # s
    last_rx: float = 0.0
    venting: bool = False

    def mark_rx(self, now: float) -> None:
        self.last_rx = now

    def check(self, now: float) -> bool:
        """True if the failsafe vent should be active; latches until a
        valid SETPOINT clears it via `recover`."""
        if now - self.last_rx > self.timeout:
            self.venting = True
        return self.venting

    def recover(self) -> None:
        self.venting = False


def failsafe_check(fs: FailsafeState, now: float):
    """Spec-shaped helper: the vent-all command (-1 per valve) or None."""
    if fs.check(now):
        return [-1.0, -1.0, -1.0]
    return None
