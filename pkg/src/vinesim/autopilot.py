"""Scripted pilot standing in for the human operator.

Pure-pursuit steering on the camera-proxy range scan: aim at a carrot
point along the deepest view direction, throttle down on close frontal
range, command zero curvature when straight ahead is free. A stall
recovery mode relaxes the bend when the head is pressed against a wall so
it can slide free instead of deadlocking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .control import JoystickInput

NOMINAL_ACTUATOR_LEN = 2 * 0.21  # m, maps path curvature to bend demand
TOTAL_BEND = math.radians(120.0)


@dataclass
class PilotCommand:
    joystick: JoystickInput
    box_inflow: float = 1.0


def _clamp(v, lo, hi):
    return lo if v < lo else hi if v > hi else v


class Autopilot:
    """Reactive corridor follower.

    Three regimes: centering on the side-range balance keeps the robot
    mid-corridor; a frontal wall triggers a committed turn toward the
    deeper side, held until the way ahead opens again; a head pressed
    against a wall swings toward the free side and lets the braced kink
    redirect the tube (look-around escape).

    steer_cap keeps the commanded bend below the eversion-blocking angle
    so the robot can keep crawling through tight turns; a hysteresis trims
    the cap whenever the crawl actually stops, settling just under the
    blocking angle (about a 0.24 m turn radius).
    """

    def __init__(
        self,
        fov: float = math.radians(120.0),
        steer_cap: float = 0.83,
        steer_slew: float = 0.1,  # per 50 Hz sample
        turn_trigger: float = 0.45,  # m frontal range that commits a turn
        turn_release: float = 0.9,
        balance_gain: float = 1.6,
        straight_range: float = 1.0,
        straight_deadband: float = 0.05,  # m of side-range imbalance
        front_half_angle: float = math.radians(10.0),
    ):
        self.fov = fov
        self.steer_cap = steer_cap
        self.steer_slew = steer_slew
        self.turn_trigger = turn_trigger
        self.turn_release = turn_release
        self.balance_gain = balance_gain
        self.straight_range = straight_range
        self.straight_deadband = straight_deadband
        self.front_half_angle = front_half_angle
        self.steer = 0.0
        self.crawl_cap = steer_cap
        self.blocked_ticks = 0
        self.turn_side = 0.0  # -1 left (x<0), +1 right, 0 not committed
        self.escape_side = 0.0

    def step(self, ranges, speed_m_s: float, throttle_prev: float, blocked: bool) -> PilotCommand:
        n = len(ranges)
        if n == 0:
            return PilotCommand(JoystickInput())
        if n == 1:
            rel = [0.0]
        else:
            step = self.fov / (n - 1)
            rel = [-0.5 * self.fov + i * step for i in range(n)]

        front = min(
            (r for r, a in zip(ranges, rel) if abs(a) <= self.front_half_angle),
            default=ranges[n // 2],
        )
        left = min(
            (r for r, a in zip(ranges, rel) if math.radians(15.0) <= a <= math.radians(60.0)),
            default=5.0,
        )
        right = min(
            (r for r, a in zip(ranges, rel) if -math.radians(60.0) <= a <= -math.radians(15.0)),
            default=5.0,
        )
        # depth sums decide which way a committed turn goes
        left_depth = sum(r for r, a in zip(ranges, rel) if a > math.radians(8.0))
        right_depth = sum(r for r, a in zip(ranges, rel) if a < -math.radians(8.0))

        # proximity throttle derating; once committed to a hard turn the
        # path curls away from the frontal wall, so keep crawling
        throttle = _clamp(front, 0.0, 1.0) if front < 0.5 else 1.0
        if self.turn_side != 0.0 or abs(self.steer) >= 0.6:
            throttle = max(throttle, 0.5)

        self.blocked_ticks = self.blocked_ticks + 1 if blocked else 0

        # eversion-gate hysteresis: when the crawl stops without wall
        # contact the bend is too deep; back the cap off until it moves
        stalled = throttle_prev > 0.1 and speed_m_s < 0.0005
        if stalled and not blocked:
            self.crawl_cap = max(0.80, self.crawl_cap - 0.002)
        else:
            self.crawl_cap = min(self.steer_cap, self.crawl_cap + 0.001)

        # turn commitment: a frontal wall picks the deeper side and holds
        if self.turn_side == 0.0 and front < self.turn_trigger:
            self.turn_side = -1.0 if left_depth >= right_depth else 1.0
        elif self.turn_side != 0.0 and front > self.turn_release:
            self.turn_side = 0.0

        if self.blocked_ticks > 25:
            # pressed against a wall: swing toward the free side and let
            # the braced kink redirect the tube
            if self.escape_side == 0.0:
                self.escape_side = -1.0 if left_depth >= right_depth else 1.0
            target = self.escape_side * self.crawl_cap
        else:
            if self.blocked_ticks == 0:
                self.escape_side = 0.0
            if self.turn_side != 0.0:
                # committed: full bend, let the structure shape the turn
                target = self.turn_side * self.crawl_cap
            elif front >= self.straight_range and abs(left - right) <= self.straight_deadband:
                target = 0.0  # straight ahead is free: lay straight tube
            else:
                # mid-corridor centering on the side-range balance;
                # more room left -> steer left -> negative x
                target = _clamp(-self.balance_gain * (left - right), -0.6, 0.6)

        self.steer += _clamp(target - self.steer, -self.steer_slew, self.steer_slew)
        return PilotCommand(JoystickInput(x=self.steer, throttle=throttle), box_inflow=1.0)

    def __call__(self, sim) -> PilotCommand:
        return self.step(
            sim.last_ranges,
            sim.plant.last_speed,
            sim.last_command.joystick.throttle,
            sim.world.blocked,
        )


class ReplayPilot:
    """Plays a recorded command log; the latest entry at or before t wins."""

    def __init__(self, entries):
        self.entries = sorted(entries, key=lambda e: e["t"])
        self._idx = 0
        self._current = PilotCommand(JoystickInput(), box_inflow=0.0)

    def __call__(self, sim) -> PilotCommand:
        t = sim.t
        while self._idx < len(self.entries) and self.entries[self._idx]["t"] <= t + 1e-12:
            e = self.entries[self._idx]
            self._current = PilotCommand(
                JoystickInput(
                    x=float(e.get("x", 0.0)),
                    y=float(e.get("y", 0.0)),
                    throttle=float(e.get("throttle", 0.0)),
                    estop=bool(e.get("estop", False)),
                ),
                box_inflow=float(e.get("box_inflow", 1.0)),
            )
            self._idx += 1
        return self._current


class ScriptPilot:
    """Wraps a plain function (sim -> PilotCommand or JoystickInput)."""

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, sim) -> PilotCommand:
        out = self.fn(sim)
        if isinstance(out, PilotCommand):
            return out
        return PilotCommand(out)
