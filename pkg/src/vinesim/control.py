"""Pilot-side and terminal-side control.

Joystick x maps to a total bend demand of up to 120 deg which fills the
frontal segment first; per segment the demand becomes three strand-length
references through the constant-curvature map, and each strand runs an
independent PID on its draw-wire length error producing a valve command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .kinematics import ArcParams, SegmentGeometry, arc_to_strands

SEG_BEND_CAP = math.radians(60.0)  # per-segment bend limit
TOTAL_BEND_CAP = math.radians(120.0)

_S3 = math.sin(2.0 * math.pi / 3.0)  # strand lever arm in the +/-pi/2 plane


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


@dataclass(frozen=True)
class JoystickInput:
    x: float = 0.0  # lateral [-1, 1]
    y: float = 0.0  # vertical, display only in the planar world
    throttle: float = 0.0  # [0, 1]
    estop: bool = False

    def clamped(self) -> "JoystickInput":
        return JoystickInput(
            x=_clamp(self.x, -1.0, 1.0),
            y=_clamp(self.y, -1.0, 1.0),
            throttle=_clamp(self.throttle, 0.0, 1.0),
            estop=self.estop,
        )


@dataclass(frozen=True)
class SegmentSetpoint:
    bends: tuple[float, float]  # rad, signed; positive = stick-positive side
    y_axis: float = 0.0  # recorded, unused while the world is planar


@dataclass(frozen=True)
class PidGains:
    """Per-strand length-loop gains (error in mm, output is the normalized
    valve command). Defaults tuned against the default plant for <20 %
    step overshoot, <2 s settling and the 120 deg-in-5 s bend target."""

    kp: float = 0.25  # 1/mm
    ki: float = 0.2  # 1/(mm s)
    kd: float = 0.02  # s/mm
    deriv_tau: float = 0.05  # s, low-pass on the error derivative


@dataclass
class PidState:
    integral: float = 0.0  # mm s
    prev_error: float | None = None  # mm
    deriv: float = 0.0  # mm/s, filtered


def map_joystick(inp: JoystickInput) -> SegmentSetpoint:
    """Demand = x * 120 deg, filled into segment 1 first, spillover to 2."""
    inp = inp.clamped()
    demand = inp.x * TOTAL_BEND_CAP
    b1 = _clamp(demand, -SEG_BEND_CAP, SEG_BEND_CAP)
    b2 = demand - b1
    return SegmentSetpoint(bends=(b1, b2), y_axis=inp.y)


def bend_to_arc(bend: float, geom: SegmentGeometry) -> ArcParams:
    """Reference arc for a signed planar bend, reachable by extension only.

    The arc length is raised so the innermost strand reference stays at the
    vented length l0: the strands can only extend under pressure, so a bend
    must be produced by lengthening the outer strands, not shortening the
    inner one.
    """
    if bend == 0.0:
        return ArcParams(kappa=0.0, phi=0.0, length=geom.l0)
    length = geom.l0 + _S3 * abs(bend) * geom.d
    kappa = abs(bend) / length
    phi = math.pi / 2.0 if bend > 0.0 else -math.pi / 2.0
    return ArcParams(kappa=kappa, phi=phi, length=length)


def setpoint_to_strand_refs(sp: SegmentSetpoint, geom: SegmentGeometry) -> list[float]:
    """Six reference lengths (m), segment-major; propagates range errors."""
    refs: list[float] = []
    for bend in sp.bends:
        arc = bend_to_arc(bend, geom)
        refs.extend(arc_to_strands(arc, geom).as_tuple())
    return refs


def pid_step(gains: PidGains, state: PidState, error: float, dt: float) -> tuple[float, PidState]:
    """One PID update on a length error in mm; returns (u, new state).

    Output clamps to [-1, 1]; while saturated the integral is frozen
    (anti-windup) and ki * integral itself is bounded to [-1, 1]. The
    error first-difference is low-pass filtered (deriv_tau) before the kd
    term: the raw difference of a quantized noisy reading at 100 Hz would
    swamp the valve command.
    """
    raw = 0.0 if state.prev_error is None else (error - state.prev_error) / dt
    if gains.deriv_tau > 0.0:
        alpha = dt / (gains.deriv_tau + dt)
        deriv = state.deriv + (raw - state.deriv) * alpha
    else:
        deriv = raw
    integral = state.integral + error * dt
    if gains.ki > 0.0:
        bound = 1.0 / gains.ki
        integral = _clamp(integral, -bound, bound)
    u = gains.kp * error + gains.ki * integral + gains.kd * deriv
    if u > 1.0 or u < -1.0:
        u = _clamp(u, -1.0, 1.0)
        integral = state.integral  # freeze while saturated
    return u, PidState(integral=integral, prev_error=error, deriv=deriv)


def terminal_controller_step(
    refs_mm, meas_mm, pid_states: list[PidState], gains: PidGains, dt: float
) -> tuple[list[float], list[PidState]]:
    """Independent per-strand PID for one segment's three strands."""
    cmds: list[float] = []
    new_states: list[PidState] = []
    for ref, meas, st in zip(refs_mm, meas_mm, pid_states):
        u, st2 = pid_step(gains, st, ref - meas, dt)
        cmds.append(u)
        new_states.append(st2)
    return cmds, new_states


@dataclass
class EstopLatch:
    """Latched emergency stop: while engaged every valve vents and the
    throttle is zero; reset is explicit."""

    engaged: bool = False

    def update(self, estop_flag: bool) -> bool:
        """Follow the pilot's estop flag; returns True on the engage edge
        (callers clear PID integrals then to avoid a windup kick)."""
        edge = estop_flag and not self.engaged
        self.engaged = estop_flag
        return edge

    def override(self, valve_cmds: list[float], throttle: float) -> tuple[list[float], float]:
        if not self.engaged:
            return valve_cmds, throttle
        return [-1.0] * len(valve_cmds), 0.0
