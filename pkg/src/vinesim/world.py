"""2D debris world: walls, tube trace, contact-braced steering, camera
proxy and victim detection.

Steering authority depends on contact: the tube behind the tip cannot hold
a shape on its own, so away from structure the laid path is limited to
gentle turns (15 deg/m); braced against a wall the commanded curvature
applies fully, down to the 0.2 m bending radius.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import kernels
from .kinematics import KAPPA_MAX, Pose2, wrap_angle

HEAD_RADIUS = 0.0505  # m (101 mm head diameter)
UNBRACED_KAPPA_MAX = math.radians(15.0)  # 1/m, open-space turning limit
VICTIM_RANGE = 2.0  # m
VICTIM_HALF_FOV = math.radians(30.0)
CAMERA_MAX_RANGE = 5.0  # m


class ScenarioError(ValueError):
    """Scenario document malformed or violating an invariant."""


@dataclass
class Scenario:
    name: str
    walls: list  # list of polylines, each a list of [x, y]
    start: Pose2
    victim: tuple[float, float]
    max_tube: float = 17.0
    brace_radius: float = 0.15

    def wall_segments(self):
        segs = []
        for line in self.walls:
            for a, b in zip(line, line[1:]):
                segs.append((a[0], a[1], b[0], b[1]))
        return segs


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc}") from None

    def need(key, types, path="$"):
        if key not in doc:
            raise ScenarioError(f"{path}.{key}: missing")
        if not isinstance(doc[key], types):
            raise ScenarioError(f"{path}.{key}: expected {types}")
        return doc[key]

    name = need("name", str)
    walls_doc = need("walls", list)
    walls = []
    for i, line in enumerate(walls_doc):
        if not isinstance(line, list) or len(line) < 2:
            raise ScenarioError(f"$.walls[{i}]: polyline needs >= 2 points")
        pts = []
        for j, pt in enumerate(line):
            if (
                not isinstance(pt, list)
                or len(pt) != 2
                or not all(isinstance(v, (int, float)) for v in pt)
            ):
                raise ScenarioError(f"$.walls[{i}][{j}]: expected [x, y]")
            pts.append([float(pt[0]), float(pt[1])])
        walls.append(pts)
    start_doc = need("start", dict)
    for k in ("x", "y", "theta"):
        if k not in start_doc or not isinstance(start_doc[k], (int, float)):
            raise ScenarioError(f"$.start.{k}: expected number")
    victim_doc = need("victim", dict)
    for k in ("x", "y"):
        if k not in victim_doc or not isinstance(victim_doc[k], (int, float)):
            raise ScenarioError(f"$.victim.{k}: expected number")

    sc = Scenario(
        name=name,
        walls=walls,
        start=Pose2(float(start_doc["x"]), float(start_doc["y"]), float(start_doc["theta"])),
        victim=(float(victim_doc["x"]), float(victim_doc["y"])),
        max_tube=float(doc.get("max_tube", 17.0)),
        brace_radius=float(doc.get("brace_radius", 0.15)),
    )

    handle = kernels.prepare_walls(sc.wall_segments()) if sc.walls else kernels.prepare_walls([])
    if sc.walls:
        start_clear = kernels.clearance(sc.start.x, sc.start.y, handle)
        if start_clear < HEAD_RADIUS:
            raise ScenarioError(
                f"$.start: head (radius {HEAD_RADIUS}) does not fit, clearance {start_clear:.4f}"
            )
        victim_clear = kernels.clearance(sc.victim[0], sc.victim[1], handle)
        if victim_clear < HEAD_RADIUS:
            raise ScenarioError(
                f"$.victim: inside or too close to a wall, clearance {victim_clear:.4f}"
            )
    if sc.max_tube <= 0.0:
        raise ScenarioError("$.max_tube: must be positive")
    return sc


@dataclass
class ContactInfo:
    braced: bool
    nearest: float  # m from the head disc boundary to the closest wall


@dataclass
class TubeTrace:
    """Polyline laid down by the everting tip; immutable once laid."""

    xs: list[float] = field(default_factory=list)
    ys: list[float] = field(default_factory=list)
    headings: list[float] = field(default_factory=list)  # unwrapped
    s: list[float] = field(default_factory=list)  # cumulative arc length

    def append(self, x: float, y: float, heading: float, ds: float) -> None:
        self.xs.append(x)
        self.ys.append(y)
        self.headings.append(heading)
        self.s.append((self.s[-1] if self.s else 0.0) + ds)

    @property
    def length(self) -> float:
        return self.s[-1] if self.s else 0.0

    def max_window_curvature(self, window: float) -> float:
        """Largest |mean curvature| over any contiguous stretch of the given
        arc length (shorter stretches are measured as-is near the end)."""
        if len(self.s) < 2:
            return 0.0
        worst = 0.0
        j = 0
        n = len(self.s)
        for i in range(n - 1):
            target = self.s[i] + window
            if j <= i:
                j = i + 1
            while j < n - 1 and self.s[j] < target:
                j += 1
            ds = self.s[j] - self.s[i]
            if ds <= 0.0:
                continue
            k = abs(self.headings[j] - self.headings[i]) / ds
            if k > worst:
                worst = k
        return worst


def braced(pose: Pose2, walls_handle, brace_radius: float) -> ContactInfo:
    nearest = kernels.clearance(pose.x, pose.y, walls_handle) - HEAD_RADIUS
    return ContactInfo(braced=nearest <= brace_radius, nearest=nearest)


def effective_curvature(kappa_cmd: float, contact: ContactInfo) -> float:
    k = kappa_cmd
    if k > KAPPA_MAX:
        k = KAPPA_MAX
    elif k < -KAPPA_MAX:
        k = -KAPPA_MAX
    if contact.braced:
        return k
    if k > UNBRACED_KAPPA_MAX:
        return UNBRACED_KAPPA_MAX
    if k < -UNBRACED_KAPPA_MAX:
        return -UNBRACED_KAPPA_MAX
    return k


class World:
    """Mutable world state: tip pose, laid trace, contact bookkeeping.

    The head camera points along the trace-end tangent plus however much
    the internal robot has re-bent since tube was last laid: with the tip
    parked, bending swings the head to look around (the paper's escape
    maneuver). When eversion resumes while braced, the new tube kinks off
    in the head's current direction; unbraced tube cannot be redirected,
    so the look-around offset then affects only the camera.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.walls = kernels.prepare_walls(scenario.wall_segments())
        self.pose = Pose2(scenario.start.x, scenario.start.y, scenario.start.theta)
        self.heading_unwrapped = scenario.start.theta
        self.trace = TubeTrace()
        self.trace.append(self.pose.x, self.pose.y, self.heading_unwrapped, 0.0)
        self.blocked = False
        self.blocked_events = 0
        self.path_bend = 0.0  # current path-frame bend of the internal robot
        self.path_bend_laid = 0.0  # its value when tube was last laid

    def set_path_bend(self, bend: float) -> None:
        self.path_bend = bend

    @property
    def head_heading(self) -> float:
        return wrap_angle(self.pose.theta + (self.path_bend - self.path_bend_laid))

    def contact(self) -> ContactInfo:
        return braced(self.pose, self.walls, self.scenario.brace_radius)

    KINK_LAMBDA = 0.05  # m of eversion over which a braced kink resolves
    KINK_KAPPA_MAX = 25.0  # 1/m, sharpest fold the tube takes around structure

    def advance_tip(self, kappa_eff: float, ds: float, braced_now: bool = True) -> float:
        """Evert by up to ds along the commanded arc; stops at wall contact.

        Unobstructed eversion is quasi-static: laid curvature is kappa_eff
        and the look-around offset stays synced away. Bending while the
        tip is obstructed swings the head instead; the pending offset then
        folds into the tube as extra curvature (resolved over KINK_LAMBDA
        meters, braced only) once eversion resumes. Returns the applied
        arc length, i.e. the new tube actually laid.
        """
        if ds <= 0.0:
            self.blocked = False
            return 0.0
        delta = self.path_bend - self.path_bend_laid
        kink_kappa = 0.0
        if braced_now and delta != 0.0:
            kink_kappa = delta / self.KINK_LAMBDA
            if kink_kappa > self.KINK_KAPPA_MAX:
                kink_kappa = self.KINK_KAPPA_MAX
            elif kink_kappa < -self.KINK_KAPPA_MAX:
                kink_kappa = -self.KINK_KAPPA_MAX
        kappa = kappa_eff + kink_kappa
        x, y, th, applied, blocked = kernels.advance_arc(
            self.pose.x, self.pose.y, self.pose.theta, kappa, ds, self.walls, HEAD_RADIUS
        )
        if blocked and not self.blocked:
            self.blocked_events += 1
        self.blocked = blocked
        if applied > 0.0:
            # sliding contact can redirect the heading beyond kappa*ds, so
            # unwrap from the actual heading change (|delta| << pi per tick)
            self.heading_unwrapped += wrap_angle(th - self.pose.theta)
            self.pose = Pose2(x, y, th)
            self.trace.append(x, y, self.heading_unwrapped, applied)
            if applied >= 0.8 * ds and abs(delta) < 0.05:
                self.path_bend_laid = self.path_bend  # unobstructed: quasi-static
            else:
                self.path_bend_laid += kink_kappa * applied
        return applied

    def raycast_view(self, fov: float, n_rays: int, max_range: float = CAMERA_MAX_RANGE):
        return kernels.raycast(
            self.pose.x, self.pose.y, self.head_heading, fov, n_rays, max_range, self.walls
        )

    def victim_detected(self) -> bool:
        vx, vy = self.scenario.victim
        dx = vx - self.pose.x
        dy = vy - self.pose.y
        if dx * dx + dy * dy > VICTIM_RANGE * VICTIM_RANGE:
            return False
        bearing = wrap_angle(math.atan2(dy, dx) - self.head_heading)
        if abs(bearing) > VICTIM_HALF_FOV:
            return False
        return kernels.los_clear(self.pose.x, self.pose.y, vx, vy, self.walls)


def victim_detected(pose: Pose2, victim, walls_handle) -> bool:
    """Standalone form of the head's victim check."""
    vx, vy = victim
    dx = vx - pose.x
    dy = vy - pose.y
    if dx * dx + dy * dy > VICTIM_RANGE * VICTIM_RANGE:
        return False
    bearing = wrap_angle(math.atan2(dy, dx) - pose.theta)
    if abs(bearing) > VICTIM_HALF_FOV:
        return False
    return kernels.los_clear(pose.x, pose.y, vx, vy, walls_handle)


def run_metrics(records: list[dict]) -> dict:
    """Summary metrics from a completed run's telemetry records."""
    if not records:
        return {
            "elapsed_s": 0.0,
            "path_length_m": 0.0,
            "tube_used_m": 0.0,
            "blocked_events": 0,
            "detection_time_s": None,
        }
    last = records[-1]
    detection = next((r["t"] for r in records if r.get("victim")), None)
    blocked_events = 0
    prev = False
    for r in records:
        cur = bool(r.get("blocked"))
        if cur and not prev:
            blocked_events += 1
        prev = cur
    return {
        "elapsed_s": last["t"],
        "path_length_m": last["path_m"],
        "tube_used_m": last["tube_m"],
        "blocked_events": blocked_events,
        "detection_time_s": detection,
    }
