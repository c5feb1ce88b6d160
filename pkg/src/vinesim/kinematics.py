"""Constant-curvature segment geometry.

Each actuator segment is treated as a circular arc described by curvature
kappa (1/m), bending-plane angle phi (rad, measured from the strand-1
azimuth) and arc length (m). The three strand lengths of a segment relate
to the arc through the standard three-strand map

    l_i = length * (1 - kappa * d * cos(phi - gamma_i))

with gamma_i = 0, 2pi/3, 4pi/3 and d the strand offset radius. The map is
exactly invertible, which is what the draw-wire feedback chain relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

KAPPA_MAX = 5.0  # 1/m, from the 20 cm minimum bending radius

_GAMMA = (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)

# below this |kappa*length| the arc transform switches to its series limit
_STRAIGHT_EPS = 1e-6


class RangeError(ValueError):
    """An arc or strand length left its admissible range."""


def wrap_angle(theta: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    r = math.fmod(theta + math.pi, 2.0 * math.pi)
    if r <= 0.0:
        r += 2.0 * math.pi
    return r - math.pi


@dataclass(frozen=True)
class ArcParams:
    """One constant-curvature segment: kappa (1/m), phi (rad), length (m)."""

    kappa: float
    phi: float
    length: float

    def validate(self) -> "ArcParams":
        if not self.length > 0.0:
            raise RangeError(f"arc length must be positive, got {self.length}")
        if abs(self.kappa) > KAPPA_MAX:
            raise RangeError(
                f"curvature {self.kappa:.4f} exceeds limit {KAPPA_MAX} 1/m"
            )
        return self


@dataclass(frozen=True)
class StrandLengths:
    l1: float
    l2: float
    l3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.l1, self.l2, self.l3)


@dataclass(frozen=True)
class SegmentGeometry:
    """Strand layout of one segment.

    slack_margin / max_strain bound the feasible strand band
    [l0*(1-slack_margin), l0*(1+max_strain)]; the upper value matches the
    actuator strain limit of the plant so that every reachable reference is
    also a representable strand length.
    """

    l0: float = 0.21  # nominal strand length, m
    d: float = 0.03  # strand offset radius, m
    gamma: tuple[float, float, float] = _GAMMA
    slack_margin: float = 0.05
    max_strain: float = 0.32

    @property
    def min_length(self) -> float:
        return self.l0 * (1.0 - self.slack_margin)

    @property
    def max_length(self) -> float:
        return self.l0 * (1.0 + self.max_strain)


@dataclass
class Pose2:
    """Planar pose; theta normalized to (-pi, pi]."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        self.theta = wrap_angle(self.theta)


@dataclass
class HomTransform:
    """Rigid transform: 3x3 rotation + translation (m)."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def compose(self, other: "HomTransform") -> "HomTransform":
        return HomTransform(
            rotation=self.rotation @ other.rotation,
            translation=self.rotation @ other.translation + self.translation,
        )


def arc_to_strands(arc: ArcParams, geom: SegmentGeometry) -> StrandLengths:
    """Map an arc to its three strand lengths.

    Raises RangeError if the arc is invalid or a resulting strand leaves
    the feasible band of the geometry.
    """
    arc.validate()
    lengths = []
    for i, g in enumerate(geom.gamma):
        li = arc.length * (1.0 - arc.kappa * geom.d * math.cos(arc.phi - g))
        if li < geom.min_length or li > geom.max_length:
            raise RangeError(
                f"strand {i + 1} length {li:.4f} m outside "
                f"[{geom.min_length:.4f}, {geom.max_length:.4f}]"
            )
        lengths.append(li)
    return StrandLengths(*lengths)


def strands_to_arc(
    lengths: StrandLengths, geom: SegmentGeometry, validate: bool = True
) -> ArcParams:
    """Invert the strand map; exact for any length triple.

    Equal lengths map to (kappa=0, phi=0). With validate=False the feasible
    band is not enforced, which the measurement path uses (noisy draw-wire
    readings may sit slightly outside it).
    """
    ls = lengths.as_tuple()
    if validate:
        for i, li in enumerate(ls):
            if li < geom.min_length or li > geom.max_length:
                raise RangeError(
                    f"strand {i + 1} length {li:.4f} m outside "
                    f"[{geom.min_length:.4f}, {geom.max_length:.4f}]"
                )
    mean = (ls[0] + ls[1] + ls[2]) / 3.0
    # projections of the length deviation onto the two bending axes:
    # cx = -L k d cos(phi), cy = -L k d sin(phi)
    cx = (2.0 / 3.0) * sum(li * math.cos(g) for li, g in zip(ls, geom.gamma))
    cy = (2.0 / 3.0) * sum(li * math.sin(g) for li, g in zip(ls, geom.gamma))
    amp = math.sqrt(cx * cx + cy * cy)
    # below ~1e-10 1/m the bending direction is numerical noise; snap to
    # the canonical straight arc (equal lengths map to kappa=0, phi=0)
    if amp <= mean * geom.d * 1e-10:
        return ArcParams(kappa=0.0, phi=0.0, length=mean)
    kappa = amp / (mean * geom.d)
    phi = math.atan2(-cy, -cx)
    return ArcParams(kappa=kappa, phi=phi, length=mean)


def bend_angle(arc: ArcParams) -> float:
    """Total bend of the segment in rad: kappa * length."""
    return arc.kappa * arc.length


def planar_bend(arc: ArcParams) -> float:
    """Signed bend projected onto the planar (phi = +/-pi/2) axis."""
    return arc.kappa * arc.length * math.sin(arc.phi)


def arc_transform(arc: ArcParams) -> HomTransform:
    """Frame transform across one segment (local z = segment axis).

    Continuous at kappa = 0: below |kappa*length| = 1e-6 the translation
    uses the series limit to avoid dividing by kappa.
    """
    theta = arc.kappa * arc.length
    cphi, sphi = math.cos(arc.phi), math.sin(arc.phi)
    if abs(theta) < _STRAIGHT_EPS:
        # (1-cos t)/k = k l^2/2 * (1 - t^2/12), sin t / k = l * (1 - t^2/6)
        lat = arc.kappa * arc.length * arc.length / 2.0 * (1.0 - theta * theta / 12.0)
        adv = arc.length * (1.0 - theta * theta / 6.0)
    else:
        lat = (1.0 - math.cos(theta)) / arc.kappa
        adv = math.sin(theta) / arc.kappa
    translation = np.array([lat * cphi, lat * sphi, adv])

    # R = Rz(phi) Ry(theta) Rz(-phi)
    rz = np.array([[cphi, -sphi, 0.0], [sphi, cphi, 0.0], [0.0, 0.0, 1.0]])
    ct, st = math.cos(theta), math.sin(theta)
    ry = np.array([[ct, 0.0, st], [0.0, 1.0, 0.0], [-st, 0.0, ct]])
    rotation = rz @ ry @ rz.T
    return HomTransform(rotation=rotation, translation=translation)


def chain_tip_pose(segments: list[ArcParams]) -> HomTransform:
    """Compose per-segment transforms base -> tip."""
    tip = HomTransform()
    for seg in segments:
        tip = tip.compose(arc_transform(seg))
    return tip


def planar_step(pose: Pose2, kappa_eff: float, ds: float) -> Pose2:
    """Advance a planar pose along a circular arc of curvature kappa_eff."""
    from .kernels import step_arc

    x, y, theta = step_arc(pose.x, pose.y, pose.theta, kappa_eff, ds)
    return Pose2(x, y, theta)
