import math

import numpy as np
import pytest

from vinesim.kinematics import (
    ArcParams,
    HomTransform,
    Pose2,
    RangeError,
    SegmentGeometry,
    StrandLengths,
    arc_to_strands,
    arc_transform,
    bend_angle,
    chain_tip_pose,
    planar_bend,
    planar_step,
    strands_to_arc,
    wrap_angle,
)

GEOM = SegmentGeometry()  # l0=0.21, d=0.03
# wide band: the round-trip identity holds for any representable arc
WIDE = SegmentGeometry(slack_margin=0.5, max_strain=0.8)


def test_arc_to_strands_straight():
    s = arc_to_strands(ArcParams(0.0, 0.0, 0.25), SegmentGeometry(l0=0.25))
    assert s.as_tuple() == (0.25, 0.25, 0.25)


def test_arc_to_strands_bent():
    # hand evaluation of l_i = L(1 - k d cos(phi - g_i)) at k=4, phi=0, L=0.25:
    # cos terms 1, -1/2, -1/2 give 0.25*0.88, 0.25*1.06, 0.25*1.06
    s = arc_to_strands(ArcParams(4.0, 0.0, 0.25), GEOM)
    assert abs(s.l1 - 0.2200) < 1e-12
    assert abs(s.l2 - 0.2650) < 1e-12
    assert abs(s.l3 - 0.2650) < 1e-12


def test_arc_to_strands_kappa_limit():
    with pytest.raises(RangeError):
        arc_to_strands(ArcParams(5.1, 0.0, 0.25), GEOM)


def test_arc_to_strands_band_check():
    # a straight arc much longer than l0 is not a representable strand state
    with pytest.raises(RangeError, match="strand 1"):
        arc_to_strands(ArcParams(0.0, 0.0, 0.30), GEOM)


def test_strands_to_arc_straight():
    arc = strands_to_arc(StrandLengths(0.25, 0.25, 0.25), WIDE)
    assert arc.kappa == 0.0
    assert arc.phi == 0.0
    assert abs(arc.length - 0.25) < 1e-15


def test_strands_to_arc_inverts_strand_map():
    arc = strands_to_arc(StrandLengths(0.2200, 0.2650, 0.2650), WIDE)
    assert abs(arc.kappa - 4.0) < 1e-9
    assert abs(wrap_angle(arc.phi)) < 1e-9
    assert abs(arc.length - 0.25) < 1e-12


def test_round_trip_property():
    rng = np.random.Generator(np.random.PCG64(42))
    for _ in range(1000):
        kappa = rng.uniform(0.2, 5.0)
        phi = rng.uniform(-math.pi, math.pi)
        length = rng.uniform(0.20, 0.24)
        arc = ArcParams(kappa, phi, length)
        back = strands_to_arc(arc_to_strands(arc, WIDE), WIDE)
        assert abs(back.kappa - kappa) / kappa < 1e-9
        assert abs(wrap_angle(back.phi - phi)) < 1e-9
        assert abs(back.length - length) / length < 1e-9


def test_strand_mean_equals_arc_length():
    rng = np.random.Generator(np.random.PCG64(7))
    for _ in range(200):
        arc = ArcParams(rng.uniform(0, 5), rng.uniform(-3, 3), rng.uniform(0.2, 0.23))
        s = arc_to_strands(arc, WIDE)
        assert abs((s.l1 + s.l2 + s.l3) / 3.0 - arc.length) < 1e-12


def test_bend_angle():
    assert bend_angle(ArcParams(0.0, 0.0, 0.25)) == 0.0
    assert abs(bend_angle(ArcParams(4.0, 0.0, 0.25)) - 1.0) < 1e-15
    # 120 deg at the 0.2 m minimum radius needs 0.419 m of arc
    b = bend_angle(ArcParams(5.0, 0.0, 0.419))
    assert abs(b - 2.095) < 1e-12
    assert abs(math.degrees(b) - 120.0) < 0.1


def test_planar_bend_sign():
    assert planar_bend(ArcParams(2.0, math.pi / 2, 0.21)) > 0
    assert planar_bend(ArcParams(2.0, -math.pi / 2, 0.21)) < 0
    assert planar_bend(ArcParams(0.0, 0.0, 0.21)) == 0.0


def test_arc_transform_straight():
    t = arc_transform(ArcParams(0.0, 0.0, 1.0))
    assert np.allclose(t.translation, [0.0, 0.0, 1.0], atol=1e-15)
    assert np.allclose(t.rotation, np.eye(3), atol=1e-15)


def test_arc_transform_quarter_circle():
    # quarter circle of radius 2/pi: tip at (2/pi, 0, 2/pi), 90 deg about y
    t = arc_transform(ArcParams(math.pi / 2, 0.0, 1.0))
    r = 2.0 / math.pi
    assert np.allclose(t.translation, [r, 0.0, r], atol=1e-12)
    expected_rot = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])
    assert np.allclose(t.rotation, expected_rot, atol=1e-12)


def test_arc_transform_continuous_at_zero():
    t0 = arc_transform(ArcParams(0.0, 0.3, 0.8))
    t1 = arc_transform(ArcParams(1e-7, 0.3, 0.8))
    assert np.max(np.abs(t0.rotation - t1.rotation)) < 1e-6
    assert np.max(np.abs(t0.translation - t1.translation)) < 1e-6


def test_arc_transform_orthonormal():
    rng = np.random.Generator(np.random.PCG64(3))
    for _ in range(300):
        arc = ArcParams(rng.uniform(-5, 5), rng.uniform(-math.pi, math.pi), rng.uniform(0.05, 0.5))
        r = arc_transform(arc).rotation
        assert abs(np.linalg.det(r) - 1.0) < 1e-9
        assert np.allclose(r @ r.T, np.eye(3), atol=1e-9)


def test_chain_two_straight():
    t = chain_tip_pose([ArcParams(0, 0, 0.25), ArcParams(0, 0, 0.25)])
    assert np.allclose(t.translation, [0, 0, 0.5], atol=1e-15)


def test_chain_single_equals_transform():
    arc = ArcParams(3.0, 1.0, 0.21)
    single = arc_transform(arc)
    chained = chain_tip_pose([arc])
    assert np.allclose(single.rotation, chained.rotation)
    assert np.allclose(single.translation, chained.translation)


def test_chain_two_60deg_segments_total_120():
    bend = math.radians(60.0)
    arc = ArcParams(bend / 0.21, math.pi / 2, 0.21)
    tip = chain_tip_pose([arc, arc])
    angle = math.acos(max(-1.0, min(1.0, (np.trace(tip.rotation) - 1.0) / 2.0)))
    assert abs(math.degrees(angle) - 120.0) < 1e-9


def test_chain_at_kappa_max_reaches_120():
    arc = ArcParams(5.0, math.pi / 2, 0.21)
    tip = chain_tip_pose([arc, arc])
    angle = math.acos(max(-1.0, min(1.0, (np.trace(tip.rotation) - 1.0) / 2.0)))
    assert math.degrees(angle) >= 120.0


def test_planar_step_straight():
    p = planar_step(Pose2(0, 0, 0), 0.0, 1.0)
    assert (p.x, p.y, p.theta) == (1.0, 0.0, 0.0)


def test_planar_step_quarter_circle():
    p = planar_step(Pose2(0, 0, 0), 1.0, math.pi / 2)
    assert abs(p.x - 1.0) < 1e-12
    assert abs(p.y - 1.0) < 1e-12
    assert abs(p.theta - math.pi / 2) < 1e-12


def test_planar_step_additivity():
    rng = np.random.Generator(np.random.PCG64(11))
    for _ in range(200):
        pose = Pose2(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-3, 3))
        kappa = rng.uniform(-5, 5)
        ds = rng.uniform(0, 0.5)
        one = planar_step(pose, kappa, ds)
        half = planar_step(planar_step(pose, kappa, ds / 2), kappa, ds / 2)
        assert abs(one.x - half.x) < 1e-12
        assert abs(one.y - half.y) < 1e-12
        assert abs(wrap_angle(one.theta - half.theta)) < 1e-12


def test_pose_theta_normalized():
    assert Pose2(0, 0, 3 * math.pi).theta == pytest.approx(math.pi)
    assert Pose2(0, 0, -math.pi).theta == pytest.approx(math.pi)
    assert -math.pi < Pose2(0, 0, 12.7).theta <= math.pi


def test_hom_transform_compose():
    a = arc_transform(ArcParams(2.0, 0.5, 0.2))
    b = arc_transform(ArcParams(-1.0, -0.2, 0.3))
    ab = a.compose(b)
    assert np.allclose(ab.rotation, a.rotation @ b.rotation)
    assert np.allclose(ab.translation, a.rotation @ b.translation + a.translation)
