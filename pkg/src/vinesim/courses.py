"""Corridor course construction.

Courses are described as a centerline (straights and arcs) with a corridor
width; the two offset polylines become the scenario walls. Used to author
the bundled scenario corpus and by tests that need custom corridors.
"""

from __future__ import annotations

import json
import math


def _offset_point(x: float, y: float, theta: float, lateral: float):
    return [x - lateral * math.sin(theta), y + lateral * math.cos(theta)]


def corridor_walls(
    start=(0.0, 0.0, 0.0),
    segments=(),
    width: float = 0.36,
    arc_step_deg: float = 5.0,
):
    """Build (left_wall, right_wall, centerline, end_pose) polylines.

    segments: iterable of ("straight", length) or ("arc", radius,
    sweep_deg) with positive sweep turning left.
    """
    x, y, th = start
    center = [[x, y]]
    left = [_offset_point(x, y, th, +width / 2.0)]
    right = [_offset_point(x, y, th, -width / 2.0)]

    def emit():
        center.append([x, y])
        left.append(_offset_point(x, y, th, +width / 2.0))
        right.append(_offset_point(x, y, th, -width / 2.0))

    for seg in segments:
        if seg[0] == "straight":
            (_, length) = seg
            x += length * math.cos(th)
            y += length * math.sin(th)
            emit()
        elif seg[0] == "arc":
            (_, radius, sweep_deg) = seg
            sweep = math.radians(sweep_deg)
            kappa = (1.0 if sweep >= 0.0 else -1.0) / radius
            n = max(2, int(abs(sweep_deg) / arc_step_deg))
            dpsi = sweep / n
            for _ in range(n):
                th2 = th + dpsi
                x += (math.sin(th2) - math.sin(th)) / kappa
                y -= (math.cos(th2) - math.cos(th)) / kappa
                th = th2
                emit()
        else:
            raise ValueError(f"unknown segment kind {seg[0]!r}")

    return left, right, center, (x, y, th)


def corridor_scenario(
    name: str,
    segments,
    width: float = 0.36,
    start=(0.0, 0.0, 0.0),
    victim_at_end: bool = True,
    victim=None,
    max_tube: float = 17.0,
    brace_radius: float = 0.15,
    extra_walls=(),
) -> dict:
    """Scenario document (JSON-ready dict) for a corridor course."""
    left, right, center, end = corridor_walls(start, segments, width)
    if victim is None and victim_at_end:
        victim = (end[0], end[1])
    walls = [left, right] + [list(w) for w in extra_walls]
    return {
        "name": name,
        "walls": walls,
        "start": {"x": start[0], "y": start[1], "theta": start[2]},
        "victim": {"x": victim[0], "y": victim[1]},
        "max_tube": max_tube,
        "brace_radius": brace_radius,
    }


def scenario_json(doc: dict) -> str:
    return json.dumps(doc, indent=1)
