#!/usr/bin/env python3
"""Regenerate the bundled scenario corpus from course descriptions."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from vinesim.courses import corridor_scenario, scenario_json

OUT = Path(__file__).resolve().parents[1] / "src" / "vinesim" / "scenarios"


def straight_corridor():
    # victim 8 m in: detection fires 2 m short, after 6 m of travel
    return corridor_scenario(
        "straight_corridor",
        segments=[("straight", 10.5)],
        width=0.38,
        start=(-0.5, 0.0, 0.0),
        victim=(8.5, 0.0),
    ) | {"start": {"x": 0.0, "y": 0.0, "theta": 0.0}}


def open_field():
    # no structure anywhere near the robot: steering is friction-limited
    return {
        "name": "open_field",
        "walls": [],
        "start": {"x": 0.0, "y": 0.0, "theta": 0.0},
        "victim": {"x": 30.0, "y": 0.0},
        "max_tube": 17.0,
        "brace_radius": 0.15,
    }


def corner_90():
    return corridor_scenario(
        "corner_90",
        segments=[("straight", 2.4), ("arc", 0.30, 90.0), ("straight", 3.4)],
        width=0.38,
        start=(-0.4, 0.0, 0.0),
    ) | {"start": {"x": 0.0, "y": 0.0, "theta": 0.0}}


def fig5_course():
    # 10 m with two curves and one 90 degree turn
    return corridor_scenario(
        "fig5_course",
        segments=[
            ("straight", 2.8),
            ("arc", 1.0, 45.0),
            ("straight", 2.4),
            ("arc", 1.0, -45.0),
            ("straight", 1.6),
            ("arc", 0.30, 90.0),
            ("straight", 2.2),
        ],
        width=0.38,
        start=(-0.4, 0.0, 0.0),
    ) | {"start": {"x": 0.0, "y": 0.0, "theta": 0.0}}


def main():
    for build in (straight_corridor, open_field, corner_90, fig5_course):
        doc = build()
        path = OUT / f"{doc['name']}.json"
        path.write_text(scenario_json(doc) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
