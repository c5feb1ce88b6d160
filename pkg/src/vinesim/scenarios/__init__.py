"""Bundled scenario corpus."""

from importlib import resources
from pathlib import Path

from ..world import Scenario, load_scenario

_BUNDLED = ("straight_corridor", "open_field", "corner_90", "fig5_course")


def bundled_names():
    return list(_BUNDLED)


def load_bundled(name: str) -> Scenario:
    if name not in _BUNDLED:
        raise ValueError(f"unknown bundled scenario {name!r}; have {', '.join(_BUNDLED)}")
    text = resources.files(__package__).joinpath(f"{name}.json").read_text()
    return load_scenario(text)


def scenario_from_path(path) -> Scenario:
    return load_scenario(Path(path).read_text())
