"""Geometry kernel backend selection.

The compiled extension is preferred when present; VINESIM_PURE_PYTHON=1
forces the pure-Python reference (used by the parity tests and as the
fallback on installs without a C toolchain).
"""

import os

if os.environ.get("VINESIM_PURE_PYTHON") == "1":
    from . import reference as _impl
else:
    try:
        from . import _fastgeom as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import reference as _impl

BACKEND = _impl.BACKEND
prepare_walls = _impl.prepare_walls
step_arc = _impl.step_arc
clearance = _impl.clearance
raycast = _impl.raycast
los_clear = _impl.los_clear
advance_arc = _impl.advance_arc
nearest_wall = _impl.nearest_wall
