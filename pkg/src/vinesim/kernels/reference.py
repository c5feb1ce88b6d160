"""Pure-Python geometry kernels.

This is the fallback used when the compiled extension is unavailable and
the parity oracle for it: _fastgeom.pyx mirrors these loops operation for
operation (and is compiled with FP contraction off), so both backends
produce bit-identical doubles.
"""

import math

BACKEND = "python"

_TWO_PI = 2.0 * math.pi


def prepare_walls(segments):
    """Precompute the wall-segment table; segments is an iterable of
    (ax, ay, bx, by)."""
    return [
        (float(a), float(b), float(c), float(d)) for a, b, c, d in segments
    ]


def _wrap(theta):
    r = math.fmod(theta + math.pi, _TWO_PI)
    if r <= 0.0:
        r += _TWO_PI
    return r - math.pi


def step_arc(x, y, theta, kappa, ds):
    """Advance (x, y, theta) along a circular arc by path length ds."""
    if abs(kappa * ds) < 1e-9:
        x = x + ds * math.cos(theta)
        y = y + ds * math.sin(theta)
        theta2 = theta + kappa * ds
    else:
        theta2 = theta + kappa * ds
        x = x + (math.sin(theta2) - math.sin(theta)) / kappa
        y = y - (math.cos(theta2) - math.cos(theta)) / kappa
    return x, y, _wrap(theta2)


def clearance(x, y, walls):
    """Distance from a point to the nearest wall segment (inf if none)."""
    best = math.inf
    for ax, ay, bx, by in walls:
        ex = bx - ax
        ey = by - ay
        wx = x - ax
        wy = y - ay
        ll = ex * ex + ey * ey
        if ll > 0.0:
            t = (wx * ex + wy * ey) / ll
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        else:
            t = 0.0
        dx = wx - t * ex
        dy = wy - t * ey
        d = math.sqrt(dx * dx + dy * dy)
        if d < best:
            best = d
    return best


def _ray_hit(ox, oy, rx, ry, walls, max_range):
    best = max_range
    for ax, ay, bx, by in walls:
        ex = bx - ax
        ey = by - ay
        denom = rx * ey - ry * ex
        if math.fabs(denom) < 1e-15:
            continue
        sx = ax - ox
        sy = ay - oy
        t = (sx * ey - sy * ex) / denom
        u = (sx * ry - sy * rx) / denom
        if t >= 0.0 and 0.0 <= u <= 1.0 and t < best:
            best = t
    return best


def raycast(x, y, theta, fov, n_rays, max_range, walls):
    """Ranges along n_rays rays spread over fov centered on theta."""
    out = []
    if n_rays == 1:
        angles = [theta]
    else:
        step = fov / (n_rays - 1)
        angles = [theta - 0.5 * fov + i * step for i in range(n_rays)]
    for ang in angles:
        out.append(_ray_hit(x, y, math.cos(ang), math.sin(ang), walls, max_range))
    return out


def los_clear(x0, y0, x1, y1, walls):
    """True if the open segment (x0,y0)-(x1,y1) crosses no wall."""
    rx = x1 - x0
    ry = y1 - y0
    for ax, ay, bx, by in walls:
        ex = bx - ax
        ey = by - ay
        denom = rx * ey - ry * ex
        if math.fabs(denom) < 1e-15:
            continue
        sx = ax - x0
        sy = ay - y0
        t = (sx * ey - sy * ex) / denom
        u = (sx * ry - sy * rx) / denom
        if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
            return False
    return True


def nearest_wall(x, y, walls):
    """(distance, nx, ny): nearest wall point and the outward unit normal
    from it toward (x, y). Normal is (0, 0) when no wall or distance 0."""
    best = math.inf
    px = py = 0.0
    for ax, ay, bx, by in walls:
        ex = bx - ax
        ey = by - ay
        wx = x - ax
        wy = y - ay
        ll = ex * ex + ey * ey
        if ll > 0.0:
            t = (wx * ex + wy * ey) / ll
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        else:
            t = 0.0
        dx = wx - t * ex
        dy = wy - t * ey
        d = math.sqrt(dx * dx + dy * dy)
        if d < best:
            best = d
            px = dx
            py = dy
    if not (best < math.inf) or best <= 0.0:
        return best, 0.0, 0.0
    return best, px / best, py / best


def advance_arc(x, y, theta, kappa, ds, walls, head_radius, sub_len=0.002):
    """March along the arc with sliding contact against the walls.

    A head that would penetrate a wall is deflected along the wall
    tangent (the tube presses and conforms, which is how the robot
    steers off structure); only a near-head-on or wedged contact stops
    it. Returns (x, y, theta, ds_applied, blocked). The admissible
    clearance is min(head_radius, clearance at start) so a pressed head
    may slide but never digs deeper.
    """
    if ds <= 0.0:
        return x, y, theta, 0.0, False
    thr = head_radius - 1e-9
    c0 = clearance(x, y, walls)
    if c0 < thr:
        thr = c0
    applied = 0.0
    remaining = ds
    while remaining > 1e-15:
        h = remaining if remaining < sub_len else sub_len
        cx, cy, ct = step_arc(x, y, theta, kappa, h)
        if clearance(cx, cy, walls) >= thr:
            x, y, theta = cx, cy, ct
            applied += h
            remaining -= h
            continue
        c_now, nx, ny = nearest_wall(x, y, walls)
        if c_now > thr + 1e-7:
            # not yet in contact: bisect the arc up to the contact point
            lo = 0.0
            hi = h
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                mx, my, mt = step_arc(x, y, theta, kappa, mid)
                if clearance(mx, my, walls) >= thr:
                    lo = mid
                else:
                    hi = mid
            if lo > 0.0:
                x, y, theta = step_arc(x, y, theta, kappa, lo)
                applied += lo
                remaining -= lo
                continue
        # pressed: project the heading onto the wall tangent and slide
        dirx = math.cos(theta)
        diry = math.sin(theta)
        dot = dirx * nx + diry * ny
        tx = dirx - dot * nx
        ty = diry - dot * ny
        tl = math.sqrt(tx * tx + ty * ty)
        moved = False
        if tl > 0.2:
            tx /= tl
            ty /= tl
            sx = x + h * tx
            sy = y + h * ty
            if clearance(sx, sy, walls) >= thr:
                x = sx
                y = sy
                theta = _wrap(math.atan2(ty, tx) + kappa * h)
                applied += h
                remaining -= h
                moved = True
        if not moved:
            return x, y, theta, applied, True
    return x, y, theta, applied, False
