# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels.

Mirrors kernels/reference.py operation for operation. Together with
-ffp-contract=off this keeps the two backends bit-identical, so runs are
reproducible regardless of which backend was importable.
"""

from libc.math cimport sin, cos, sqrt, fabs, fmod, atan2, M_PI, INFINITY

import numpy as np

BACKEND = "compiled"

cdef double TWO_PI = 2.0 * M_PI


def prepare_walls(segments):
    arr = np.ascontiguousarray(np.asarray(segments, dtype=np.float64).reshape(-1, 4))
    return arr


cdef inline double _wrap(double theta) nogil:
    cdef double r = fmod(theta + M_PI, TWO_PI)
    if r <= 0.0:
        r += TWO_PI
    return r - M_PI


cdef inline void _step(double x, double y, double theta, double kappa,
                       double ds, double* ox, double* oy, double* ot) nogil:
    cdef double theta2
    if fabs(kappa * ds) < 1e-9:
        ox[0] = x + ds * cos(theta)
        oy[0] = y + ds * sin(theta)
        ot[0] = _wrap(theta + kappa * ds)
    else:
        theta2 = theta + kappa * ds
        ox[0] = x + (sin(theta2) - sin(theta)) / kappa
        oy[0] = y - (cos(theta2) - cos(theta)) / kappa
        ot[0] = _wrap(theta2)


def step_arc(double x, double y, double theta, double kappa, double ds):
    cdef double ox, oy, ot
    _step(x, y, theta, kappa, ds, &ox, &oy, &ot)
    return ox, oy, ot


cdef double _clearance(double x, double y, double[:, ::1] walls) nogil:
    cdef double best = INFINITY
    cdef double ax, ay, bx, by, ex, ey, wx, wy, ll, t, dx, dy, d
    cdef Py_ssize_t i
    for i in range(walls.shape[0]):
        ax = walls[i, 0]; ay = walls[i, 1]
        bx = walls[i, 2]; by = walls[i, 3]
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
        d = sqrt(dx * dx + dy * dy)
        if d < best:
            best = d
    return best


def clearance(double x, double y, double[:, ::1] walls):
    return _clearance(x, y, walls)


cdef double _ray_hit(double ox, double oy, double rx, double ry,
                     double[:, ::1] walls, double max_range) nogil:
    cdef double best = max_range
    cdef double ax, ay, bx, by, ex, ey, denom, sx, sy, t, u
    cdef Py_ssize_t i
    for i in range(walls.shape[0]):
        ax = walls[i, 0]; ay = walls[i, 1]
        bx = walls[i, 2]; by = walls[i, 3]
        ex = bx - ax
        ey = by - ay
        denom = rx * ey - ry * ex
        if fabs(denom) < 1e-15:
            continue
        sx = ax - ox
        sy = ay - oy
        t = (sx * ey - sy * ex) / denom
        u = (sx * ry - sy * rx) / denom
        if t >= 0.0 and 0.0 <= u <= 1.0 and t < best:
            best = t
    return best


def raycast(double x, double y, double theta, double fov, int n_rays,
            double max_range, double[:, ::1] walls):
    cdef list out = []
    cdef double step, ang
    cdef int i
    if n_rays == 1:
        out.append(_ray_hit(x, y, cos(theta), sin(theta), walls, max_range))
        return out
    step = fov / (n_rays - 1)
    for i in range(n_rays):
        ang = theta - 0.5 * fov + i * step
        out.append(_ray_hit(x, y, cos(ang), sin(ang), walls, max_range))
    return out


def los_clear(double x0, double y0, double x1, double y1, double[:, ::1] walls):
    cdef double rx = x1 - x0
    cdef double ry = y1 - y0
    cdef double ax, ay, bx, by, ex, ey, denom, sx, sy, t, u
    cdef Py_ssize_t i
    for i in range(walls.shape[0]):
        ax = walls[i, 0]; ay = walls[i, 1]
        bx = walls[i, 2]; by = walls[i, 3]
        ex = bx - ax
        ey = by - ay
        denom = rx * ey - ry * ex
        if fabs(denom) < 1e-15:
            continue
        sx = ax - x0
        sy = ay - y0
        t = (sx * ey - sy * ex) / denom
        u = (sx * ry - sy * rx) / denom
        if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
            return False
    return True


cdef double _nearest(double x, double y, double[:, ::1] walls,
                     double* onx, double* ony) nogil:
    cdef double best = INFINITY
    cdef double px = 0.0, py = 0.0
    cdef double ax, ay, bx, by, ex, ey, wx, wy, ll, t, dx, dy, d
    cdef Py_ssize_t i
    for i in range(walls.shape[0]):
        ax = walls[i, 0]; ay = walls[i, 1]
        bx = walls[i, 2]; by = walls[i, 3]
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
        d = sqrt(dx * dx + dy * dy)
        if d < best:
            best = d
            px = dx
            py = dy
    if best == INFINITY or best <= 0.0:
        onx[0] = 0.0
        ony[0] = 0.0
        return best
    onx[0] = px / best
    ony[0] = py / best
    return best


def nearest_wall(double x, double y, double[:, ::1] walls):
    cdef double nx, ny, d
    d = _nearest(x, y, walls, &nx, &ny)
    return d, nx, ny


def advance_arc(double x, double y, double theta, double kappa, double ds,
                double[:, ::1] walls, double head_radius, double sub_len=0.002):
    cdef double thr, c0, applied, remaining, h, cx, cy, ct, lo, hi, mid, mx, my, mt
    cdef double c_now, nx, ny, dirx, diry, dot, tx, ty, tl, sx, sy
    cdef int k
    cdef bint moved
    if ds <= 0.0:
        return x, y, theta, 0.0, False
    thr = head_radius - 1e-9
    c0 = _clearance(x, y, walls)
    if c0 < thr:
        thr = c0
    applied = 0.0
    remaining = ds
    while remaining > 1e-15:
        h = remaining if remaining < sub_len else sub_len
        _step(x, y, theta, kappa, h, &cx, &cy, &ct)
        if _clearance(cx, cy, walls) >= thr:
            x = cx; y = cy; theta = ct
            applied += h
            remaining -= h
            continue
        c_now = _nearest(x, y, walls, &nx, &ny)
        if c_now > thr + 1e-7:
            lo = 0.0
            hi = h
            for k in range(40):
                mid = 0.5 * (lo + hi)
                _step(x, y, theta, kappa, mid, &mx, &my, &mt)
                if _clearance(mx, my, walls) >= thr:
                    lo = mid
                else:
                    hi = mid
            if lo > 0.0:
                _step(x, y, theta, kappa, lo, &cx, &cy, &ct)
                x = cx; y = cy; theta = ct
                applied += lo
                remaining -= lo
                continue
        dirx = cos(theta)
        diry = sin(theta)
        dot = dirx * nx + diry * ny
        tx = dirx - dot * nx
        ty = diry - dot * ny
        tl = sqrt(tx * tx + ty * ty)
        moved = False
        if tl > 0.2:
            tx /= tl
            ty /= tl
            sx = x + h * tx
            sy = y + h * ty
            if _clearance(sx, sy, walls) >= thr:
                x = sx
                y = sy
                theta = _wrap(atan2(ty, tx) + kappa * h)
                applied += h
                remaining -= h
                moved = True
        if not moved:
            return x, y, theta, applied, True
    return x, y, theta, applied, False
