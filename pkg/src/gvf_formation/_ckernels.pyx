# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: unicycle stepping and circle tracking.

Same surface and arithmetic order as ``_pykernels``.
"""

from libc.math cimport cos, sin, sqrt, remainder, isfinite, M_PI

from gvf_formation.errors import IntegrationError, SingularPointError

cdef double TAU = 2.0 * M_PI
cdef double SINGULAR_TOL = 1e-9


cdef inline double _wrap(double a) noexcept nogil:
    cdef double r = remainder(a, TAU)
    if r == -M_PI:
        return M_PI
    return r


def wrap_angle(double a):
    return _wrap(a)


cdef inline bint _finite4(double x, double y, double psi, double u) noexcept nogil:
    return isfinite(u) and isfinite(x) and isfinite(y) and isfinite(psi)


cdef int _rk4(double* x, double* y, double* psi, double speed, double u,
              double dt) noexcept nogil:
    if not _finite4(x[0], y[0], psi[0], u):
        return -1
    cdef double h2 = 0.5 * dt
    cdef double p = psi[0]
    cdef double c1 = cos(p), s1 = sin(p)
    cdef double c2 = cos(p + u * h2), s2 = sin(p + u * h2)
    cdef double c4 = cos(p + u * dt), s4 = sin(p + u * dt)
    cdef double f = speed * dt / 6.0
    x[0] = x[0] + f * (c1 + 4.0 * c2 + c4)
    y[0] = y[0] + f * (s1 + 4.0 * s2 + s4)
    psi[0] = _wrap(p + u * dt)
    return 0


cdef int _euler(double* x, double* y, double* psi, double speed, double u,
                double dt) noexcept nogil:
    if not _finite4(x[0], y[0], psi[0], u):
        return -1
    cdef double p = psi[0]
    x[0] = x[0] + speed * dt * cos(p)
    y[0] = y[0] + speed * dt * sin(p)
    psi[0] = _wrap(p + u * dt)
    return 0


def rk4_step(double x, double y, double psi, double speed, double u, double dt):
    if _rk4(&x, &y, &psi, speed, u, dt) != 0:
        raise IntegrationError(f"non-finite input: x={x} y={y} psi={psi} u={u}")
    return x, y, psi


def euler_step(double x, double y, double psi, double speed, double u, double dt):
    if _euler(&x, &y, &psi, speed, u, dt) != 0:
        raise IntegrationError(f"non-finite input: x={x} y={y} psi={psi} u={u}")
    return x, y, psi


cdef int _command(double x, double y, double psi, double speed, double cx,
                  double cy, double r, double k_e, double k_d, bint ccw,
                  double* u_out, double* e_out) noexcept nogil:
    cdef double dx = x - cx
    cdef double dy = y - cy
    cdef double e = dx * dx + dy * dy - r * r
    cdef double nx = 2.0 * dx
    cdef double ny = 2.0 * dy
    if sqrt(nx * nx + ny * ny) < SINGULAR_TOL:
        return -1
    cdef double sg = 1.0 if ccw else -1.0
    cdef double kee = k_e * e
    cdef double pdx = -sg * ny - kee * nx
    cdef double pdy = sg * nx - kee * ny
    cdef double mx = cos(psi)
    cdef double my = sin(psi)
    cdef double vx = speed * mx
    cdef double vy = speed * my
    cdef double nv = nx * vx + ny * vy
    cdef double ddx = 2.0 * (-sg * vy - kee * vx) - k_e * nv * nx
    cdef double ddy = 2.0 * (sg * vx - kee * vy) - k_e * nv * ny
    cdef double pd2 = pdx * pdx + pdy * pdy
    cdef double ff = (pdx * ddy - pdy * ddx) / pd2
    cdef double pdn = sqrt(pd2)
    cdef double align = k_d * (mx * pdy - my * pdx) / pdn
    u_out[0] = ff + align
    e_out[0] = e
    return 0


def circle_command(double x, double y, double psi, double speed, double cx,
                   double cy, double r, double k_e, double k_d, bint ccw):
    cdef double u, e
    if _command(x, y, psi, speed, cx, cy, r, k_e, k_d, ccw, &u, &e) != 0:
        raise SingularPointError(f"vehicle at circle center ({x}, {y})")
    return u, e


def track_circle(double x, double y, double psi, double speed, double cx,
                 double cy, double r, double k_e, double k_d, bint ccw,
                 double u_max, double dt, Py_ssize_t n_steps, bint euler,
                 double[:, ::1] out):
    cdef Py_ssize_t k
    cdef double u, e
    cdef int status = 0
    if out.shape[0] < n_steps or out.shape[1] < 5:
        raise ValueError("output buffer too small")
    with nogil:
        for k in range(n_steps):
            if _command(x, y, psi, speed, cx, cy, r, k_e, k_d, ccw, &u, &e) != 0:
                status = 1
                break
            if u > u_max:
                u = u_max
            elif u < -u_max:
                u = -u_max
            out[k, 0] = x
            out[k, 1] = y
            out[k, 2] = psi
            out[k, 3] = u
            out[k, 4] = e
            if euler:
                status = 2 * (_euler(&x, &y, &psi, speed, u, dt) != 0)
            else:
                status = 2 * (_rk4(&x, &y, &psi, speed, u, dt) != 0)
            if status:
                break
    if status == 1:
        raise SingularPointError(f"vehicle at circle center ({x}, {y})")
    if status == 2:
        raise IntegrationError(f"non-finite input: x={x} y={y} psi={psi} u={u}")
    return x, y, psi
