"""Pure-Python kernels: unicycle stepping and circle tracking.

Mirror of ``_ckernels.pyx``. Both modules expose the same functions with
the same argument order and must agree to round-off; the test suite runs
every kernel test against both.
"""

from math import cos, isfinite, pi, remainder, sin, sqrt

from gvf_formation.errors import IntegrationError, SingularPointError

TAU = 2.0 * pi
SINGULAR_TOL = 1e-9


def wrap_angle(a):
    r = remainder(a, TAU)
    if r == -pi:
        return pi
    return r


def rk4_step(x, y, psi, speed, u, dt):
    if not (isfinite(u) and isfinite(x) and isfinite(y) and isfinite(psi)):
        raise IntegrationError(f"non-finite input: x={x} y={y} psi={psi} u={u}")
    h2 = 0.5 * dt
    # psi(t) is linear under a held command, so k2 == k3 for position
    c1, s1 = cos(psi), sin(psi)
    c2, s2 = cos(psi + u * h2), sin(psi + u * h2)
    c4, s4 = cos(psi + u * dt), sin(psi + u * dt)
    f = speed * dt / 6.0
    x_new = x + f * (c1 + 4.0 * c2 + c4)
    y_new = y + f * (s1 + 4.0 * s2 + s4)
    return x_new, y_new, wrap_angle(psi + u * dt)


def euler_step(x, y, psi, speed, u, dt):
    if not (isfinite(u) and isfinite(x) and isfinite(y) and isfinite(psi)):
        raise IntegrationError(f"non-finite input: x={x} y={y} psi={psi} u={u}")
    return (
        x + speed * dt * cos(psi),
        y + speed * dt * sin(psi),
        wrap_angle(psi + u * dt),
    )


def circle_command(x, y, psi, speed, cx, cy, r, k_e, k_d, ccw):
    """Unsaturated yaw-rate command for tracking a circle.

    Returns ``(u_psi, e)`` where ``e`` is the level error at ``(x, y)``.
    ``ccw`` selects counterclockwise circulation.
    """
    dx = x - cx
    dy = y - cy
    e = dx * dx + dy * dy - r * r
    nx = 2.0 * dx
    ny = 2.0 * dy
    if sqrt(nx * nx + ny * ny) < SINGULAR_TOL:
        raise SingularPointError(f"vehicle at circle center ({x}, {y})")
    sg = 1.0 if ccw else -1.0
    kee = k_e * e
    pdx = -sg * ny - kee * nx
    pdy = sg * nx - kee * ny
    mx = cos(psi)
    my = sin(psi)
    vx = speed * mx
    vy = speed * my
    nv = nx * vx + ny * vy
    # d/dt of the field along the velocity, Hessian = 2 I
    ddx = 2.0 * (-sg * vy - kee * vx) - k_e * nv * nx
    ddy = 2.0 * (sg * vx - kee * vy) - k_e * nv * ny
    pd2 = pdx * pdx + pdy * pdy
    ff = (pdx * ddy - pdy * ddx) / pd2
    pdn = sqrt(pd2)
    align = k_d * (mx * pdy - my * pdx) / pdn
    return ff + align, e


def track_circle(x, y, psi, speed, cx, cy, r, k_e, k_d, ccw, u_max, dt,
                 n_steps, euler, out):
    """Advance one vehicle ``n_steps`` physics ticks around a fixed circle.

    Row ``k`` of ``out`` receives ``(x, y, psi, u_psi, e)`` at the start
    of step ``k``. Returns the final ``(x, y, psi)``.
    """
    step = euler_step if euler else rk4_step
    for k in range(n_steps):
        u, e = circle_command(x, y, psi, speed, cx, cy, r, k_e, k_d, ccw)
        if u > u_max:
            u = u_max
        elif u < -u_max:
            u = -u_max
        out[k, 0] = x
        out[k, 1] = y
        out[k, 2] = psi
        out[k, 3] = u
        out[k, 4] = e
        x, y, psi = step(x, y, psi, speed, u, dt)
    return x, y, psi
