"""Implicit curves and the guidance vector field built on them.

A path is the zero level set of a C2 function ``phi``. The field at a
point combines the tangent ``E n`` with a pull ``-k_e e n`` toward the
path, and the yaw-rate law steers a constant-speed unicycle onto the
field direction.

This module is curve-generic and numpy based. The simulator's inner loop
uses the circle-only kernels in ``kernels``; tests hold the two to each
other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from gvf_formation.errors import SingularPointError

Sense = Literal["clockwise", "counterclockwise"]

SINGULAR_TOL = 1e-9
GRAVITY = 9.81
DEFAULT_MAX_BANK = math.radians(45.0)

# rotation taking the normal to the tangent
_E_CW = np.array([[0.0, 1.0], [-1.0, 0.0]])
_E_CCW = _E_CW.T.copy()


@dataclass(frozen=True)
class ImplicitCurve:
    """Circle or ellipse described as a level set.

    Use :meth:`circle` or :meth:`ellipse` rather than the raw constructor.

    For a circle ``phi(p) = |p - c|^2 - r^2`` (units m^2). For an ellipse
    ``phi(p) = (x'/a)^2 + (y'/b)^2 - 1`` where ``(x', y')`` are the
    coordinates of ``p - c`` in the frame rotated by ``angle``.
    """

    kind: Literal["circle", "ellipse"]
    center: tuple[float, float]
    radius: float = 0.0
    a: float = 0.0
    b: float = 0.0
    angle: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "circle":
            if not self.radius > 0:
                raise ValueError(f"circle radius must be positive, got {self.radius}")
        elif self.kind == "ellipse":
            if not (self.a > 0 and self.b > 0):
                raise ValueError(f"ellipse semi-axes must be positive, got {self.a}, {self.b}")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @classmethod
    def circle(cls, center: ArrayLike, radius: float) -> ImplicitCurve:
        cx, cy = (float(v) for v in np.asarray(center, dtype=float))
        return cls("circle", (cx, cy), radius=float(radius))

    @classmethod
    def ellipse(cls, center: ArrayLike, a: float, b: float, angle: float = 0.0) -> ImplicitCurve:
        cx, cy = (float(v) for v in np.asarray(center, dtype=float))
        return cls("ellipse", (cx, cy), a=float(a), b=float(b), angle=float(angle))

    def with_radius(self, radius: float) -> ImplicitCurve:
        if self.kind != "circle":
            raise ValueError("only circles carry a radius")
        return ImplicitCurve("circle", self.center, radius=float(radius))

    def _local(self, p: ArrayLike) -> tuple[NDArray, NDArray]:
        c, s = math.cos(self.angle), math.sin(self.angle)
        rot = np.array([[c, -s], [s, c]])
        d = np.asarray(p, dtype=float) - np.asarray(self.center)
        return rot, rot.T @ d


@dataclass(frozen=True)
class GvfParams:
    """Gains and circulation direction of the guidance field.

    ``k_e`` scales the pull toward the path (units 1/[phi]); ``k_d`` is
    the heading-alignment gain in 1/s.
    """

    k_e: float
    k_d: float
    rotation_sense: Sense = "counterclockwise"

    def __post_init__(self) -> None:
        if not self.k_e > 0:
            raise ValueError(f"k_e must be positive, got {self.k_e}")
        if not self.k_d > 0:
            raise ValueError(f"k_d must be positive, got {self.k_d}")
        if self.rotation_sense not in ("clockwise", "counterclockwise"):
            raise ValueError(f"unknown rotation sense {self.rotation_sense!r}")


@dataclass(frozen=True)
class FieldSample:
    error: float
    normal: NDArray
    tangent: NDArray
    desired_direction: NDArray


def rotation(sense: Sense) -> NDArray:
    """Matrix E mapping the normal onto the tangent for the given sense."""
    return (_E_CW if sense == "clockwise" else _E_CCW).copy()


def _cross(a: NDArray, b: NDArray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def level_error(curve: ImplicitCurve, p: ArrayLike) -> float:
    """Value of the level function at ``p``; zero on the path."""
    if curve.kind == "circle":
        d = np.asarray(p, dtype=float) - np.asarray(curve.center)
        return float(d @ d - curve.radius**2)
    _, q = curve._local(p)
    return float((q[0] / curve.a) ** 2 + (q[1] / curve.b) ** 2 - 1.0)


def gradient(curve: ImplicitCurve, p: ArrayLike) -> NDArray:
    """Analytic gradient of the level function (the field normal)."""
    if curve.kind == "circle":
        return 2.0 * (np.asarray(p, dtype=float) - np.asarray(curve.center))
    rot, q = curve._local(p)
    return rot @ np.array([2.0 * q[0] / curve.a**2, 2.0 * q[1] / curve.b**2])


def hessian(curve: ImplicitCurve, p: ArrayLike) -> NDArray:
    """Analytic Hessian of the level function; ``p`` only matters for
    curves whose Hessian varies, which neither supported kind does."""
    if curve.kind == "circle":
        return 2.0 * np.eye(2)
    rot, _ = curve._local(p)
    return rot @ np.diag([2.0 / curve.a**2, 2.0 / curve.b**2]) @ rot.T


def _field(curve: ImplicitCurve, params: GvfParams, p: ArrayLike):
    n = gradient(curve, p)
    if math.hypot(n[0], n[1]) < SINGULAR_TOL:
        raise SingularPointError(f"gradient vanishes at {np.asarray(p).tolist()}")
    e = level_error(curve, p)
    E = rotation(params.rotation_sense)
    tau = E @ n
    return e, n, tau, tau - params.k_e * e * n


def build_field(curve: ImplicitCurve, params: GvfParams, p: ArrayLike) -> FieldSample:
    """Sample the guidance field at ``p``.

    Raises
    ------
    SingularPointError
        If the gradient norm is below ``SINGULAR_TOL``.
    """
    e, n, tau, pd = _field(curve, params, p)
    return FieldSample(e, n, tau, pd / np.linalg.norm(pd))


def field_turn_rate(curve: ImplicitCurve, params: GvfParams, p: ArrayLike,
                    velocity: ArrayLike) -> float:
    """Rate at which the field direction rotates when moving with
    ``velocity`` through ``p`` (rad/s, counterclockwise positive).

    This is the feedforward part of the yaw-rate law. The derivative of
    the raw field along ``v`` is ``(E - k_e e I) H v - k_e (n.v) n``.
    """
    e, n, _, pd = _field(curve, params, p)
    v = np.asarray(velocity, dtype=float)
    E = rotation(params.rotation_sense)
    H = hessian(curve, p)
    dpd = (E - params.k_e * e * np.eye(2)) @ H @ v - params.k_e * (n @ v) * n
    return _cross(pd, dpd) / float(pd @ pd)


def yaw_rate_command(curve: ImplicitCurve, params: GvfParams, state) -> float:
    """Yaw-rate command ``u_psi`` for a vehicle in ``state``.

    Feedforward term plus ``k_d`` times the sine of the angle from the
    current heading to the field direction. ``state`` needs ``x``, ``y``,
    ``psi`` and ``speed`` attributes. The result is not saturated; see
    :func:`saturate_yaw_rate`.
    """
    p = (state.x, state.y)
    heading = np.array([math.cos(state.psi), math.sin(state.psi)])
    ff = field_turn_rate(curve, params, p, state.speed * heading)
    _, _, _, pd = _field(curve, params, p)
    align = params.k_d * _cross(heading, pd / np.linalg.norm(pd))
    return ff + align


def max_yaw_rate(speed: float, g: float = GRAVITY, max_bank: float = DEFAULT_MAX_BANK) -> float:
    return g * math.tan(max_bank) / speed


def saturate_yaw_rate(u_psi: float, speed: float, g: float = GRAVITY,
                      max_bank: float = DEFAULT_MAX_BANK) -> float:
    lim = max_yaw_rate(speed, g, max_bank)
    return min(lim, max(-lim, u_psi))


def bank_angle(u_psi: float, speed: float = 1.0, g: float = GRAVITY) -> float:
    """Coordinated-turn bank angle for yaw rate ``u_psi`` at ``speed``."""
    if not g > 0:
        raise ValueError("g must be positive")
    return math.atan(u_psi * speed / g)
