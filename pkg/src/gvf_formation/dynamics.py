"""Planar unicycle kinematics at constant speed."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from gvf_formation import kernels

wrap_angle = kernels.wrap_angle


@dataclass(frozen=True)
class VehicleState:
    """Position (m), yaw (rad, in (-pi, pi]) and ground speed (m/s)."""

    x: float
    y: float
    psi: float
    speed: float

    def __post_init__(self) -> None:
        if not self.speed > 0:
            raise ValueError(f"speed must be positive, got {self.speed}")
        if not (-math.pi < self.psi <= math.pi):
            object.__setattr__(self, "psi", wrap_angle(self.psi))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def velocity(self) -> np.ndarray:
        return self.speed * np.array([math.cos(self.psi), math.sin(self.psi)])


def step(state: VehicleState, u_psi: float, dt: float,
         method: Literal["rk4", "euler"] = "rk4") -> VehicleState:
    """Advance ``state`` by ``dt`` seconds holding the yaw rate ``u_psi``.

    ``method="euler"`` is the first-order cross-check integrator.

    Raises
    ------
    IntegrationError
        If the command or state is not finite.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if method not in ("rk4", "euler"):
        raise ValueError(f"unknown integrator {method!r}")
    fn = kernels.rk4_step if method == "rk4" else kernels.euler_step
    x, y, psi = fn(state.x, state.y, state.psi, state.speed, float(u_psi), dt)
    return replace(state, x=x, y=y, psi=psi)


def arc_speed(p0, p1, dpsi: float, dt: float) -> float:
    """Speed along the circular arc joining ``p0`` and ``p1``.

    Under a held yaw rate the exact path between ticks is an arc turning by
    ``dpsi``; its length is the chord times ``(dpsi/2) / sin(dpsi/2)``.
    """
    chord = math.dist(p0, p1)
    half = 0.5 * dpsi
    if abs(half) < 1e-12:
        return chord / dt
    return chord * half / math.sin(half) / dt
