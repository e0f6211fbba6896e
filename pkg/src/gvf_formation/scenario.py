"""Scenario description and its TOML file format.

Keys carry their units (``radius_m``, ``speed_mps``, ``start_s``). A
minimal file::

    duration_s = 120.0

    [circle]
    radius_m = 30.0

    [gains]
    k_e = 0.0008
    k_d = 2.0
    k_r = 10.0

    [graph]
    edges = [[1, 2], [2, 3]]

    [[vehicles]]
    id = 1
    x_m = -80.0
    y_m = 40.0
    psi_rad = 0.0
    speed_mps = 11.0
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from gvf_formation.errors import ScenarioError
from gvf_formation.netsim import LinkModel

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class VehicleSpec:
    id: int
    x: float
    y: float
    psi: float
    speed: float
    control_offset_ms: int = 0


@dataclass(frozen=True)
class GpsOutage:
    id: int
    start_s: float
    end_s: float = math.inf


@dataclass(frozen=True)
class LinkCut:
    src: int
    dst: int
    start_s: float
    end_s: float = math.inf


@dataclass(frozen=True)
class Scenario:
    vehicles: tuple[VehicleSpec, ...]
    edges: tuple[tuple[int, int], ...]
    radius: float
    k_e: float
    k_d: float
    k_r: float
    center: tuple[float, float] = (0.0, 0.0)
    link: LinkModel = field(default_factory=LinkModel)
    duration_s: float = 120.0
    physics_dt_s: float = 0.02
    convention: str = "radius_shift"
    rotation_sense: str = "counterclockwise"
    control_period_ms: int = 500
    staleness_timeout_ms: int = 2000
    max_bank_deg: float = 45.0
    gravity: float = 9.81
    integrator: str = "rk4"
    decimation: int = 1
    r_min_factor: float = 0.2
    r_max_factor: float = 5.0
    predict_phases: bool = True
    gps_outages: tuple[GpsOutage, ...] = ()
    link_cuts: tuple[LinkCut, ...] = ()

    def __post_init__(self) -> None:
        self.validate()

    @property
    def dt_ms(self) -> int:
        return round(self.physics_dt_s * 1000)

    @property
    def n_ticks(self) -> int:
        return round(self.duration_s * 1000) // self.dt_ms

    def with_seed(self, seed: int) -> Scenario:
        return replace(self, link=replace(self.link, seed=seed))

    def validate(self) -> None:
        ids = [v.id for v in self.vehicles]
        if not ids:
            raise ScenarioError("scenario has no vehicles")
        if len(set(ids)) != len(ids):
            raise ScenarioError(f"duplicate vehicle ids: {ids}")
        for v in self.vehicles:
            if not 0 <= v.id <= 255:
                raise ScenarioError(f"vehicle id {v.id} does not fit in uint8")
            if not v.speed > 0:
                raise ScenarioError(f"vehicle {v.id}: speed must be positive")
            if v.x == self.center[0] and v.y == self.center[1]:
                raise ScenarioError(f"vehicle {v.id} starts at the circle center")
            if v.control_offset_ms < 0:
                raise ScenarioError(f"vehicle {v.id}: negative control offset")
        seen = set()
        for a, b in self.edges:
            if a not in ids or b not in ids:
                raise ScenarioError(f"edge ({a}, {b}) references unknown vehicle")
            if a == b or frozenset((a, b)) in seen:
                raise ScenarioError(f"edge ({a}, {b}) is a self-loop or duplicate")
            seen.add(frozenset((a, b)))
        for name in ("k_e", "k_d", "k_r", "radius", "duration_s", "physics_dt_s",
                     "max_bank_deg", "gravity"):
            if not getattr(self, name) > 0:
                raise ScenarioError(f"{name} must be positive")
        if self.max_bank_deg >= 90:
            raise ScenarioError("max_bank_deg must be below 90")
        dt_ms = self.dt_ms
        if dt_ms < 1 or abs(self.physics_dt_s * 1000 - dt_ms) > 1e-9:
            raise ScenarioError("physics_dt_s must be a whole number of milliseconds")
        if self.control_period_ms <= 0 or self.staleness_timeout_ms <= 0:
            raise ScenarioError("control period and staleness timeout must be positive")
        if self.control_period_ms % dt_ms:
            raise ScenarioError("control_period_ms must be a multiple of the physics step")
        for v in self.vehicles:
            if v.control_offset_ms % dt_ms:
                raise ScenarioError(f"vehicle {v.id}: control offset not on a physics tick")
        if self.convention not in ("radius_shift", "level_shift"):
            raise ScenarioError(f"unknown convention {self.convention!r}")
        if self.rotation_sense not in ("clockwise", "counterclockwise"):
            raise ScenarioError(f"unknown rotation sense {self.rotation_sense!r}")
        if self.integrator not in ("rk4", "euler"):
            raise ScenarioError(f"unknown integrator {self.integrator!r}")
        if self.decimation < 1:
            raise ScenarioError("decimation must be at least 1")
        if not 0 < self.r_min_factor <= 1 <= self.r_max_factor:
            raise ScenarioError("radius clamp must satisfy 0 < r_min_factor <= 1 <= r_max_factor")
        for o in self.gps_outages:
            if o.id not in ids:
                raise ScenarioError(f"gps outage for unknown vehicle {o.id}")
        for c in self.link_cuts:
            if c.src not in ids or c.dst not in ids:
                raise ScenarioError(f"link cut ({c.src}, {c.dst}) references unknown vehicle")


def _get(d: dict, key: str, cast, default: Any = ...):
    if key not in d:
        if default is ...:
            raise ScenarioError(f"missing key {key!r}")
        return default
    try:
        return cast(d[key])
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad value for {key!r}: {d[key]!r}") from exc


def scenario_from_dict(d: dict) -> Scenario:
    try:
        circle = d.get("circle", {})
        gains = d.get("gains", {})
        link = d.get("link", {})
        vehicles = tuple(
            VehicleSpec(
                id=_get(v, "id", int),
                x=_get(v, "x_m", float),
                y=_get(v, "y_m", float),
                psi=_get(v, "psi_rad", float, 0.0),
                speed=_get(v, "speed_mps", float),
                control_offset_ms=_get(v, "control_offset_ms", int, 0),
            )
            for v in d.get("vehicles", [])
        )
        edges = tuple((int(a), int(b)) for a, b in d.get("graph", {}).get("edges", []))
        try:
            link_model = LinkModel(
                delay_min_ms=_get(link, "delay_min_ms", int, 0),
                delay_max_ms=_get(link, "delay_max_ms", int, _get(link, "delay_min_ms", int, 0)),
                drop_probability=_get(link, "drop_probability", float, 0.0),
                seed=_get(d, "seed", int, 0),
            )
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
        return Scenario(
            vehicles=vehicles,
            edges=edges,
            radius=_get(circle, "radius_m", float),
            center=(_get(circle, "center_x_m", float, 0.0), _get(circle, "center_y_m", float, 0.0)),
            k_e=_get(gains, "k_e", float),
            k_d=_get(gains, "k_d", float),
            k_r=_get(gains, "k_r", float),
            link=link_model,
            duration_s=_get(d, "duration_s", float, 120.0),
            physics_dt_s=_get(d, "physics_dt_s", float, 0.02),
            convention=_get(d, "convention", str, "radius_shift"),
            rotation_sense=_get(d, "rotation_sense", str, "counterclockwise"),
            control_period_ms=_get(d, "control_period_ms", int, 500),
            staleness_timeout_ms=_get(d, "staleness_timeout_ms", int, 2000),
            max_bank_deg=_get(d, "max_bank_deg", float, 45.0),
            gravity=_get(d, "gravity_mps2", float, 9.81),
            integrator=_get(d, "integrator", str, "rk4"),
            decimation=_get(d, "decimation", int, 1),
            r_min_factor=_get(circle, "r_min_factor", float, 0.2),
            r_max_factor=_get(circle, "r_max_factor", float, 5.0),
            predict_phases=_get(d, "predict_phases", bool, True),
            gps_outages=tuple(
                GpsOutage(_get(o, "id", int), _get(o, "start_s", float),
                          _get(o, "end_s", float, math.inf))
                for o in d.get("gps_outages", [])
            ),
            link_cuts=tuple(
                LinkCut(_get(c, "from", int), _get(c, "to", int), _get(c, "start_s", float),
                        _get(c, "end_s", float, math.inf))
                for c in d.get("link_cuts", [])
            ),
        )
    except (AttributeError, TypeError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc


def load_scenario(path: str | Path) -> Scenario:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    return scenario_from_dict(data)
