"""Neighbor graphs, orbital phases and radius-modulating consensus.

Each vehicle flies a circle whose radius is shifted by ``u_r``. A vehicle
ahead of its neighbors (in the direction of circulation) gets a bigger
circle and therefore a smaller angular speed, so the laggards catch up.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal, Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from gvf_formation.errors import MissingPhaseError, UndefinedPhaseError
from gvf_formation.gvf import ImplicitCurve, Sense
from gvf_formation.kernels import wrap_angle

Convention = Literal["radius_shift", "level_shift"]

R_MIN_FACTOR = 0.2
R_MAX_FACTOR = 5.0


class CyclicGraphWarning(UserWarning):
    """Graph contains a cycle; the rendezvous guarantee needs a tree."""


@dataclass(frozen=True)
class FormationGraph:
    """Undirected neighbor graph with an orientation fixed by edge order.

    ``vertices`` are 8-bit vehicle IDs. Each edge is ``(tail, head)``.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __init__(self, vertices: Sequence[int], edges: Sequence[Sequence[int]]):
        verts = tuple(int(v) for v in vertices)
        eds = tuple((int(a), int(b)) for a, b in edges)
        for v in verts:
            if not 0 <= v <= 255:
                raise ValueError(f"vehicle id {v} does not fit in uint8")
        if len(set(verts)) != len(verts):
            raise ValueError(f"duplicate vehicle ids in {verts}")
        seen = set()
        for a, b in eds:
            if a == b:
                raise ValueError(f"self-loop on {a}")
            if a not in verts or b not in verts:
                raise ValueError(f"edge ({a}, {b}) references unknown vertex")
            key = frozenset((a, b))
            if key in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            seen.add(key)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", eds)
        if not self.is_acyclic():
            warnings.warn(
                f"formation graph {eds} has a cycle; convergence is not guaranteed",
                CyclicGraphWarning,
                stacklevel=2,
            )

    def neighbors(self, i: int) -> tuple[int, ...]:
        out = []
        for a, b in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return tuple(out)

    def is_acyclic(self) -> bool:
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
        return True


@dataclass(frozen=True)
class ConsensusParams:
    """Consensus gain and how ``u_r`` enters the circle.

    ``radius_shift``: radius becomes ``r + u_r`` (k_r in m/rad).
    ``level_shift``: squared radius becomes ``r^2 + u_r`` (k_r in m^2/rad).
    """

    k_r: float
    convention: Convention = "radius_shift"

    def __post_init__(self) -> None:
        if not self.k_r > 0:
            raise ValueError(f"k_r must be positive, got {self.k_r}")
        if self.convention not in ("radius_shift", "level_shift"):
            raise ValueError(f"unknown convention {self.convention!r}")


def phase(p: ArrayLike, center: ArrayLike = (0.0, 0.0)) -> float:
    """Polar angle of ``p`` about ``center`` in (-pi, pi]."""
    dx = float(p[0]) - float(center[0])
    dy = float(p[1]) - float(center[1])
    if dx == 0.0 and dy == 0.0:
        raise UndefinedPhaseError("phase is undefined at the circle center")
    th = math.atan2(dy, dx)
    # atan2(-0.0, x<0) gives -pi
    return math.pi if th == -math.pi else th


def incidence_matrix(g: FormationGraph) -> NDArray:
    """|V| x |E| matrix with +1 at each edge's tail and -1 at its head."""
    idx = {v: i for i, v in enumerate(g.vertices)}
    B = np.zeros((len(g.vertices), len(g.edges)), dtype=int)
    for k, (tail, head) in enumerate(g.edges):
        B[idx[tail], k] = 1
        B[idx[head], k] = -1
    return B


def phase_errors(g: FormationGraph, thetas: Mapping[int, float]) -> NDArray:
    """Wrapped inter-vehicle phases ``theta_tail - theta_head`` per edge."""
    missing = [v for v in g.vertices if v not in thetas]
    if missing:
        raise MissingPhaseError(f"no phase for vehicles {missing}")
    return np.array([wrap_angle(thetas[a] - thetas[b]) for a, b in g.edges], dtype=float)


def circulation_sign(sense: Sense) -> float:
    """+1 when phases grow along the direction of travel."""
    return 1.0 if sense == "counterclockwise" else -1.0


def consensus_input(g: FormationGraph, i: int, thetas_known: Mapping[int, float],
                    params: ConsensusParams,
                    rotation_sense: Sense = "counterclockwise") -> float:
    """Radius modulation for vehicle ``i`` from the phases it knows.

    Neighbors missing from ``thetas_known`` contribute nothing. Phase
    differences are wrapped, and the sum is signed so that a vehicle ahead
    in the direction of travel gets a positive ``u_r``.
    """
    th_i = thetas_known[i]
    acc = 0.0
    for j in g.neighbors(i):
        if j in thetas_known:
            acc += wrap_angle(th_i - thetas_known[j])
    return circulation_sign(rotation_sense) * params.k_r * acc


def modulated_radius(r: float, u_r: float, params: ConsensusParams,
                     r_min_factor: float = R_MIN_FACTOR,
                     r_max_factor: float = R_MAX_FACTOR) -> float:
    lo, hi = r_min_factor * r, r_max_factor * r
    if params.convention == "radius_shift":
        return min(hi, max(lo, r + u_r))
    return math.sqrt(min(hi * hi, max(lo * lo, r * r + u_r)))


def modulated_curve(base: ImplicitCurve, u_r: float, params: ConsensusParams,
                    r_min_factor: float = R_MIN_FACTOR,
                    r_max_factor: float = R_MAX_FACTOR) -> ImplicitCurve:
    """Circle ``base`` with its radius shifted by ``u_r``, clamped to
    ``[r_min_factor * r, r_max_factor * r]``."""
    if base.kind != "circle":
        raise ValueError("radius modulation applies to circles only")
    if u_r == 0.0:
        return base
    return base.with_radius(
        modulated_radius(base.radius, u_r, params, r_min_factor, r_max_factor)
    )
