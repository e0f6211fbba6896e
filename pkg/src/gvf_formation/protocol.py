"""Per-aircraft agent: neighbor table, periodic consensus, gated transmit.

An agent knows only its own position and whatever phases its neighbors
have sent. Rows older than the staleness timeout are ignored at control
time; the agent sends its own phase only while its GPS fix is good.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gvf_formation.formation import (
    ConsensusParams,
    FormationGraph,
    consensus_input,
    modulated_curve,
    phase,
    R_MAX_FACTOR,
    R_MIN_FACTOR,
)
from gvf_formation.gvf import GvfParams, ImplicitCurve
from gvf_formation.kernels import wrap_angle
from gvf_formation.netsim import PhaseMessage


@dataclass
class NeighborRow:
    theta: float
    last_update: int
    sent_at: int


@dataclass
class NeighborTable:
    """Registered neighbor IDs plus the last phase heard from each.

    Rows exist only for registered neighbors that have been heard from.
    """

    owner: int
    members: set[int] = field(default_factory=set)
    rows: dict[int, NeighborRow] = field(default_factory=dict)

    def age(self, nid: int, now: int) -> int:
        return now - self.rows[nid].last_update

    def live(self, now: int, timeout: int, phase_rate: float | None = None) -> dict[int, float]:
        """Phases of rows whose age is at most ``timeout`` ms.

        With ``phase_rate`` (rad/s) each phase is carried forward from its
        send time to ``now``.
        """
        out = {}
        for nid, row in self.rows.items():
            if now - row.last_update > timeout:
                continue
            th = row.theta
            if phase_rate is not None:
                th = wrap_angle(th + phase_rate * (now - row.sent_at) / 1000.0)
            out[nid] = th
        return out


def register_neighbor(table: NeighborTable, nid: int) -> NeighborTable:
    if nid == table.owner:
        raise ValueError("an aircraft cannot be its own neighbor")
    table.members.add(nid)
    return table


def delete_neighbor(table: NeighborTable, nid: int) -> NeighborTable:
    table.members.discard(nid)
    table.rows.pop(nid, None)
    return table


def on_message(table: NeighborTable, msg: PhaseMessage, now: int) -> NeighborTable:
    """Upsert the sender's row; messages from non-members are ignored."""
    if msg.sender in table.members and msg.sender != table.owner:
        table.rows[msg.sender] = NeighborRow(msg.theta, now, msg.sent_at)
    return table


@dataclass(frozen=True)
class AgentConfig:
    id: int
    consensus: ConsensusParams
    gvf: GvfParams
    base_circle: ImplicitCurve
    control_period: int = 500
    staleness_timeout: int = 2000
    r_min_factor: float = R_MIN_FACTOR
    r_max_factor: float = R_MAX_FACTOR
    # signed nominal orbital rate used to age-compensate neighbor phases;
    # None uses received phases as-is
    phase_rate: float | None = None

    def __post_init__(self) -> None:
        if self.control_period <= 0:
            raise ValueError("control_period must be positive")
        if self.staleness_timeout <= 0:
            raise ValueError("staleness_timeout must be positive")
        if self.base_circle.kind != "circle":
            raise ValueError("formation control needs a circular base path")


@dataclass(frozen=True)
class GpsStatus:
    reliable: bool = True


@dataclass(frozen=True)
class ControlOutput:
    circle: ImplicitCurve
    u_r: float
    n_live: int
    message: PhaseMessage | None


def control_step(cfg: AgentConfig, table: NeighborTable, own_phase: float | None,
                 gps: GpsStatus, now: int) -> ControlOutput:
    """One periodic control tick.

    ``own_phase`` may be ``None`` when the agent has never had a good fix;
    it then tracks the base circle and stays silent.
    """
    live = table.live(now, cfg.staleness_timeout, cfg.phase_rate)
    if own_phase is None:
        return ControlOutput(cfg.base_circle, 0.0, len(live), None)
    # the table holds only this agent's neighbors, so a star graph is exact
    g = FormationGraph([cfg.id, *live], [(cfg.id, j) for j in live])
    known = dict(live)
    known[cfg.id] = own_phase
    u_r = consensus_input(g, cfg.id, known, cfg.consensus, cfg.gvf.rotation_sense)
    circle = modulated_curve(cfg.base_circle, u_r, cfg.consensus,
                             cfg.r_min_factor, cfg.r_max_factor)
    msg = PhaseMessage(cfg.id, own_phase, now) if gps.reliable else None
    return ControlOutput(circle, u_r, len(live), msg)


class Agent:
    """Sequential state machine for one aircraft.

    The agent computes its phase from its own position only when the GPS
    fix is good; otherwise it keeps using the last good phase.
    """

    def __init__(self, cfg: AgentConfig, neighbors=()):
        self.cfg = cfg
        self.table = NeighborTable(cfg.id)
        for nid in neighbors:
            register_neighbor(self.table, nid)
        self.last_phase: float | None = None
        self.output = ControlOutput(cfg.base_circle, 0.0, 0, None)

    @property
    def neighbors(self) -> tuple[int, ...]:
        return tuple(sorted(self.table.members))

    def receive(self, msg: PhaseMessage, now: int) -> None:
        on_message(self.table, msg, now)

    def tick(self, position, gps: GpsStatus, now: int) -> ControlOutput:
        if gps.reliable:
            self.last_phase = phase(position, self.cfg.base_circle.center)
        self.output = control_step(self.cfg, self.table, self.last_phase, gps, now)
        return self.output
