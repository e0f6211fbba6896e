"""Seeded air-to-air message transport with delay and loss.

Time is integer milliseconds. A broadcast is a fan-out of unicasts, each
with its own drop draw and delay draw from a single seeded stream, so the
trace is a pure function of the seed and the order of ``send`` calls.
"""

from __future__ import annotations

import heapq
import io
import random
from dataclasses import dataclass
from typing import Iterable, NamedTuple, TextIO

from gvf_formation.errors import UnknownNodeError


@dataclass(frozen=True)
class PhaseMessage:
    sender: int
    theta: float
    sent_at: int


@dataclass(frozen=True)
class LinkModel:
    """Per-message delay in ``[delay_min_ms, delay_max_ms]`` (uniform,
    integer ms) and independent drop probability."""

    delay_min_ms: int = 0
    delay_max_ms: int = 0
    drop_probability: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.delay_min_ms < 0 or self.delay_max_ms < self.delay_min_ms:
            raise ValueError(f"bad delay range [{self.delay_min_ms}, {self.delay_max_ms}]")
        if not 0.0 <= self.drop_probability <= 1.0:
            raise ValueError(f"drop probability {self.drop_probability} outside [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


class TraceEvent(NamedTuple):
    time_ms: int
    event: str
    src: int
    dst: int
    theta: float

    def to_line(self) -> str:
        return f"{self.time_ms},{self.event},{self.src},{self.dst},{self.theta:.9g}"


class Scheduled(NamedTuple):
    deliver_at: int
    seq: int
    dst: int
    msg: PhaseMessage


class Network:
    """Delivery queue shared by all vehicles of one simulation."""

    def __init__(self, link: LinkModel, nodes: Iterable[int] = (), trace: bool = True):
        self.link = link
        self._rng = random.Random(link.seed)
        self._nodes: set[int] = set(nodes)
        self._queue: list[Scheduled] = []
        self._seq = 0
        self._down: set[tuple[int, int]] = set()
        self.keep_trace = trace
        self.trace: list[TraceEvent] = []
        self.sent = 0
        self.dropped = 0
        self.delivered = 0

    def register(self, node: int) -> None:
        self._nodes.add(node)

    def set_link(self, src: int, dst: int, up: bool) -> None:
        """Force the directed link ``src -> dst`` down (every message
        dropped) or back up."""
        if up:
            self._down.discard((src, dst))
        else:
            self._down.add((src, dst))

    def _log(self, *ev) -> None:
        if self.keep_trace:
            self.trace.append(TraceEvent(*ev))

    def send(self, msg: PhaseMessage, src: int, dst: int, now: int) -> Scheduled | None:
        """Queue ``msg`` for ``dst``; returns the queue entry or ``None``
        when the message is dropped."""
        for node in (src, dst):
            if node not in self._nodes:
                raise UnknownNodeError(node)
        self.sent += 1
        self._log(now, "SEND", src, dst, msg.theta)
        lossy = self._rng.random() < self.link.drop_probability
        if self.link.delay_max_ms > self.link.delay_min_ms:
            delay = self._rng.randint(self.link.delay_min_ms, self.link.delay_max_ms)
        else:
            delay = self.link.delay_min_ms
        if lossy or (src, dst) in self._down:
            self.dropped += 1
            self._log(now, "DROP", src, dst, msg.theta)
            return None
        entry = Scheduled(now + delay, self._seq, dst, msg)
        self._seq += 1
        heapq.heappush(self._queue, entry)
        return entry

    def next_due(self) -> int | None:
        return self._queue[0].deliver_at if self._queue else None

    def deliver_entries(self, now: int) -> list[Scheduled]:
        """Pop every entry due at or before ``now`` in (time, send order)."""
        out = []
        while self._queue and self._queue[0].deliver_at <= now:
            entry = heapq.heappop(self._queue)
            self.delivered += 1
            self._log(entry.deliver_at, "DELIVER", entry.msg.sender, entry.dst, entry.msg.theta)
            out.append(entry)
        return out

    def deliver_due(self, now: int) -> list[tuple[int, PhaseMessage]]:
        return [(e.dst, e.msg) for e in self.deliver_entries(now)]

    @property
    def in_flight(self) -> int:
        return len(self._queue)

    def write_trace(self, fh: TextIO) -> None:
        fh.write("time_ms,event,from,to,theta_rad\n")
        for ev in self.trace:
            fh.write(ev.to_line() + "\n")

    def trace_text(self) -> str:
        buf = io.StringIO()
        self.write_trace(buf)
        return buf.getvalue()
