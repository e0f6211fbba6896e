"""Telemetry log container, CSV round-trip, SVG plot and sync metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

import numpy as np

CSV_COLUMNS = (
    "time_ms", "id", "x_m", "y_m", "psi_rad", "theta_rad", "u_r", "radius_eff_m",
    "n_live_neighbors", "e_m2", "u_psi_radps", "bank_rad",
)


def wrap_array(a: np.ndarray) -> np.ndarray:
    """Elementwise wrap into (-pi, pi]."""
    w = np.remainder(np.asarray(a, dtype=float) + math.pi, 2 * math.pi) - math.pi
    return np.where(w <= -math.pi, math.pi, w)


def phases(x: np.ndarray, y: np.ndarray, center=(0.0, 0.0)) -> np.ndarray:
    th = np.arctan2(y - center[1], x - center[0])
    return np.where(th == -math.pi, math.pi, th)


@dataclass(frozen=True)
class ControlRecord:
    time_ms: int
    id: int
    theta_used: float | None
    u_r: float
    radius: float
    live: tuple[int, ...]
    transmitted: bool


@dataclass
class TelemetryLog:
    """Frames of a run. Per-vehicle arrays have shape (frames, vehicles)
    with columns in ``ids`` order; ``z`` has one column per edge."""

    time_ms: np.ndarray
    ids: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    center: tuple[float, float]
    base_radius: float
    speed: np.ndarray
    x: np.ndarray
    y: np.ndarray
    psi: np.ndarray
    e: np.ndarray
    u_psi: np.ndarray
    bank: np.ndarray
    u_r: np.ndarray
    radius_eff: np.ndarray
    n_live: np.ndarray
    control_log: list[ControlRecord] = field(default_factory=list)
    trace: list = field(default_factory=list)
    net_stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.theta = phases(self.x, self.y, self.center)
        col = {v: i for i, v in enumerate(self.ids)}
        if self.edges:
            tails = [col[a] for a, _ in self.edges]
            heads = [col[b] for _, b in self.edges]
            self.z = wrap_array(self.theta[:, tails] - self.theta[:, heads])
        else:
            self.z = np.zeros((len(self.time_ms), 0))

    @property
    def time_s(self) -> np.ndarray:
        return self.time_ms / 1000.0

    def max_abs_z(self) -> np.ndarray:
        if self.z.shape[1] == 0:
            return np.zeros(len(self.time_ms))
        return np.abs(self.z).max(axis=1)

    def column(self, vid: int) -> int:
        return self.ids.index(vid)

    def write_csv(self, fh: TextIO) -> None:
        edges = ",".join(f"{a}-{b}" for a, b in self.edges)
        fh.write(f"# edges={edges}\n")
        fh.write(f"# center_m={float(self.center[0])!r},{float(self.center[1])!r} "
                 f"radius_m={float(self.base_radius)!r}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        cols = [self.x, self.y, self.psi, self.theta, self.u_r, self.radius_eff,
                self.n_live, self.e, self.u_psi, self.bank]
        # tolist() yields Python floats, whose repr round-trips exactly
        per_vehicle = [[a[:, c].tolist() for a in cols] for c in range(len(self.ids))]
        for f, t in enumerate(self.time_ms.tolist()):
            for c, vid in enumerate(self.ids):
                x, y, psi, th, ur, rad, nl, e, u, bank = (v[f] for v in per_vehicle[c])
                fh.write(
                    f"{t},{vid},{x!r},{y!r},{psi!r},{th!r},{ur!r},{rad!r},"
                    f"{int(nl)},{e!r},{u!r},{bank!r}\n"
                )

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)

    @classmethod
    def read_csv(cls, path: str | Path) -> TelemetryLog:
        edges: tuple = ()
        center = (0.0, 0.0)
        radius = float("nan")
        rows = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    body = line[1:].strip()
                    if body.startswith("edges="):
                        spec = body[len("edges="):]
                        edges = tuple(
                            tuple(int(v) for v in pair.split("-")) for pair in spec.split(",") if pair
                        )
                    elif body.startswith("center_m="):
                        c_part, r_part = body.split()
                        cx, cy = c_part[len("center_m="):].split(",")
                        center = (float(cx), float(cy))
                        radius = float(r_part[len("radius_m="):])
                    continue
                if line.startswith("time_ms"):
                    continue
                rows.append(line.split(","))
        if not rows:
            raise ValueError(f"{path}: no telemetry rows")
        ids = tuple(sorted({int(r[1]) for r in rows}))
        times = sorted({int(r[0]) for r in rows})
        ti = {t: i for i, t in enumerate(times)}
        ci = {v: i for i, v in enumerate(ids)}
        shape = (len(times), len(ids))
        arr = {k: np.full(shape, np.nan) for k in CSV_COLUMNS[2:]}
        for r in rows:
            f, c = ti[int(r[0])], ci[int(r[1])]
            for k, val in zip(CSV_COLUMNS[2:], r[2:]):
                arr[k][f, c] = float(val)
        speed = np.full(len(ids), np.nan)
        return cls(
            time_ms=np.array(times, dtype=np.int64), ids=ids, edges=edges, center=center,
            base_radius=radius, speed=speed, x=arr["x_m"], y=arr["y_m"], psi=arr["psi_rad"],
            e=arr["e_m2"], u_psi=arr["u_psi_radps"], bank=arr["bank_rad"], u_r=arr["u_r"],
            radius_eff=arr["radius_eff_m"], n_live=arr["n_live_neighbors"].astype(int),
        )


def sync_time(log: TelemetryLog, threshold: float) -> float | None:
    """First time (s) after which every ``|z_k|`` stays below ``threshold``.

    ``None`` if the last frame is still at or above the threshold.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    bad = np.flatnonzero(log.max_abs_z() >= threshold)
    if bad.size == 0:
        return float(log.time_s[0])
    last = bad[-1]
    if last == len(log.time_ms) - 1:
        return None
    return float(log.time_s[last + 1])


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")


def write_svg(log: TelemetryLog, fh: TextIO, size: int = 600, max_points: int = 4000) -> None:
    """Trajectories plus the base circle and each vehicle's final
    effective circle."""
    xs = np.concatenate([log.x.ravel(), [log.center[0] - log.base_radius, log.center[0] + log.base_radius]])
    ys = np.concatenate([log.y.ravel(), [log.center[1] - log.base_radius, log.center[1] + log.base_radius]])
    finite = np.isfinite(xs) & np.isfinite(ys)
    lo_x, hi_x = xs[finite].min(), xs[finite].max()
    lo_y, hi_y = ys[finite].min(), ys[finite].max()
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9) * 1.1
    mx, my = 0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)
    scale = size / span

    def px(x, y):
        return (x - mx) * scale + size / 2, size / 2 - (y - my) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    cx, cy = px(*log.center)
    out.append(
        f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{log.base_radius * scale:.2f}" '
        'fill="none" stroke="black" stroke-width="1.5" class="base-circle"/>'
    )
    stride = max(1, len(log.time_ms) // max_points)
    for c, vid in enumerate(log.ids):
        color = _COLORS[c % len(_COLORS)]
        r_eff = log.radius_eff[-1, c]
        out.append(
            f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r_eff * scale:.2f}" fill="none" '
            f'stroke="{color}" stroke-dasharray="4 3" class="effective-circle" data-id="{vid}"/>'
        )
        pts = " ".join(
            "{:.2f},{:.2f}".format(*px(x, y))
            for x, y in zip(log.x[::stride, c], log.y[::stride, c])
        )
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1" '
            f'class="trajectory" data-id="{vid}"/>'
        )
    out.append("</svg>")
    fh.write("\n".join(out) + "\n")


def tail_fit(t: np.ndarray, e: np.ndarray, radius: float, upper: float = 0.05,
             floor: float = 1e-6) -> tuple[float, float, int]:
    """Log-linear fit of ``|e(t)|`` over the convergence tail.

    The tail starts after the last sample with ``|e| >= upper * r^2`` and
    ends at the first sample below ``floor * r^2``, where round-off takes
    over. Returns ``(r_squared, rate_per_s, n_samples)``; a negative rate
    means decay.
    """
    a = np.abs(np.asarray(e, dtype=float))
    t = np.asarray(t, dtype=float)
    r2 = radius * radius
    high = np.flatnonzero(a >= upper * r2)
    start = int(high[-1]) + 1 if high.size else 0
    low = np.flatnonzero(a[start:] < floor * r2)
    end = start + int(low[0]) if low.size else len(a)
    n = end - start
    if n < 3:
        return float("nan"), float("nan"), n
    tt, yy = t[start:end], np.log(a[start:end])
    slope, icpt = np.polyfit(tt, yy, 1)
    resid = yy - (slope * tt + icpt)
    ss_tot = float(((yy - yy.mean()) ** 2).sum())
    return 1.0 - float((resid**2).sum()) / ss_tot, float(slope), n
