"""Discrete-event scenario engine.

Per physics tick the order is fixed: deliver due messages, run the agents
whose control tick is due (in ID order) and send their phases, then step
every vehicle with its current circle. Between control ticks the circles
cannot change, so physics runs in batches through ``kernels.track_circle``;
deliveries are stamped with the tick a tick-by-tick loop would have used.
"""

from __future__ import annotations

import math

import numpy as np

from gvf_formation import kernels
from gvf_formation.formation import ConsensusParams, FormationGraph, circulation_sign
from gvf_formation.gvf import GvfParams, ImplicitCurve, max_yaw_rate
from gvf_formation.netsim import Network
from gvf_formation.protocol import Agent, AgentConfig, GpsStatus
from gvf_formation.scenario import Scenario
from gvf_formation.telemetry import ControlRecord, TelemetryLog


def _active(start_s: float, end_s: float, now_ms: int) -> bool:
    return start_s * 1000.0 <= now_ms < end_s * 1000.0


def run(scenario: Scenario, keep_trace: bool = True) -> TelemetryLog:
    """Simulate ``scenario`` and return the full telemetry log.

    The result depends only on the scenario (seed included).
    """
    sc = scenario
    specs = {v.id: v for v in sc.vehicles}
    ids = tuple(sorted(specs))
    graph = FormationGraph(ids, sc.edges)
    base = ImplicitCurve.circle(sc.center, sc.radius)
    gvf = GvfParams(sc.k_e, sc.k_d, sc.rotation_sense)
    cons = ConsensusParams(sc.k_r, sc.convention)
    ccw = sc.rotation_sense == "counterclockwise"
    euler = sc.integrator == "euler"
    net = Network(sc.link, ids, trace=keep_trace)
    sign = circulation_sign(sc.rotation_sense)
    agents = {
        i: Agent(
            AgentConfig(i, cons, gvf, base, sc.control_period_ms, sc.staleness_timeout_ms,
                        sc.r_min_factor, sc.r_max_factor,
                        sign * specs[i].speed / sc.radius if sc.predict_phases else None),
            graph.neighbors(i),
        )
        for i in ids
    }

    dt_ms = sc.dt_ms
    dt = dt_ms / 1000.0
    n = sc.n_ticks
    nv = len(ids)
    max_bank = math.radians(sc.max_bank_deg)
    u_max = [max_yaw_rate(specs[i].speed, sc.gravity, max_bank) for i in ids]

    bufs = [np.empty((n + 1, 5)) for _ in ids]
    u_r = np.zeros((n + 1, nv))
    radius = np.full((n + 1, nv), sc.radius)
    n_live = np.zeros((n + 1, nv), dtype=np.int64)
    state = [[specs[i].x, specs[i].y, kernels.wrap_angle(specs[i].psi)] for i in ids]
    next_ctrl = [specs[i].control_offset_ms for i in ids]
    control_log: list[ControlRecord] = []

    def deliver(now: int) -> None:
        for entry in net.deliver_entries(now):
            stamp = max(-(-entry.deliver_at // dt_ms) * dt_ms, entry.msg.sent_at + dt_ms)
            agents[entry.dst].receive(entry.msg, stamp)

    k = 0
    while k < n:
        now = k * dt_ms
        deliver(now)
        for c, i in enumerate(ids):
            if next_ctrl[c] != now:
                continue
            gps_ok = not any(o.id == i and _active(o.start_s, o.end_s, now)
                             for o in sc.gps_outages)
            agent = agents[i]
            out = agent.tick((state[c][0], state[c][1]), GpsStatus(gps_ok), now)
            if out.message is not None:
                for j in agent.neighbors:
                    cut = any(lc.src == i and lc.dst == j and _active(lc.start_s, lc.end_s, now)
                              for lc in sc.link_cuts)
                    net.set_link(i, j, not cut)
                    net.send(out.message, i, j, now)
            control_log.append(ControlRecord(
                now, i, agent.last_phase, out.u_r, out.circle.radius,
                tuple(sorted(agent.table.live(now, sc.staleness_timeout_ms))),
                out.message is not None,
            ))
            next_ctrl[c] += sc.control_period_ms
        k_next = min(n, min(-(-t // dt_ms) for t in next_ctrl))
        if k_next <= k:
            k_next = k + 1
        for c, i in enumerate(ids):
            out = agents[i].output
            x, y, psi = kernels.track_circle(
                state[c][0], state[c][1], state[c][2], specs[i].speed,
                sc.center[0], sc.center[1], out.circle.radius, sc.k_e, sc.k_d, ccw,
                u_max[c], dt, k_next - k, euler, bufs[c][k:k_next],
            )
            state[c] = [x, y, psi]
            u_r[k:k_next, c] = out.u_r
            radius[k:k_next, c] = out.circle.radius
            n_live[k:k_next, c] = out.n_live
        k = k_next

    # final frame: state after the last step, command it would apply next
    for c, i in enumerate(ids):
        out = agents[i].output
        x, y, psi = state[c]
        u, e = kernels.circle_command(x, y, psi, specs[i].speed, sc.center[0], sc.center[1],
                                      out.circle.radius, sc.k_e, sc.k_d, ccw)
        bufs[c][n] = (x, y, psi, min(u_max[c], max(-u_max[c], u)), e)
        u_r[n, c] = out.u_r
        radius[n, c] = out.circle.radius
        n_live[n, c] = out.n_live

    sel = np.arange(0, n + 1, sc.decimation)
    stacked = np.stack(bufs, axis=1)[sel]
    speed = np.array([specs[i].speed for i in ids])
    u_psi = stacked[:, :, 3]
    return TelemetryLog(
        time_ms=sel.astype(np.int64) * dt_ms,
        ids=ids,
        edges=graph.edges,
        center=sc.center,
        base_radius=sc.radius,
        speed=speed,
        x=stacked[:, :, 0],
        y=stacked[:, :, 1],
        psi=stacked[:, :, 2],
        e=stacked[:, :, 4],
        u_psi=u_psi,
        bank=np.arctan(u_psi * speed / sc.gravity),
        u_r=u_r[sel],
        radius_eff=radius[sel],
        n_live=n_live[sel],
        control_log=control_log,
        trace=net.trace,
        net_stats={"sent": net.sent, "dropped": net.dropped, "delivered": net.delivered,
                   "in_flight": net.in_flight},
    )
