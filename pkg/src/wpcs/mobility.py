"""Pedestrian and vehicle movement along the street network.

Agents walk (or drive) along a street and, on reaching a crossing, pick one of
the available continuations (straight, turn onto the crossing street in either
direction) uniformly at random. At the edge of the area they turn around.
Pedestrians keep to the sidewalk that is on the same hand as before the turn;
vehicles ride the road centerline.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .citygen import CityLayout

PEDESTRIAN = "pedestrian"
VEHICLE = "vehicle"
KMH = 1 / 3.6

PED_SPEED_KMH = (3.0, 6.0)
VEHICLE_SPEED_KMH = 30.0


@dataclass(frozen=True)
class Agent:
    id: int
    role: str
    segment_id: int
    side: int  # +1/-1 sidewalk for pedestrians, 0 for vehicles
    arc_s: float
    heading: int
    speed_mps: float


@njit(cache=True)
def _axis_sign(axis):
    # +1 side is the left-hand side when heading +1 on a horizontal street,
    # the right-hand side on a vertical street
    return 1 if axis == 0 else -1


@njit(cache=True)
def next_event(seg, arc, heading, length, cross_arc, n_cross):
    """Arc of the next crossing strictly ahead (or the street end) and its index (-1 at the end)."""
    n = n_cross[seg]
    if heading > 0:
        for j in range(n):
            if cross_arc[seg, j] > arc:
                return cross_arc[seg, j], j
        return length[seg], -1
    for j in range(n - 1, -1, -1):
        if cross_arc[seg, j] < arc:
            return cross_arc[seg, j], j
    return 0.0, -1


@njit(cache=True)
def move(seg, side, arc, heading, dist, axis, coord, start, length, cross_arc, cross_seg,
         n_cross, pool, pos):
    """Advance one agent by ``dist`` metres.

    Consumes one uniform from ``pool`` (starting at ``pos``) per crossing
    decision. Returns the new ``(seg, side, arc, heading, pos, target)`` where
    ``target`` is the arc of the next event ahead.
    """
    # written without `continue`: numba 0.66 drops the `arc = target`
    # update on that path
    while True:
        target, nxt = next_event(seg, arc, heading, length, cross_arc, n_cross)
        gap = abs(target - arc)
        if gap > dist:
            return seg, side, arc + heading * dist, heading, pos, target
        arc = target
        dist -= gap
        if nxt < 0:
            heading = -heading
        else:
            other = cross_seg[seg, nxt]
            # arc of this crossing on the other street is our centerline coordinate
            new_arc = coord[seg] - start[other]
            can_straight = (heading > 0 and arc < length[seg]) or (heading < 0 and arc > 0.0)
            can_plus = new_arc < length[other]
            can_minus = new_arc > 0.0
            options = int(can_straight) + int(can_plus) + int(can_minus)
            if options == 0:
                heading = -heading
            else:
                k = min(int(pool[pos] * options), options - 1)
                pos += 1
                if can_straight:
                    k -= 1
                if k >= 0:
                    new_heading = 1 if (can_plus and k == 0) else -1
                    if side != 0:
                        left = _axis_sign(axis[seg]) * side * heading
                        side = left * _axis_sign(axis[other]) * new_heading
                    seg = other
                    arc = new_arc
                    heading = new_heading


@njit(cache=True)
def xy_of(seg, side, arc, lateral, axis, coord, start):
    off = side * lateral
    if axis[seg] == 0:
        return start[seg] + arc, coord[seg] + off
    return coord[seg] + off, start[seg] + arc


def pedestrian_lateral_m(layout: CityLayout) -> float:
    """Centerline-to-sidewalk-midline distance."""
    return layout.road_width_m / 2 + layout.sidewalk_width_m / 2


def _place(layout, rng, n, per_segment):
    lengths = np.array([s.length_m for s in layout.segments])
    weights = np.repeat(lengths, per_segment)
    cum = np.cumsum(weights)
    g = rng.uniform(0.0, cum[-1], size=n)
    line = np.minimum(np.searchsorted(cum, g, side="right"), len(weights) - 1)
    arc = g - (cum[line] - weights[line])
    return line, np.clip(arc, 0.0, lengths[line // per_segment])


def spawn_agents(layout: CityLayout, n_pedestrians: int, n_vehicles: int,
                 rng: np.random.Generator, first_id: int = 0) -> list[Agent]:
    """Place agents uniformly along sidewalks (pedestrians) and roads (vehicles)."""
    if n_pedestrians < 0 or n_vehicles < 0:
        raise ValueError("agent counts must be non-negative")
    if not layout.segments:
        raise ValueError("empty layout")
    agents = []
    if n_pedestrians:
        line, arc = _place(layout, rng, n_pedestrians, 2)
        heading = rng.choice([-1, 1], size=n_pedestrians)
        speed = rng.uniform(*PED_SPEED_KMH, size=n_pedestrians) * KMH
        for i in range(n_pedestrians):
            side = 1 if line[i] % 2 == 0 else -1
            agents.append(Agent(first_id + i, PEDESTRIAN, int(line[i] // 2), side,
                                float(arc[i]), int(heading[i]), float(speed[i])))
    if n_vehicles:
        line, arc = _place(layout, rng, n_vehicles, 1)
        heading = rng.choice([-1, 1], size=n_vehicles)
        for i in range(n_vehicles):
            agents.append(Agent(first_id + n_pedestrians + i, VEHICLE, int(line[i]), 0,
                                float(arc[i]), int(heading[i]), VEHICLE_SPEED_KMH * KMH))
    return agents


def advance(agent: Agent, layout: CityLayout, dt_s: float, rng: np.random.Generator) -> Agent:
    if dt_s <= 0:
        raise ValueError("dt_s must be positive")
    t = layout.tables
    pool = rng.random(max_decisions_per_step(layout, agent.speed_mps, dt_s))
    seg, side, arc, heading, _, _ = move(agent.segment_id, agent.side, agent.arc_s, agent.heading,
                                      agent.speed_mps * dt_s, t.axis, t.coord, t.start,
                                      t.length, t.cross_arc, t.cross_seg, t.n_cross, pool, 0)
    return replace(agent, segment_id=int(seg), side=int(side), arc_s=float(arc),
                   heading=int(heading))


def position3d(agent: Agent, layout: CityLayout, carried_height_m: float):
    t = layout.tables
    lateral = pedestrian_lateral_m(layout) if agent.role == PEDESTRIAN else 0.0
    x, y = xy_of(agent.segment_id, agent.side, agent.arc_s, lateral, t.axis, t.coord, t.start)
    return (float(x), float(y), float(carried_height_m))


def agents_to_arrays(agents: list[Agent]):
    """Columnar copy of agent state for the compiled step loop."""
    return (
        np.array([a.segment_id for a in agents], dtype=np.int64),
        np.array([a.side for a in agents], dtype=np.int64),
        np.array([a.arc_s for a in agents], dtype=float),
        np.array([a.heading for a in agents], dtype=np.int64),
        np.array([a.speed_mps for a in agents], dtype=float),
    )


def max_decisions_per_step(layout: CityLayout, speed_mps: float, dt_s: float) -> int:
    """Upper bound on uniforms one agent can consume in a single step."""
    t = layout.tables
    gaps = []
    for i in range(len(t.length)):
        pts = np.concatenate([[0.0], t.cross_arc[i, : t.n_cross[i]], [t.length[i]]])
        d = np.diff(pts)
        gaps.append(d[d > 0].min())
    return int(speed_mps * dt_s / min(gaps)) + 2

