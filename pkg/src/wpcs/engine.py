"""Scenario configuration, beacon deployment and the time-stepped simulation loop."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

import numpy as np
from numba import njit

from . import device as dev
from .citygen import (CityLayout, generate_manhattan, generate_random_layout, locate_on_boundary,
                      point_on_sidewalk, total_sidewalk_length)
from .metrics import RunRecord
from .mobility import (KMH, PED_SPEED_KMH, VEHICLE, VEHICLE_SPEED_KMH, Agent, agents_to_arrays,
                       max_decisions_per_step, move, next_event, pedestrian_lateral_m,
                       spawn_agents, xy_of)
from .wpt import (DIRECTIONAL, GATE_RTOL, MAX_BEAMS, OMNI, Beacon, BlockageGeometry,
                  LinkBudgetParams, blocker_density, coverage_radius_2d)

DAY_S = 86400.0
LAYOUTS = ("manhattan", "random")
BEACON_MODES = ("static_regular", "static_random", "mobile")
ANTENNAS = (OMNI, DIRECTIONAL)
SUSTAIN_WINDOW = 0.2

# rng stream ids, one per subsystem
LAYOUT_STREAM, PED_STREAM, VEH_STREAM, BEACON_STREAM, BLOCK_STREAM, PED_TURNS, VEH_TURNS = range(7)

POOL_SIZE = 1 << 18
CHUNK_STEPS = 1 << 14


@dataclass(frozen=True)
class ScenarioConfig:
    layout: str = "manhattan"
    area_side_m: float = 400.0
    block_m: float = 100.0
    block_jitter_frac: float = 0.3
    street_width_m: float = 20.0
    road_width_m: float = 5.0
    beacon_mode: str = "static_regular"
    beacon_count: int = 0
    antenna: str = DIRECTIONAL
    tx_gain_dir_dbi: float = 16.0
    tx_gain_omni_dbi: float = 0.0
    frequency_hz: float = 915e6
    tx_power_dbm: float = 30.0
    rx_gain_dbi: float = 0.0
    sensitivity_dbm: float = -20.0
    efficiency: float = 0.30
    d_min_m: float = 0.5
    beacon_height_m: float = 3.0
    device_height_m: float = 1.2
    blocker_height_m: float = 1.7
    body_diameter_m: float = 0.4
    participation: float = 0.1
    radio: str = "ble"
    policy: str = "always"
    capacity_j: float = dev.CAPACITY_J
    sleep_power_w: float = dev.SLEEP_POWER_W
    payload_bytes: int = dev.PAYLOAD_BYTES
    report_period_s: float = dev.REPORT_PERIOD_S
    personal_power_w: float = dev.PEDOMETER.active_power_w
    personal_active_s: float = dev.PEDOMETER.active_time_s
    personal_period_s: float = dev.PEDOMETER.period_s
    collective_power_w: float = dev.GAS_SENSOR.active_power_w
    collective_active_s: float = dev.GAS_SENSOR.active_time_s
    collective_period_s: float = dev.GAS_SENSOR.period_s
    participants: int = 100
    background_vehicles: int = 0
    dt_s: float = 1.0
    horizon_s: float = 30 * DAY_S
    replications: int = 10
    master_seed: int = 0
    soc_trace_every_s: float = 0.0

    def __post_init__(self):
        choices = {"layout": LAYOUTS, "beacon_mode": BEACON_MODES, "antenna": ANTENNAS,
                   "radio": tuple(dev.RADIOS), "policy": dev.POLICIES}
        for key, allowed in choices.items():
            if getattr(self, key) not in allowed:
                raise ValueError(f"{key} must be one of {', '.join(allowed)}")
        for key in ("beacon_count", "background_vehicles", "master_seed", "payload_bytes"):
            if getattr(self, key) < 0:
                raise ValueError(f"{key} must be >= 0")
        if self.participants < 1:
            raise ValueError("participants must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.dt_s <= 0:
            raise ValueError("dt_s must be positive")
        if self.horizon_s < 0:
            raise ValueError("horizon_s must be >= 0")
        if not 0 < self.participation <= 1:
            raise ValueError("participation must lie in (0, 1]")
        if self.soc_trace_every_s < 0:
            raise ValueError("soc_trace_every_s must be >= 0")
        # the component constructors carry their own invariants
        self.link_params()
        self.blockage(1.0)
        self.device_template()

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.horizon_s / self.dt_s + 1e-9))

    def link_params(self) -> LinkBudgetParams:
        return LinkBudgetParams(self.frequency_hz, self.tx_power_dbm, self.tx_gain_omni_dbi,
                                self.tx_gain_dir_dbi, self.rx_gain_dbi, self.sensitivity_dbm,
                                self.efficiency, self.d_min_m)

    def blockage(self, pedestrian_zone_area_m2: float) -> BlockageGeometry:
        lam = blocker_density(self.participants, pedestrian_zone_area_m2, self.participation)
        return BlockageGeometry(self.beacon_height_m, self.device_height_m,
                                self.blocker_height_m, self.body_diameter_m, lam)

    def device_template(self, policy: str | None = None) -> dev.DeviceState:
        radio = replace(dev.RADIOS[self.radio], report_period_s=self.report_period_s,
                        payload_bytes=self.payload_bytes)
        return dev.DeviceState(
            radio=radio,
            policy=self.policy if policy is None else policy,
            personal=dev.SensorSpec("personal", self.personal_power_w, self.personal_active_s,
                                    self.personal_period_s, "personal"),
            collective=dev.SensorSpec("collective", self.collective_power_w,
                                      self.collective_active_s, self.collective_period_s,
                                      "collective"),
            capacity_j=self.capacity_j,
            sleep_power_w=self.sleep_power_w,
        )

    def as_dict(self) -> dict:
        return asdict(self)


CONFIG_KEYS = tuple(f.name for f in fields(ScenarioConfig))
# keys that only touch the device energy model; variants over these share one harvest trace
DEVICE_KEYS = frozenset({
    "radio", "policy", "capacity_j", "sleep_power_w", "payload_bytes", "report_period_s",
    "personal_power_w", "personal_active_s", "personal_period_s", "collective_power_w",
    "collective_active_s", "collective_period_s", "soc_trace_every_s",
})


def stream(master_seed: int, replication: int, subsystem: int) -> np.random.Generator:
    """Independent generator per (replication, subsystem)."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(replication, subsystem))
    return np.random.Generator(np.random.PCG64(seq))


def replication_seed(master_seed: int, replication: int) -> int:
    return int(np.random.SeedSequence(master_seed, spawn_key=(replication,)).generate_state(1)[0])


def build_layout(config: ScenarioConfig, replication: int) -> CityLayout:
    if config.layout == "manhattan":
        return generate_manhattan(config.area_side_m, config.block_m, config.street_width_m,
                                  config.road_width_m)
    return generate_random_layout(config.area_side_m, config.block_m, config.block_jitter_frac,
                                  config.street_width_m, config.road_width_m,
                                  stream(config.master_seed, replication, LAYOUT_STREAM))


# --- deployment -----------------------------------------------------------

def _static_beacon(i, layout, g, antenna, gain, height):
    seg, side, arc = locate_on_boundary(layout, g)
    xy = point_on_sidewalk(layout, seg, side, arc)
    return Beacon(i, "static", position=xy, height_m=height, antenna=antenna, gain_dbi=gain)


def deploy_static_regular(layout: CityLayout, beacon_count: int, antenna: str = OMNI,
                          gain_dbi: float = 0.0, height_m: float = 3.0) -> list[Beacon]:
    """Beacons every ``total_length / count`` metres along the concatenated boundary lines."""
    if beacon_count <= 0:
        return []
    spacing = total_sidewalk_length(layout) / beacon_count
    return [_static_beacon(i, layout, i * spacing, antenna, gain_dbi, height_m)
            for i in range(beacon_count)]


def deploy_static_random(layout: CityLayout, beacon_count: int, rng: np.random.Generator,
                         antenna: str = OMNI, gain_dbi: float = 0.0,
                         height_m: float = 3.0) -> list[Beacon]:
    if beacon_count <= 0:
        return []
    g = rng.uniform(0.0, total_sidewalk_length(layout), size=beacon_count)
    return [_static_beacon(i, layout, float(g[i]), antenna, gain_dbi, height_m)
            for i in range(beacon_count)]


def deploy_mobile(layout: CityLayout, beacon_count: int, rng: np.random.Generator,
                  antenna: str = OMNI, gain_dbi: float = 0.0, height_m: float = 3.0,
                  first_vehicle_id: int = 0):
    """Spawn ``beacon_count`` vehicles, each carrying one beacon."""
    if beacon_count < 0:
        raise ValueError("beacon_count must be >= 0")
    vehicles = spawn_agents(layout, 0, beacon_count, rng, first_id=first_vehicle_id)
    beacons = [Beacon(i, "vehicle", vehicle_id=v.id, height_m=height_m, antenna=antenna,
                      gain_dbi=gain_dbi) for i, v in enumerate(vehicles)]
    return vehicles, beacons


# --- compiled step loop ---------------------------------------------------

@njit(cache=True)
def _harvest_steps(n_steps, dt, axis, coord, start, length, cross_arc, cross_seg, n_cross,
                   p_seg, p_side, p_arc, p_head, p_speed, p_tgt, ped_lateral,
                   v_seg, v_side, v_arc, v_head, v_speed, v_tgt,
                   b_x, b_y, b_vehicle, directional, scale, sens_w, eta, d_min, dh,
                   lam_w, hfrac, body_r, max_beams, reach2d, cell, n_cells,
                   ped_pool, ped_pos, ped_need, veh_pool, veh_pos, veh_need,
                   blk_pool, blk_pos, blk_need, out):
    """Move agents and accumulate harvested power for up to ``n_steps`` steps.

    ``blk_pool`` holds unit-rate exponential variates: a link is blocked when
    the variate falls below its blocker count mean, i.e. with probability
    ``1 - exp(-mean)``. Stops early when a pool runs low; returns the number
    of steps done and the pool cursors.
    """
    n_dev = p_seg.shape[0]
    n_veh = v_seg.shape[0]
    n_b = b_x.shape[0]
    dx = np.empty(n_dev)
    dy = np.empty(n_dev)
    cell_of = np.empty(n_dev, np.int64)
    n_c = n_cells * n_cells
    cell_start = np.zeros(n_c + 1, np.int64)
    fill = np.zeros(n_c + 1, np.int64)
    order = np.empty(n_dev, np.int64)
    cand_d = np.empty(n_dev)
    cand_i = np.empty(n_dev, np.int64)
    cand_p = np.empty(n_dev)
    reach2 = reach2d * reach2d
    dh2 = dh * dh
    dmin2 = d_min * d_min
    gate = sens_w * (1.0 - GATE_RTOL)
    for s in range(n_steps):
        if (ped_pool.shape[0] - ped_pos < ped_need or veh_pool.shape[0] - veh_pos < veh_need
                or blk_pool.shape[0] - blk_pos < blk_need):
            return s, ped_pos, veh_pos, blk_pos
        for i in range(n_dev):
            d = p_speed[i] * dt
            if abs(p_tgt[i] - p_arc[i]) > d:
                p_arc[i] += p_head[i] * d
            else:
                p_seg[i], p_side[i], p_arc[i], p_head[i], ped_pos, p_tgt[i] = move(
                    p_seg[i], p_side[i], p_arc[i], p_head[i], d, axis, coord, start, length,
                    cross_arc, cross_seg, n_cross, ped_pool, ped_pos)
        for v in range(n_veh):
            d = v_speed[v] * dt
            if abs(v_tgt[v] - v_arc[v]) > d:
                v_arc[v] += v_head[v] * d
            else:
                v_seg[v], v_side[v], v_arc[v], v_head[v], veh_pos, v_tgt[v] = move(
                    v_seg[v], v_side[v], v_arc[v], v_head[v], d, axis, coord, start, length,
                    cross_arc, cross_seg, n_cross, veh_pool, veh_pos)
        # positions are written out inline: calling a helper with array
        # arguments here costs more than the arithmetic itself
        for j in range(n_b):
            v = b_vehicle[j]
            if v >= 0:
                sg = v_seg[v]
                if axis[sg] == 0:
                    b_x[j] = start[sg] + v_arc[v]
                    b_y[j] = coord[sg]
                else:
                    b_x[j] = coord[sg]
                    b_y[j] = start[sg] + v_arc[v]
        # bucket devices into a square grid (counting sort keeps index order per cell)
        for c in range(n_c + 1):
            cell_start[c] = 0
        for i in range(n_dev):
            sg = p_seg[i]
            off = p_side[i] * ped_lateral
            if axis[sg] == 0:
                dx[i] = start[sg] + p_arc[i]
                dy[i] = coord[sg] + off
            else:
                dx[i] = coord[sg] + off
                dy[i] = start[sg] + p_arc[i]
            cx = min(max(int(dx[i] / cell), 0), n_cells - 1)
            cy = min(max(int(dy[i] / cell), 0), n_cells - 1)
            cell_of[i] = cy * n_cells + cx
            cell_start[cell_of[i] + 1] += 1
        for c in range(n_c):
            cell_start[c + 1] += cell_start[c]
            fill[c] = cell_start[c]
        for i in range(n_dev):
            order[fill[cell_of[i]]] = i
            fill[cell_of[i]] += 1
        for j in range(n_b):
            bx = b_x[j]
            by = b_y[j]
            bcx = min(max(int(bx / cell), 0), n_cells - 1)
            bcy = min(max(int(by / cell), 0), n_cells - 1)
            n_cand = 0
            for cy in range(max(bcy - 1, 0), min(bcy + 2, n_cells)):
                for cx in range(max(bcx - 1, 0), min(bcx + 2, n_cells)):
                    c = cy * n_cells + cx
                    for q in range(cell_start[c], cell_start[c + 1]):
                        i = order[q]
                        ex = dx[i] - bx
                        ey = dy[i] - by
                        d2 = ex * ex + ey * ey
                        if d2 > reach2:
                            continue
                        d3sq = d2 + dh2
                        p = scale / (d3sq if d3sq > dmin2 else dmin2)
                        if p < gate:
                            continue
                        e = blk_pool[blk_pos]
                        blk_pos += 1
                        eff = hfrac * math.sqrt(d2) - body_r
                        if eff > 0.0 and e < lam_w * eff:
                            continue
                        if directional:
                            cand_d[n_cand] = d3sq
                            cand_i[n_cand] = i
                            cand_p[n_cand] = p
                            n_cand += 1
                        else:
                            out[i, s] += eta * p
            if directional:
                # serve the nearest max_beams candidates, ties by device index
                for m in range(min(max_beams, n_cand)):
                    best = m
                    for q in range(m + 1, n_cand):
                        if cand_d[q] < cand_d[best] or (cand_d[q] == cand_d[best]
                                                        and cand_i[q] < cand_i[best]):
                            best = q
                    cand_d[m], cand_d[best] = cand_d[best], cand_d[m]
                    cand_i[m], cand_i[best] = cand_i[best], cand_i[m]
                    cand_p[m], cand_p[best] = cand_p[best], cand_p[m]
                    out[cand_i[m], s] += eta * cand_p[m]
    return n_steps, ped_pos, veh_pos, blk_pos


@njit(cache=True)
def _targets(seg, arc, head, length, cross_arc, n_cross):
    out = np.empty(seg.shape[0])
    for i in range(seg.shape[0]):
        out[i], _ = next_event(seg[i], arc[i], head[i], length, cross_arc, n_cross)
    return out


class _Pool:
    """Pre-drawn variates from one generator, consumed in order by the kernel."""

    def __init__(self, rng, need, exponential=False):
        self.rng = rng
        self.need = need
        self.size = max(POOL_SIZE, 4 * need)
        self.draw = rng.standard_exponential if exponential else rng.random
        self.buf = self.draw(self.size)
        self.pos = 0

    def top_up(self):
        if len(self.buf) - self.pos < self.need:
            self.buf = np.concatenate([self.buf[self.pos:], self.draw(self.size)])
            self.pos = 0


class _World:
    """Agents, beacons and random pools of one replication."""

    def __init__(self, config: ScenarioConfig, replication: int):
        c = config
        seed = c.master_seed
        self.layout = build_layout(c, replication)
        self.tables = self.layout.tables
        self.params = c.link_params()
        self.geom = c.blockage(self.layout.pedestrian_zone_area_m2)
        self.pedestrians = spawn_agents(self.layout, c.participants, 0,
                                        stream(seed, replication, PED_STREAM))
        gain = self.params.tx_gain_dbi(c.antenna)
        veh_rng = stream(seed, replication, VEH_STREAM)
        first_vid = c.participants
        if c.beacon_mode == "mobile":
            carriers, self.beacons = deploy_mobile(self.layout, c.beacon_count, veh_rng,
                                                   c.antenna, gain, c.beacon_height_m,
                                                   first_vehicle_id=first_vid)
        else:
            carriers = []
            brng = stream(seed, replication, BEACON_STREAM)
            if c.beacon_mode == "static_regular":
                self.beacons = deploy_static_regular(self.layout, c.beacon_count, c.antenna, gain,
                                                     c.beacon_height_m)
            else:
                self.beacons = deploy_static_random(self.layout, c.beacon_count, brng, c.antenna,
                                                    gain, c.beacon_height_m)
        background = spawn_agents(self.layout, 0, c.background_vehicles, veh_rng,
                                  first_id=first_vid + len(carriers))
        self.vehicles: list[Agent] = carriers + background
        self.ped = list(agents_to_arrays(self.pedestrians))
        self.veh = list(agents_to_arrays(self.vehicles)) if self.vehicles else [
            np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0), np.zeros(0, np.int64),
            np.zeros(0)]
        vindex = {v.id: k for k, v in enumerate(self.vehicles)}
        self.b_x = np.array([b.position[0] if b.position else 0.0 for b in self.beacons])
        self.b_y = np.array([b.position[1] if b.position else 0.0 for b in self.beacons])
        self.b_vehicle = np.array([vindex[b.vehicle_id] if b.mount == VEHICLE else -1
                                   for b in self.beacons], dtype=np.int64)
        self.reach = coverage_radius_2d(self.params, gain, self.geom.height_gap_m)
        # cells no smaller than the reach so a 3x3 neighbourhood covers it
        self.cell = max(self.reach * (1 + 1e-6) + 1e-6, c.area_side_m / 16)
        self.n_cells = max(1, int(math.ceil(c.area_side_m / self.cell)))
        ped_need = c.participants * max_decisions_per_step(
            self.layout, PED_SPEED_KMH[1] * KMH, c.dt_s)
        veh_need = len(self.vehicles) * max_decisions_per_step(
            self.layout, VEHICLE_SPEED_KMH * KMH, c.dt_s)
        self.ped_pool = _Pool(stream(seed, replication, PED_TURNS), ped_need)
        self.veh_pool = _Pool(stream(seed, replication, VEH_TURNS), veh_need)
        self.blk_pool = _Pool(stream(seed, replication, BLOCK_STREAM),
                              c.participants * max(1, len(self.beacons)), exponential=True)
        t = self.tables
        self.ped.append(_targets(self.ped[0], self.ped[2], self.ped[3], t.length, t.cross_arc,
                                 t.n_cross))
        self.veh.append(_targets(self.veh[0], self.veh[2], self.veh[3], t.length, t.cross_arc,
                                 t.n_cross))
        self.directional = c.antenna == DIRECTIONAL
        self.scale = self.params.power_scale(gain)
        self.dt = c.dt_s

    @property
    def powered(self) -> bool:
        return len(self.beacons) > 0 and self.reach > 0

    def harvest(self, out: np.ndarray):
        """Fill ``out`` (n_devices, n_steps) with harvested watts, advancing the world."""
        m = out.shape[1]
        if not self.powered:
            out[:] = 0.0
            return
        t, g, p, b = self.tables, self.geom, self.params, self
        done = 0
        while done < m:
            for pool in (self.ped_pool, self.veh_pool, self.blk_pool):
                pool.top_up()
            steps, self.ped_pool.pos, self.veh_pool.pos, self.blk_pool.pos = _harvest_steps(
                m - done, self.dt, t.axis, t.coord, t.start, t.length, t.cross_arc, t.cross_seg,
                t.n_cross, *self.ped, pedestrian_lateral_m(self.layout), *self.veh,
                b.b_x, b.b_y, b.b_vehicle, self.directional, self.scale, p.sensitivity_w,
                p.efficiency, p.d_min_m, g.height_gap_m,
                g.blocker_density_per_m2 * g.body_diameter_m, g.height_fraction,
                g.body_radius_m, MAX_BEAMS, self.reach * (1 + 1e-9), self.cell, self.n_cells,
                self.ped_pool.buf, self.ped_pool.pos, self.ped_pool.need,
                self.veh_pool.buf, self.veh_pool.pos, self.veh_pool.need,
                self.blk_pool.buf, self.blk_pool.pos, self.blk_pool.need, out[:, done:])
            done += steps

    def beacon_xy(self) -> np.ndarray:
        return np.column_stack([self.b_x, self.b_y]) if self.beacons else np.zeros((0, 2))

    def vehicle_xy(self) -> np.ndarray:
        t = self.tables
        seg, side, arc = self.veh[0], self.veh[1], self.veh[2]
        return np.array([xy_of(seg[k], side[k], arc[k], 0.0, t.axis, t.coord, t.start)
                         for k in range(len(seg))]).reshape(-1, 2)

    def device_xy(self) -> np.ndarray:
        t = self.tables
        lat = pedestrian_lateral_m(self.layout)
        seg, side, arc = self.ped[0], self.ped[1], self.ped[2]
        return np.array([xy_of(seg[k], side[k], arc[k], lat, t.axis, t.coord, t.start)
                         for k in range(len(seg))]).reshape(-1, 2)


class _Fleet:
    """Energy state of every participant under one (radio, policy) variant."""

    def __init__(self, config: ScenarioConfig, n_steps: int):
        n = config.participants
        self.config = config
        self.state = config.device_template()
        self.battery = np.full(n, self.state.capacity_j)
        self.credit = np.zeros(n)
        self.active = np.zeros(n, np.bool_)
        self.alive = np.ones(n, np.bool_)
        self.depletion = np.full(n, np.nan)
        self.scheduled = np.zeros(n, np.int64)
        self.delivered = np.zeros(n, np.int64)
        self.consumed = np.zeros(n)
        self.alive_time = np.zeros(n)
        self.tail_h = np.zeros(n)
        self.tail_c = np.zeros(n)
        self.tail_start = int(math.floor((1 - SUSTAIN_WINDOW) * n_steps))
        every = config.soc_trace_every_s
        self.trace_every = max(1, int(round(every / config.dt_s))) if every > 0 else 0
        n_trace = (n_steps + self.trace_every - 1) // self.trace_every if self.trace_every else 0
        self.trace = np.zeros((max(n_trace, 0), n))

    def step(self, harvest, k0):
        s, c = self.state, self.config
        n_rep, epoch = dev.step_calendar(k0, harvest.shape[1], c.dt_s, s.radio.report_period_s,
                                         s.collective.period_s)
        dev.energy_chunk(harvest, k0, c.dt_s, n_rep, epoch, s.policy_code, s.capacity_j,
                         s.base_power_w, s.collective.avg_power_w, s.report_j,
                         s.collective_cost_j(), s.personal_cost_j(), self.tail_start,
                         self.battery, self.credit, self.active, self.alive, self.depletion,
                         self.scheduled, self.delivered, self.consumed, self.alive_time,
                         self.tail_h, self.tail_c, self.trace,
                         self.trace_every)

    def sustainable(self, n_steps):
        if n_steps == 0:
            return np.zeros_like(self.alive)
        return self.alive & (self.tail_h - self.tail_c >= 0)


def baseline_lifetime_s(config: ScenarioConfig) -> float:
    """Lifetime of the default device (personal sensor only, no charging)."""
    s = config.device_template(policy="default")
    mean_w = dev.mean_consumption_w(s)
    max_steps = int(2 * s.capacity_j / mean_w / config.dt_s) + 10
    return float(dev.zero_harvest_lifetime(config.dt_s, s.capacity_j, s.base_power_w,
                                           s.report_j, s.radio.report_period_s, max_steps))


def _check_variants(config, variants):
    out = []
    for v in variants:
        bad = set(v) - DEVICE_KEYS
        if bad:
            raise ValueError(f"variant overrides non-device keys: {sorted(bad)}")
        out.append(replace(config, **v))
    return out


def run_variants(config: ScenarioConfig, replication: int, variants) -> list[RunRecord]:
    """Run one replication and evaluate several device variants on the same harvest trace.

    ``variants`` is a list of dicts overriding device-side keys (radio, policy,
    sensor and battery parameters). Each variant yields the record that
    :func:`run` would produce for the overridden config.
    """
    configs = _check_variants(config, variants)
    world = _World(config, replication)
    n_steps = config.n_steps
    n_dev = config.participants
    fleets = [_Fleet(c, n_steps) for c in configs]
    harvest_sum = np.zeros(n_dev)
    k = 0
    while k < n_steps:
        m = min(CHUNK_STEPS, n_steps - k)
        chunk = np.zeros((n_dev, m))
        world.harvest(chunk)
        harvest_sum += chunk.sum(axis=1)
        for fleet in fleets:
            fleet.step(chunk, k)
        k += m
    horizon = n_steps * config.dt_s
    mean_h = harvest_sum * config.dt_s / horizon if n_steps else np.zeros(n_dev)
    signature = tuple((s.axis, s.coord) for s in world.layout.segments)
    records = []
    for c, f in zip(configs, fleets):
        with np.errstate(invalid="ignore", divide="ignore"):
            mean_c = np.where(f.alive_time > 0, f.consumed / f.alive_time, 0.0)
        trace_t = (np.arange(f.trace.shape[0]) * f.trace_every * c.dt_s
                   if f.trace_every else None)
        records.append(RunRecord(
            config=c, replication=replication,
            seed=replication_seed(c.master_seed, replication), horizon_s=horizon,
            n_steps=n_steps, mean_harvested_w=mean_h.copy(), mean_consumed_w=mean_c,
            depletion_time_s=f.depletion, sustainable=f.sustainable(n_steps),
            collective_scheduled=f.scheduled, collective_delivered=f.delivered,
            final_battery_j=f.battery, baseline_lifetime_s=baseline_lifetime_s(c),
            layout_signature=signature,
            soc_trace=f.trace if f.trace_every else None, soc_trace_times_s=trace_t,
        ))
    return records


def run(config: ScenarioConfig, replication_index: int = 0) -> RunRecord:
    return run_variants(config, replication_index, [{}])[0]


def _task(args):
    config, replication, variants = args
    return run_variants(config, replication, variants)


def run_batch(tasks, jobs: int = 1):
    """Run ``(config, replication, variants)`` tasks; results keep task order."""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_task, tasks))


def run_replications(config: ScenarioConfig, jobs: int = 1) -> list[RunRecord]:
    tasks = [(config, r, [{}]) for r in range(config.replications)]
    return [recs[0] for recs in run_batch(tasks, jobs)]
