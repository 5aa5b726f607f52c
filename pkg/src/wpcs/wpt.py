"""RF power transfer from beacons to wearables.

Free-space link budget with a hard sensitivity gate, a constant RF-to-DC
conversion efficiency, and a geometric line-of-sight blockage model in which
pedestrians are vertical cylinders scattered as a Poisson field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

C = 2.99792458e8
MAX_BEAMS = 6
OMNI = "omni"
DIRECTIONAL = "directional"
# relative slack on the sensitivity gate so that a link sitting exactly at the
# threshold (up to float rounding of the dB <-> W conversion) still counts
GATE_RTOL = 1e-9


def dbm_to_w(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def w_to_dbm(w):
    return 10.0 * np.log10(np.asarray(w, dtype=float)) + 30.0


@dataclass(frozen=True)
class LinkBudgetParams:
    frequency_hz: float = 915e6
    tx_power_dbm: float = 30.0
    tx_gain_omni_dbi: float = 0.0
    tx_gain_dir_dbi: float = 16.0
    rx_gain_dbi: float = 0.0
    sensitivity_dbm: float = -20.0
    efficiency: float = 0.30
    d_min_m: float = 0.5

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise ValueError("efficiency must lie in (0, 1]")
        if self.frequency_hz <= 0:
            raise ValueError("frequency must be positive")
        if self.d_min_m <= 0:
            raise ValueError("d_min_m must be positive")

    def tx_gain_dbi(self, antenna: str) -> float:
        if antenna == OMNI:
            return self.tx_gain_omni_dbi
        if antenna == DIRECTIONAL:
            return self.tx_gain_dir_dbi
        raise ValueError(f"unknown antenna {antenna!r}")

    @property
    def sensitivity_w(self) -> float:
        return float(dbm_to_w(self.sensitivity_dbm))

    def power_scale(self, tx_gain_dbi: float) -> float:
        """``P_rx(d) = scale / d**2`` in watts (free space, beyond d_min)."""
        eirp_w = float(dbm_to_w(self.tx_power_dbm + tx_gain_dbi + self.rx_gain_dbi))
        return eirp_w * (C / (4 * math.pi * self.frequency_hz)) ** 2


@dataclass(frozen=True)
class Beacon:
    id: int
    mount: str  # "static" or "vehicle"
    position: tuple[float, float] | None = None
    vehicle_id: int | None = None
    height_m: float = 3.0
    antenna: str = OMNI
    gain_dbi: float = 0.0
    max_beams: int = MAX_BEAMS

    def __post_init__(self):
        if self.mount == "static" and self.position is None:
            raise ValueError("static beacon needs a position")
        if self.mount == "vehicle" and self.vehicle_id is None:
            raise ValueError("vehicle beacon needs a carrier")
        if self.mount not in ("static", "vehicle"):
            raise ValueError(f"unknown mount {self.mount!r}")
        if self.antenna not in (OMNI, DIRECTIONAL):
            raise ValueError(f"unknown antenna {self.antenna!r}")
        if self.antenna == DIRECTIONAL and self.max_beams != MAX_BEAMS:
            raise ValueError(f"directional beacons steer exactly {MAX_BEAMS} beams")


@dataclass(frozen=True)
class BlockageGeometry:
    beacon_height_m: float = 3.0
    device_height_m: float = 1.2
    blocker_height_m: float = 1.7
    body_diameter_m: float = 0.4
    blocker_density_per_m2: float = 0.0

    def __post_init__(self):
        if not self.device_height_m < self.blocker_height_m < self.beacon_height_m:
            raise ValueError("need device height < blocker height < beacon height")
        if self.body_diameter_m <= 0 or self.blocker_density_per_m2 < 0:
            raise ValueError("invalid blocker parameters")

    @property
    def height_fraction(self) -> float:
        """Share of the horizontal link length where the ray is below head height."""
        return (self.blocker_height_m - self.device_height_m) / (
            self.beacon_height_m - self.device_height_m
        )

    @property
    def body_radius_m(self) -> float:
        return self.body_diameter_m / 2

    @property
    def height_gap_m(self) -> float:
        return self.beacon_height_m - self.device_height_m


def blocker_density(participants: int, pedestrian_zone_area_m2: float,
                    participation: float = 0.1) -> float:
    """Bodies per square metre when ``participants`` are a share of all pedestrians."""
    return participants / participation / pedestrian_zone_area_m2


# --- compiled scalar helpers, shared with the engine kernel ---------------

@njit(cache=True)
def link_power_w(d3d, scale, d_min):
    d = d3d if d3d > d_min else d_min
    return scale / (d * d)


@njit(cache=True)
def block_prob(d2d, lam_w, height_fraction, body_radius):
    eff = height_fraction * d2d - body_radius
    if eff <= 0.0 or lam_w <= 0.0:
        return 0.0
    return 1.0 - math.exp(-lam_w * eff)


# --- public operations ----------------------------------------------------

def fspl_db(d_m, frequency_hz, d_min_m=0.5):
    d = np.maximum(np.asarray(d_m, dtype=float), d_min_m)
    out = 20.0 * np.log10(4 * np.pi * d * frequency_hz / C)
    return float(out) if out.ndim == 0 else out


def rx_power_dbm(params: LinkBudgetParams, tx_gain_dbi: float, d3d_m):
    return (params.tx_power_dbm + tx_gain_dbi + params.rx_gain_dbi
            - fspl_db(d3d_m, params.frequency_hz, params.d_min_m))


def coverage_radius_3d(params: LinkBudgetParams, tx_gain_dbi: float) -> float:
    budget = params.tx_power_dbm + tx_gain_dbi + params.rx_gain_dbi - params.sensitivity_dbm
    d = C / (4 * math.pi * params.frequency_hz) * 10 ** (budget / 20)
    return d if d >= params.d_min_m else 0.0


def coverage_radius_2d(params: LinkBudgetParams, tx_gain_dbi: float, height_gap_m: float) -> float:
    d = coverage_radius_3d(params, tx_gain_dbi)
    if d <= height_gap_m:
        return 0.0
    return math.sqrt(d * d - height_gap_m * height_gap_m)


def blockage_probability(d2d_m, geom: BlockageGeometry):
    d = np.asarray(d2d_m, dtype=float)
    lam_w = geom.blocker_density_per_m2 * geom.body_diameter_m
    eff = np.maximum(0.0, geom.height_fraction * d - geom.body_radius_m)
    out = -np.expm1(-lam_w * eff)
    return float(out) if out.ndim == 0 else out


def _served_power_w(params, gain_dbi, src, dst):
    d3d = math.dist(src, dst)
    p = link_power_w(d3d, params.power_scale(gain_dbi), params.d_min_m)
    return p if p >= params.sensitivity_w * (1 - GATE_RTOL) else 0.0


def _beacon_xyz(beacon: Beacon, positions=None):
    if positions is not None and beacon.id in positions:
        x, y = positions[beacon.id][:2]
    else:
        x, y = beacon.position
    return (x, y, beacon.height_m)


def assign_beams(beacon: Beacon, candidate_devices, params: LinkBudgetParams,
                 geom: BlockageGeometry, rng: np.random.Generator, beacon_pos=None) -> set:
    """Pick at most ``max_beams`` devices for a directional beacon this step.

    ``candidate_devices`` maps device id to its (x, y, h). A device qualifies if
    it is inside directional coverage and its line-of-sight draw succeeds;
    qualified devices are served nearest first, ties by id.
    """
    if beacon.antenna != DIRECTIONAL:
        raise ValueError("beam assignment applies to directional beacons only")
    src = tuple(beacon_pos) if beacon_pos is not None else _beacon_xyz(beacon)
    if len(src) == 2:
        src = (src[0], src[1], beacon.height_m)
    ranked = []
    for dev_id in sorted(candidate_devices):
        dst = candidate_devices[dev_id]
        if _served_power_w(params, beacon.gain_dbi, src, dst) == 0.0:
            continue
        d2d = math.hypot(dst[0] - src[0], dst[1] - src[1])
        if rng.random() < blockage_probability(d2d, geom):
            continue
        ranked.append((math.dist(src, dst), dev_id))
    ranked.sort()
    return {dev_id for _, dev_id in ranked[: beacon.max_beams]}


def harvested_power_w(device_pos, beacons, params: LinkBudgetParams, geom: BlockageGeometry,
                      rng: np.random.Generator, beam_map=None, device_id=None,
                      positions=None) -> float:
    """DC power a device harvests from all beacons that reach it this step.

    Omni links draw their own line-of-sight outcome; directional links count
    only if the device is in that beacon's beam set (``beam_map``). Links
    below sensitivity contribute nothing.
    """
    beam_map = beam_map or {}
    total = 0.0
    for b in beacons:
        src = _beacon_xyz(b, positions)
        p = _served_power_w(params, b.gain_dbi, src, device_pos)
        if p == 0.0:
            continue
        if b.antenna == DIRECTIONAL:
            if device_id not in beam_map.get(b.id, ()):
                continue
        else:
            d2d = math.hypot(device_pos[0] - src[0], device_pos[1] - src[1])
            if rng.random() < blockage_probability(d2d, geom):
                continue
        total += params.efficiency * p
    return total
