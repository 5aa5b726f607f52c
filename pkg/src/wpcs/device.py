"""Wearable energy model.

A device carries a personal sensor that is always on and, when participating,
a collective (operator) sensor. Each active sensor produces one report per
report period. Sensing power is applied as its duty-cycled average; a report's
radio energy is charged at the report instant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

CAPACITY_J = 37.7
SLEEP_POWER_W = 1e-6
PAYLOAD_BYTES = 32
REPORT_PERIOD_S = 5.0

POLICIES = ("default", "always", "policy1", "policy2")
DEFAULT, ALWAYS, POLICY1, POLICY2 = range(4)

# tolerance for deciding whether a clock value sits on a period boundary
_EPS = 1e-9


@dataclass(frozen=True)
class SensorSpec:
    name: str
    active_power_w: float
    active_time_s: float
    period_s: float
    kind: str = "personal"

    def __post_init__(self):
        if not 0 < self.active_time_s <= self.period_s:
            raise ValueError("need 0 < active_time_s <= period_s")
        if self.kind not in ("personal", "collective"):
            raise ValueError(f"unknown sensor kind {self.kind!r}")

    @property
    def avg_power_w(self) -> float:
        return self.active_power_w * self.active_time_s / self.period_s

    @property
    def energy_per_period_j(self) -> float:
        return self.active_power_w * self.active_time_s


@dataclass(frozen=True)
class RadioSpec:
    """Transmission time ``base_ms + (D + header_bytes) / bytes_per_ms`` milliseconds."""

    name: str
    base_ms: float
    header_bytes: float
    bytes_per_ms: float
    tx_power_w: float
    report_period_s: float = REPORT_PERIOD_S
    payload_bytes: int = PAYLOAD_BYTES


PEDOMETER = SensorSpec("accelerometer", 28.5e-6, 1.0, 1.0, "personal")
GAS_SENSOR = SensorSpec("gas_voc", 32e-3, 25e-3, 100.0, "collective")

RADIOS = {
    "ble": RadioSpec("ble", 0.15, 10, 125, 18.3e-3),
    "lora": RadioSpec("lora", 0.215, 23, 6.25, 40e-3),
    "zigbee": RadioSpec("zigbee", 1.0, 15, 31.25, 18.3e-3),
}


def tx_time_s(radio: RadioSpec, payload_bytes: int | None = None) -> float:
    d = radio.payload_bytes if payload_bytes is None else payload_bytes
    if d < 0:
        raise ValueError("payload must be non-negative")
    return (radio.base_ms + (d + radio.header_bytes) / radio.bytes_per_ms) * 1e-3


def report_energy_j(radio: RadioSpec, payload_bytes: int | None = None) -> float:
    return radio.tx_power_w * tx_time_s(radio, payload_bytes)


@dataclass
class DeviceState:
    radio: RadioSpec = field(default_factory=lambda: RADIOS["ble"])
    policy: str = "always"
    personal: SensorSpec = PEDOMETER
    collective: SensorSpec = GAS_SENSOR
    capacity_j: float = CAPACITY_J
    sleep_power_w: float = SLEEP_POWER_W
    battery_j: float | None = None
    credit_j: float = 0.0
    collective_active: bool = False
    collective_scheduled: int = 0
    collective_delivered: int = 0
    alive: bool = True
    depletion_time_s: float | None = None

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.battery_j is None:
            self.battery_j = self.capacity_j
        if not 0 <= self.battery_j <= self.capacity_j:
            raise ValueError("battery outside [0, capacity]")

    @property
    def policy_code(self) -> int:
        return POLICIES.index(self.policy)

    @property
    def report_j(self) -> float:
        return report_energy_j(self.radio)

    @property
    def base_power_w(self) -> float:
        """Sleep floor plus the always-on personal sensor, reports excluded."""
        return self.sleep_power_w + self.personal.avg_power_w

    def collective_cost_j(self) -> float:
        """Energy of one collective period: sensing plus that stream's reports."""
        n = self.collective.period_s / self.radio.report_period_s
        return self.collective.energy_per_period_j + n * self.report_j

    def personal_cost_j(self) -> float:
        """Personal-side consumption (incl. sleep) over one collective period."""
        p = self.base_power_w + self.report_j / self.radio.report_period_s
        return p * self.collective.period_s


def mean_consumption_w(state: DeviceState) -> float:
    """Nominal discharge rate; the collective sensor counts unless policy is default."""
    streams = 1
    p = state.base_power_w
    if state.policy != "default":
        p += state.collective.avg_power_w
        streams += 1
    return p + streams * state.report_j / state.radio.report_period_s


# --- compiled core --------------------------------------------------------

@njit(cache=True)
def gate(policy, credit, e_coll, e_pers):
    """Return (active, credit after deduction)."""
    if policy == DEFAULT:
        return False, credit
    if policy == ALWAYS:
        return True, credit
    need = e_coll if policy == POLICY1 else e_coll + e_pers
    if credit >= need:
        return True, credit - need
    return False, credit


@njit(cache=True)
def energy_update(battery, credit, active, n_reports, harvested_j, dt, p_base, p_coll,
                  e_report, capacity):
    """One step of battery/credit bookkeeping. Returns (battery, credit, consumed_j)."""
    streams = 1
    p = p_base
    if active:
        streams = 2
        p += p_coll
    consumed = p * dt + n_reports * streams * e_report
    b = battery + harvested_j - consumed
    if b > capacity:
        b = capacity
    elif b < 0.0:
        b = 0.0
    c = credit + harvested_j
    if c > capacity:
        c = capacity
    return b, c, consumed


@njit(cache=True)
def period_index(t, period):
    return math.floor(t / period + _EPS)


@njit(cache=True)
def step_calendar(k0, n_steps, dt, report_period, coll_period):
    """Report counts per step and collective-epoch flags for steps k0..k0+n_steps-1."""
    n_rep = np.empty(n_steps, np.int64)
    epoch = np.empty(n_steps, np.bool_)
    for j in range(n_steps):
        k = k0 + j
        t0 = k * dt
        n_rep[j] = period_index((k + 1) * dt, report_period) - period_index(t0, report_period)
        epoch[j] = k == 0 or period_index(t0, coll_period) != period_index((k - 1) * dt,
                                                                            coll_period)
    return n_rep, epoch


@njit(cache=True)
def energy_chunk(harvest, k0, dt, n_rep, epoch, policy, capacity, p_base, p_coll, e_report,
                 e_coll, e_pers, tail_start, battery, credit, active, alive, depletion,
                 scheduled, delivered, consumed_sum, alive_time, tail_harv, tail_cons,
                 trace, trace_every):
    """Advance every device through ``harvest.shape[1]`` steps starting at step ``k0``.

    ``harvest`` is (n_devices, n_steps) in watts; ``n_rep``/``epoch`` come from
    :func:`step_calendar`. State arrays are updated in place. ``trace``
    receives the battery level every ``trace_every`` steps.
    """
    n_dev, n_steps = harvest.shape
    for i in range(n_dev):
        b = battery[i]
        c = credit[i]
        on = active[i]
        for j in range(n_steps):
            k = k0 + j
            if trace_every > 0 and k % trace_every == 0:
                trace[k // trace_every, i] = b
            if not alive[i]:
                continue
            if policy != DEFAULT and epoch[j]:
                scheduled[i] += 1
                on, c = gate(policy, c, e_coll, e_pers)
                if on:
                    delivered[i] += 1
            h = harvest[i, j] * dt
            b, c, used = energy_update(b, c, on, n_rep[j], h, dt, p_base, p_coll, e_report,
                                       capacity)
            consumed_sum[i] += used
            alive_time[i] += dt
            if k >= tail_start:
                tail_harv[i] += h
                tail_cons[i] += used
            if b <= 0.0:
                alive[i] = False
                depletion[i] = (k + 1) * dt
        battery[i] = b
        credit[i] = c
        active[i] = on


@njit(cache=True)
def zero_harvest_lifetime(dt, capacity, p_base, e_report, report_period, max_steps):
    """Depletion time of a default (personal-only) device that never harvests."""
    b = capacity
    for k in range(max_steps):
        n_rep = period_index((k + 1) * dt, report_period) - period_index(k * dt, report_period)
        b, _, _ = energy_update(b, 0.0, False, n_rep, 0.0, dt, p_base, 0.0, e_report, capacity)
        if b <= 0.0:
            return (k + 1) * dt
    return np.nan


# --- python-level operations ----------------------------------------------

def policy_gate(state: DeviceState, window_harvest_j: float = 0.0) -> bool:
    """Decide collective activation at a collective epoch.

    ``window_harvest_j`` is credited first (pass 0 when the credit is already
    accrued step by step). Counters and credit on ``state`` are updated.
    """
    if state.policy == "default":
        state.collective_active = False
        return False
    state.credit_j = min(state.capacity_j, state.credit_j + window_harvest_j)
    on, credit = gate(state.policy_code, state.credit_j, state.collective_cost_j(),
                      state.personal_cost_j())
    state.credit_j = float(credit)
    state.collective_active = bool(on)
    state.collective_scheduled += 1
    if on:
        state.collective_delivered += 1
    return bool(on)


def reports_between(t0: float, t1: float, period: float) -> int:
    """Report instants (multiples of ``period``) in the half-open window (t0, t1]."""
    return int(period_index(t1, period) - period_index(t0, period))


def step_energy(state: DeviceState, harvested_w: float, dt_s: float,
                clock_s: float) -> DeviceState:
    """Apply one step ending at ``clock_s``; returns the updated copy."""
    if dt_s <= 0:
        raise ValueError("dt_s must be positive")
    if not state.alive:
        raise ValueError("device is depleted")
    n_rep = reports_between(clock_s - dt_s, clock_s, state.radio.report_period_s)
    active = state.collective_active and state.policy != "default"
    b, c, _ = energy_update(state.battery_j, state.credit_j, active, n_rep,
                            harvested_w * dt_s, dt_s, state.base_power_w,
                            state.collective.avg_power_w, state.report_j, state.capacity_j)
    new = replace(state, battery_j=float(b), credit_j=float(c))
    if b <= 0.0:
        new.alive = False
        new.depletion_time_s = clock_s
    return new
