"""Result records and the harvested-power, lifetime, sustainability and data-share metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

SUSTAINABLE_SHARE = 0.95
Z95 = 1.96

DEPLETED = "depleted"
SUSTAINABLE = "sustainable"
CENSORED = "censored"
UNDEFINED = "undefined"


@dataclass
class RunRecord:
    config: Any
    replication: int
    seed: int
    horizon_s: float
    n_steps: int
    mean_harvested_w: np.ndarray
    mean_consumed_w: np.ndarray
    depletion_time_s: np.ndarray  # nan where the battery never emptied
    sustainable: np.ndarray
    collective_scheduled: np.ndarray
    collective_delivered: np.ndarray
    final_battery_j: np.ndarray
    baseline_lifetime_s: float
    layout_signature: tuple = ()
    soc_trace: np.ndarray | None = None
    soc_trace_times_s: np.ndarray | None = None

    @property
    def n_devices(self) -> int:
        return len(self.mean_harvested_w)

    def lifetimes_s(self) -> np.ndarray:
        """Per-device lifetime with non-depleted devices capped at the horizon."""
        return np.where(np.isnan(self.depletion_time_s), self.horizon_s, self.depletion_time_s)


@dataclass(frozen=True)
class Lifetime:
    seconds: float
    status: str

    @property
    def finite(self) -> bool:
        return self.status == DEPLETED


@dataclass
class SweepRecord:
    key: str
    values: list
    mean: dict[str, np.ndarray] = field(default_factory=dict)
    half_width: dict[str, np.ndarray] = field(default_factory=dict)

    def series(self, metric):
        return np.asarray(self.mean[metric]), np.asarray(self.half_width[metric])


def mean_harvested_power(records: Sequence[RunRecord]) -> float:
    """Average over time, then over users, then over replications."""
    if not records:
        raise ValueError("need at least one record")
    return float(np.mean([np.mean(r.mean_harvested_w) if r.n_devices else 0.0
                          for r in records]))


def mean_consumed_power(records: Sequence[RunRecord]) -> float:
    return float(np.mean([np.mean(r.mean_consumed_w) for r in records]))


def lifetime_s(record: RunRecord, device: int) -> Lifetime:
    if record.n_steps == 0:
        return Lifetime(float("nan"), UNDEFINED)
    t = record.depletion_time_s[device]
    if not np.isnan(t):
        return Lifetime(float(t), DEPLETED)
    if record.sustainable[device]:
        return Lifetime(record.horizon_s, SUSTAINABLE)
    return Lifetime(record.horizon_s, CENSORED)


def sustainable_fraction(records: Sequence[RunRecord]) -> float:
    return float(np.mean(np.concatenate([np.asarray(r.sustainable, dtype=float)
                                         for r in records])))


def mean_lifetime_s(records: Sequence[RunRecord]) -> float:
    return float(np.mean([np.mean(r.lifetimes_s()) for r in records]))


def lifetime_gain(wpcs_records: Sequence[RunRecord],
                  default_records: Sequence[RunRecord] | None = None) -> float:
    """Mean WPCS lifetime over mean default lifetime.

    Devices that never deplete enter at the horizon (check
    :func:`sustainable_fraction` for how many). Without ``default_records``
    the baseline lifetime carried by each WPCS record is used.
    """
    num = mean_lifetime_s(wpcs_records)
    if default_records is None:
        den = float(np.mean([r.baseline_lifetime_s for r in wpcs_records]))
    else:
        if any(np.isnan(r.depletion_time_s).any() for r in default_records):
            raise ValueError("default lifetime must be finite")
        den = mean_lifetime_s(default_records)
    if not np.isfinite(den) or den <= 0:
        raise ValueError("default lifetime must be finite")
    return num / den


def data_share(record: RunRecord) -> float:
    sched = int(np.sum(record.collective_scheduled))
    if sched == 0:
        return 0.0
    return int(np.sum(record.collective_delivered)) / sched


def mean_ci(values) -> tuple[float, float]:
    """Mean and normal-approximation 95% half-width ``1.96 s / sqrt(R)``."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return float("nan"), float("nan")
    if v.size == 1:
        return float(v[0]), 0.0
    return float(v.mean()), float(Z95 * v.std(ddof=1) / np.sqrt(v.size))


def record_summary(record: RunRecord) -> dict[str, float]:
    """Per-replication scalars used by sweeps, CSV rows and comparisons."""
    return {
        "mean_harvested_w": mean_harvested_power([record]),
        "mean_consumed_w": mean_consumed_power([record]),
        "lifetime_s": mean_lifetime_s([record]),
        "sustainable": sustainable_fraction([record]),
        "lifetime_gain": lifetime_gain([record]),
        "data_share": data_share(record),
    }


def build_sweep(key: str, values, records_per_value) -> SweepRecord:
    sweep = SweepRecord(key, list(values))
    rows = [[record_summary(r) for r in recs] for recs in records_per_value]
    for metric in rows[0][0]:
        stats = [mean_ci([row[metric] for row in recs]) for recs in rows]
        sweep.mean[metric] = np.array([s[0] for s in stats])
        sweep.half_width[metric] = np.array([s[1] for s in stats])
    return sweep


def sustainability_density(sweep: SweepRecord, share: float = SUSTAINABLE_SHARE):
    """Smallest swept value at which at least ``share`` of devices are sustainable."""
    values = list(sweep.values)
    if any(b < a for a, b in zip(values, values[1:])):
        raise ValueError("sweep axis must be monotone")
    for value, frac in zip(values, sweep.mean["sustainable"]):
        if frac >= share:
            return value
    return None
