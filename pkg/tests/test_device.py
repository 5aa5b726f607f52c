import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import ble_numbers, consumption_w
from wpcs import device as dev
from wpcs.device import (CAPACITY_J, RADIOS, DeviceState, SensorSpec, energy_chunk,
                         energy_update, mean_consumption_w, policy_gate, report_energy_j,
                         reports_between, step_calendar, step_energy, tx_time_s,
                         zero_harvest_lifetime)

BLE = ble_numbers()


def test_tx_time():
    assert tx_time_s(RADIOS["ble"]) == pytest.approx(0.486e-3, abs=1e-6)
    assert tx_time_s(RADIOS["lora"]) == pytest.approx(9.015e-3, abs=1e-6)
    assert tx_time_s(RADIOS["zigbee"]) == pytest.approx(2.504e-3, abs=1e-6)
    assert tx_time_s(RADIOS["ble"], 0) == pytest.approx(0.23e-3, abs=1e-9)
    with pytest.raises(ValueError):
        tx_time_s(RADIOS["ble"], -1)


def test_report_energy():
    assert report_energy_j(RADIOS["ble"]) == pytest.approx(8.894e-6, rel=5e-3)
    assert report_energy_j(RADIOS["ble"]) == pytest.approx(BLE["report_j"], rel=1e-12)
    assert report_energy_j(RADIOS["lora"]) == pytest.approx(360.6e-6, rel=1e-3)
    assert report_energy_j(RADIOS["zigbee"]) == pytest.approx(45.82e-6, rel=1e-3)


def test_mean_consumption():
    assert mean_consumption_w(DeviceState(policy="default")) == pytest.approx(31.28e-6, rel=1e-3)
    assert mean_consumption_w(DeviceState()) == pytest.approx(41.06e-6, rel=1e-3)
    lora = DeviceState(radio=RADIOS["lora"])
    assert mean_consumption_w(lora) == pytest.approx(181.7e-6, rel=1e-3)
    for radio in RADIOS:
        for coll in (True, False):
            s = DeviceState(radio=RADIOS[radio], policy="always" if coll else "default")
            assert mean_consumption_w(s) == pytest.approx(consumption_w(radio, collective=coll),
                                                          rel=1e-12)


def test_sensor_spec():
    assert dev.PEDOMETER.avg_power_w == 28.5e-6
    assert dev.GAS_SENSOR.avg_power_w == pytest.approx(8e-6)
    with pytest.raises(ValueError):
        SensorSpec("x", 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        SensorSpec("x", 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        DeviceState(policy="sometimes")
    with pytest.raises(ValueError):
        DeviceState(battery_j=40.0)


def test_policy_costs():
    s = DeviceState(policy="policy1")
    assert s.collective_cost_j() == pytest.approx(BLE["e_coll_j"], rel=1e-12)
    assert s.personal_cost_j() == pytest.approx(BLE["e_pers_j"], rel=1e-12)


def test_policy_gate():
    s = DeviceState(policy="policy1")
    assert not policy_gate(s)
    assert s.collective_scheduled == 1 and s.collective_delivered == 0
    e = s.collective_cost_j()
    s.credit_j = 2 * e
    assert policy_gate(s)
    assert s.credit_j == pytest.approx(e)
    assert s.collective_delivered == 1

    p2 = DeviceState(policy="policy2")
    need = p2.collective_cost_j() + p2.personal_cost_j()
    p2.credit_j = need * (1 - 1e-12)
    assert not policy_gate(p2)
    assert policy_gate(p2, window_harvest_j=need * 1e-12)
    assert p2.credit_j == pytest.approx(0.0, abs=1e-15)

    assert not policy_gate(DeviceState(policy="default", credit_j=1.0))
    assert policy_gate(DeviceState(policy="always"))


def test_step_energy_equilibrium_and_clamp():
    s = DeviceState(policy="default", battery_j=20.0)
    p = mean_consumption_w(s)
    # one 5 s step ending on a report instant carries exactly one report
    out = step_energy(s, p, 5.0, 5.0)
    assert out.battery_j == pytest.approx(20.0, abs=1e-12)
    full = step_energy(DeviceState(), 1e-3, 1.0, 1.0)
    assert full.battery_j == CAPACITY_J
    assert full.credit_j == pytest.approx(1e-3)
    with pytest.raises(ValueError):
        step_energy(s, 0.0, 0.0, 1.0)


def test_step_energy_depletion():
    s = DeviceState(battery_j=1e-6)
    out = step_energy(s, 0.0, 1.0, 42.0)
    assert not out.alive and out.battery_j == 0.0 and out.depletion_time_s == 42.0
    with pytest.raises(ValueError):
        step_energy(out, 0.0, 1.0, 43.0)


def test_reports_between():
    assert reports_between(0.0, 5.0, 5.0) == 1
    assert reports_between(4.9, 5.0, 5.0) == 1
    assert reports_between(5.0, 9.9, 5.0) == 0
    assert reports_between(0.0, 100.0, 5.0) == 20


def test_step_calendar():
    n_rep, epoch = step_calendar(0, 2000, 0.1, 5.0, 100.0)
    assert n_rep.sum() == 40
    assert np.flatnonzero(n_rep).tolist() == [50 * k - 1 for k in range(1, 41)]
    assert np.flatnonzero(epoch).tolist() == [0, 1000]
    n_rep, epoch = step_calendar(0, 3, 7.0, 5.0, 100.0)
    assert n_rep.tolist() == [1, 1, 2] and epoch.tolist() == [True, False, False]


def test_zero_harvest_lifetime():
    s = DeviceState(policy="default")
    t = zero_harvest_lifetime(1.0, s.capacity_j, s.base_power_w, s.report_j, 5.0, 10**7)
    assert t == pytest.approx(CAPACITY_J / BLE["default_w"], rel=5e-3)
    assert t / 86400 == pytest.approx(13.95, abs=0.01)
    for radio in RADIOS:
        s = DeviceState(radio=RADIOS[radio], policy="default")
        t = zero_harvest_lifetime(1.0, s.capacity_j, s.base_power_w, s.report_j, 5.0, 10**8)
        assert t == pytest.approx(CAPACITY_J / mean_consumption_w(s), rel=5e-3)


@settings(max_examples=200, deadline=None)
@given(b=st.floats(0, CAPACITY_J), c=st.floats(0, CAPACITY_J), active=st.booleans(),
       n=st.integers(0, 3), h=st.floats(0, 0.05), dt=st.floats(0.01, 10.0))
def test_energy_update_conservation(b, c, active, n, h, dt):
    s = DeviceState()
    b2, c2, used = energy_update(b, c, active, n, h, dt, s.base_power_w,
                                 s.collective.avg_power_w, s.report_j, CAPACITY_J)
    assert 0.0 <= b2 <= CAPACITY_J
    assert 0.0 <= c2 <= CAPACITY_J
    raw = b + h - used
    if 0.0 < raw < CAPACITY_J:
        assert b2 - b == pytest.approx(h - used, abs=1e-12 * CAPACITY_J)
    assert used == pytest.approx((s.base_power_w + active * s.collective.avg_power_w) * dt
                                 + n * (1 + active) * s.report_j, rel=1e-12)


def _chunk(policy, harvest, n_rep, epoch, state):
    n = harvest.shape[0]
    st_ = dict(battery=np.full(n, CAPACITY_J), credit=np.zeros(n), active=np.zeros(n, bool),
               alive=np.ones(n, bool), depletion=np.full(n, np.nan),
               scheduled=np.zeros(n, np.int64), delivered=np.zeros(n, np.int64),
               consumed=np.zeros(n), alive_time=np.zeros(n), tail_h=np.zeros(n),
               tail_c=np.zeros(n))
    energy_chunk(harvest, 0, 1.0, n_rep, epoch, policy, CAPACITY_J, state.base_power_w,
                 state.collective.avg_power_w, state.report_j, state.collective_cost_j(),
                 state.personal_cost_j(), 0, st_["battery"], st_["credit"], st_["active"],
                 st_["alive"], st_["depletion"], st_["scheduled"], st_["delivered"],
                 st_["consumed"], st_["alive_time"], st_["tail_h"], st_["tail_c"],
                 np.zeros((0, n)), 0)
    return st_


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), scale=st.floats(0, 2e-4))
def test_policy1_delivers_at_least_policy2(seed, scale):
    rng = np.random.default_rng(seed)
    harvest = rng.exponential(scale, size=(5, 3000)) * (rng.random((5, 3000)) < 0.3)
    n_rep, epoch = step_calendar(0, 3000, 1.0, 5.0, 100.0)
    s = DeviceState()
    r1 = _chunk(dev.POLICY1, harvest, n_rep, epoch, s)
    r2 = _chunk(dev.POLICY2, harvest, n_rep, epoch, s)
    assert np.all(r1["delivered"] >= r2["delivered"])
    for r in (r1, r2):
        assert np.all(r["delivered"] <= r["scheduled"])
        assert np.all((r["battery"] >= 0) & (r["battery"] <= CAPACITY_J))


def test_chunk_matches_step_energy():
    rng = np.random.default_rng(1)
    harvest = rng.uniform(0, 1e-4, size=(1, 500))
    n_rep, epoch = step_calendar(0, 500, 1.0, 5.0, 100.0)
    s = DeviceState(policy="default")
    r = _chunk(dev.DEFAULT, harvest, n_rep, epoch, s)
    ref = DeviceState(policy="default")
    for k in range(500):
        ref = step_energy(ref, harvest[0, k], 1.0, k + 1.0)
    assert r["battery"][0] == pytest.approx(ref.battery_j, rel=1e-12)
    assert r["credit"][0] == pytest.approx(ref.credit_j, rel=1e-12)
