"""
Radios, policies and the operator's data share
==============================================

One harvest trace per replication is shared by several device variants, so
BLE, Zigbee and LoRa, and the two credit-based participation policies, are
compared on exactly the same energy input.
"""

from wpcs import metrics
from wpcs.engine import DAY_S, ScenarioConfig, run_variants

variants = [{}, {"radio": "zigbee"}, {"radio": "lora"},
            {"policy": "policy1"}, {"policy": "policy2"}]
labels = ["ble", "zigbee", "lora", "policy1", "policy2"]

for n in (8, 32):
    config = ScenarioConfig(beacon_count=n, horizon_s=3 * DAY_S)
    records = run_variants(config, 0, variants)
    print(f"--- {n} directional beacons, 3 days")
    for label, rec in zip(labels, records):
        print(f"{label:8s} harvest {metrics.mean_harvested_power([rec]) * 1e6:6.2f} uW"
              f"  consumed {metrics.mean_consumed_power([rec]) * 1e6:7.2f} uW"
              f"  data share {metrics.data_share(rec):5.3f}")

# policy1 pays only for the collective reading and so delivers at least as
# much data as policy2, which also wants its personal stream covered.
