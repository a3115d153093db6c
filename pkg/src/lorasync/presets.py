"""Canonical built-in scenario.

The two-device bench pairs a wobbly crystal ("feather-like") with a
stable one ("ttgo-like") on the published slot geometry: 306 ms uplink,
1 s receive delay, 91 ms downlink, symmetric 180 ms guards, 1757 ms
slot, 30 s transmit period, 6.5 hours.  configs/testbench.ini in the
repository mirrors this scenario exactly.
"""

from __future__ import annotations

from .clock import preset
from .protocol import ADAPTIVE
from .sim import DeviceSpec, Scenario
from .slot import SlotConfig
from .units import ms_to_ns

DEFAULT_SEED = 3

TESTBENCH_SLOT = SlotConfig(
    t_tx_ns=ms_to_ns(306),
    rx_delay_ns=ms_to_ns(1000),
    t_rx_ns=ms_to_ns(91),
    tb1_ns=ms_to_ns(180),
    tb2_ns=ms_to_ns(180),
)


def testbench_scenario(
    seed: int = DEFAULT_SEED,
    strategy: str = ADAPTIVE,
    round_s: int | None = None,
) -> Scenario:
    devices = (
        DeviceSpec(name="feather", clock_model=preset("feather-like"), tx_period_s=30.0,
                   payload_bytes=193),
        DeviceSpec(name="ttgo", clock_model=preset("ttgo-like"), tx_period_s=30.0,
                   payload_bytes=193),
    )
    return Scenario(
        duration_s=23400.0,
        cfg=TESTBENCH_SLOT,
        devices=devices,
        strategy=strategy,
        round_s=round_s,
        seed=seed,
    )
