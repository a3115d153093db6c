"""Slot synchronization for class-A LoRaWAN devices.

Protocol library plus a deterministic discrete-event simulator: LoRa
air-time math, drifting-clock models, slot-grid arithmetic, the minimal
uplink/ACK wire codec, the adaptive resynchronization protocol and its
fixed-rate baseline.
"""

from .airtime import (
    AirTime,
    RadioParams,
    payload_symbol_count,
    remaining_time_bit_width,
    symbol_duration_ns,
    time_on_air,
)
from .clock import ConstantPpm, Ideal, Piecewise, RandomWalk, SimClock, is_in_sync, preset
from .config import load_scenario, parse_scenario
from .errors import (
    ConfigError,
    DecodeError,
    EncodeError,
    LorasyncError,
    ParamError,
    UsageError,
)
from .frame import SyncAck, UplinkFrame, decode_ack, decode_uplink, encode_ack, encode_uplink
from .presets import DEFAULT_SEED, TESTBENCH_SLOT, testbench_scenario
from .protocol import (
    ADAPTIVE,
    FIXED_RATE,
    AckPlan,
    EndDeviceState,
    NetworkServerState,
    ed_next_tx_time,
    ed_on_ack,
    fixed_rate_round,
    ns_on_uplink_end,
)
from .sim import (
    DeviceMetrics,
    DeviceSpec,
    GatewayMetrics,
    Metrics,
    Scenario,
    TraceRow,
    detect_violation,
    duty_cycle_report,
    run,
    validate_scenario,
)
from .slot import (
    SlotConfig,
    TimelineRef,
    position_in_slot,
    remaining_to_next_slot,
    slot_start,
    uplink_end_in_sync,
)
from .units import ms_to_ns, ns_to_ms_round, s_to_ns

__version__ = "0.1.0"
