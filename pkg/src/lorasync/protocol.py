"""Server-side monitoring and device-side resynchronization.

The network server never initiates traffic.  It watches where each uplink
ends inside the slot grid; while a device is in-sync the ACK stays empty,
and the moment it is not, the ACK carries the remaining time to the next
slot boundary (2 bytes).  The device reconstructs the boundary from that
single number plus two local timestamps:

    beg      local time when its uplink ended
    end      local time when the ACK finished arriving
    t        remaining - (end - beg), wrapped into [0, t_slot) if negative
    slot_start <- end + t

No retransmission state is kept: a lost ACK just means the device shows
up out-of-sync again and the next ACK corrects it.

The fixed-rate baseline reuses the same machinery but resynchronizes
every device once per round, unconditionally, at 8 bytes a piece.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .clock import SimClock
from .errors import UsageError
from .frame import SyncAck
from .slot import (
    SlotConfig,
    TimelineRef,
    position_in_slot,
    remaining_to_next_slot,
    uplink_end_in_sync,
)
from .units import NS_PER_MS, ns_to_ms_round

ADAPTIVE = "adaptive"
FIXED_RATE = "fixed_rate"


@dataclass
class DeviceRecord:
    """What the server remembers about one device."""

    last_signed_drift_ns: int | None = None
    resync_count: int = 0
    out_sync_count: int = 0
    last_seen_fcnt: int | None = None
    resync_pending: bool = False  # fixed-rate strategy only


@dataclass
class NetworkServerState:
    ref: TimelineRef
    cfg: SlotConfig
    strategy: str = ADAPTIVE
    records: dict[int, DeviceRecord] = field(default_factory=dict)


@dataclass(frozen=True)
class AckPlan:
    """One ACK the server intends to send at the RX1 opening."""

    dev_addr: int
    remaining_ms: int | None
    scheduled_tx_true_time_ns: int


@dataclass(frozen=True)
class ResyncAction:
    dev_addr: int
    last_signed_drift_ns: int | None


@dataclass
class EndDeviceState:
    clock: SimClock
    tx_period_ns: int
    t_slot_ns: int
    is_first_tx: bool = False
    slot_start_local_ns: int | None = None
    last_uplink_start_local_ns: int | None = None


def ns_on_uplink_end(
    s: NetworkServerState,
    dev_addr: int,
    arrival_true_ns: int,
    fcnt: int | None = None,
) -> AckPlan:
    """Judge one finished uplink and plan its ACK.

    Unknown devices auto-register.  Under the adaptive strategy the
    remaining time is attached exactly when the frame is out-of-sync;
    under the fixed-rate baseline only when a round boundary flagged the
    device.
    """
    if arrival_true_ns < s.ref.ref_ns:
        raise UsageError("arrival precedes the timeline reference")
    rec = s.records.setdefault(dev_addr, DeviceRecord())
    pos = position_in_slot(arrival_true_ns, s.ref, s.cfg)
    in_sync, signed_drift = uplink_end_in_sync(pos, s.cfg)
    rec.last_signed_drift_ns = signed_drift
    if fcnt is not None:
        rec.last_seen_fcnt = fcnt
    if not in_sync:
        rec.out_sync_count += 1

    remaining_ms = None
    if s.strategy == ADAPTIVE:
        if not in_sync:
            remaining_ms = ns_to_ms_round(remaining_to_next_slot(arrival_true_ns, s.ref, s.cfg))
            rec.resync_count += 1
    elif rec.resync_pending:
        remaining_ms = ns_to_ms_round(remaining_to_next_slot(arrival_true_ns, s.ref, s.cfg))
        rec.resync_pending = False
    return AckPlan(dev_addr, remaining_ms, arrival_true_ns + s.cfg.rx_delay_ns)


def fixed_rate_round(s: NetworkServerState, round_s) -> list[ResyncAction]:
    """Round boundary of the fixed-rate baseline.

    Every registered device gets flagged for an unconditional resync on
    its next uplink; its drift at round end is reported for logging.
    """
    if round_s <= 0:
        raise UsageError("round length must be positive")
    actions = []
    for dev_addr in sorted(s.records):
        rec = s.records[dev_addr]
        rec.resync_count += 1
        rec.resync_pending = True
        actions.append(ResyncAction(dev_addr, rec.last_signed_drift_ns))
    return actions


def ed_mark_transmitting(d: EndDeviceState, tx_start_local_ns: int):
    """Record an uplink start; the first one bootstraps the local grid."""
    if not d.is_first_tx:
        d.is_first_tx = True
        d.slot_start_local_ns = tx_start_local_ns
    d.last_uplink_start_local_ns = tx_start_local_ns


def ed_next_tx_time(d: EndDeviceState, now_local_ns: int) -> int:
    """Next transmission instant on the device's local clock.

    Before the first transmission that is simply now.  Afterwards it is
    the earliest grid point slot_start + k*t_slot at least one tx_period
    after the previous uplink (periods effectively round up to the grid).
    """
    if not d.is_first_tx:
        return now_local_ns
    target = now_local_ns
    if d.last_uplink_start_local_ns is not None:
        target = max(target, d.last_uplink_start_local_ns + d.tx_period_ns)
    k = -((d.slot_start_local_ns - target) // d.t_slot_ns)
    if k < 0:
        k = 0
    return d.slot_start_local_ns + k * d.t_slot_ns


def ed_on_ack(d: EndDeviceState, beg_local_ns: int, end_local_ns: int, ack: SyncAck):
    """Apply one received ACK.

    beg is the local timestamp of the own uplink's end, end the local
    timestamp of the ACK's end.  An empty ACK changes nothing.
    """
    if end_local_ns < beg_local_ns:
        raise UsageError("ACK cannot end before the uplink it answers")
    if ack.remaining_ms is None:
        return
    elapsed = end_local_ns - beg_local_ns
    t = ack.remaining_ms * NS_PER_MS - elapsed
    if t < 0:
        t %= d.t_slot_ns
    d.slot_start_local_ns = end_local_ns + t
