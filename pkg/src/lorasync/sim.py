"""Deterministic discrete-event execution of synchronization scenarios.

Everything runs on virtual time.  Events are popped from a heap keyed by
(time, insertion sequence), so identical (scenario, seed) pairs replay
bit for bit.  One uplink unfolds as

    uplink_start -> uplink_end -> rx1_open -> ack_end

with the server judged at uplink_end and the device applying the ACK and
scheduling its next transmission at ack_end.  Device transmit decisions
happen on the device's local clock and are mapped to reference time
through the clock's inverse; transmit instants are whole local
milliseconds, matching the millisecond tick of the wire format.

The medium is lossless by default: collisions are counted as time
overlaps between uplinks but do not destroy frames.  An optional uniform
downlink loss exercises the protocol's self-correction.
"""

from __future__ import annotations

import heapq
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field, replace

from .clock import ClockModel, RandomWalk, SimClock
from .errors import ConfigError, ParamError
from .frame import (
    SYNC_FPORT,
    SyncAck,
    UplinkFrame,
    decode_ack,
    decode_uplink,
    encode_ack,
    encode_uplink,
)
from .protocol import (
    ADAPTIVE,
    FIXED_RATE,
    EndDeviceState,
    NetworkServerState,
    ed_mark_transmitting,
    ed_next_tx_time,
    ed_on_ack,
    fixed_rate_round,
    ns_on_uplink_end,
)
from .slot import SlotConfig, TimelineRef, position_in_slot, uplink_end_in_sync
from .units import NS_PER_MS, NS_PER_S, s_to_ns

SLOT_PICK_RANDOM = "random"
SLOT_PICK_ALIGNED = "aligned"

ADAPTIVE_SYNC_BYTES = 2
FIXED_RATE_SYNC_BYTES = 8

_MAX_UPLINK_PAYLOAD = 246  # 255-byte frame minus the 9-byte header

_UPLINK_START = 0
_UPLINK_END = 1
_RX1_OPEN = 2
_ACK_END = 3
_ROUND_BOUNDARY = 4


@dataclass(frozen=True)
class DeviceSpec:
    name: str
    clock_model: ClockModel
    tx_period_s: float
    payload_bytes: int = 0
    dev_addr: int | None = None


@dataclass(frozen=True)
class Scenario:
    duration_s: float
    cfg: SlotConfig
    devices: tuple[DeviceSpec, ...]
    strategy: str = ADAPTIVE
    round_s: int | None = None
    seed: int = 0
    duty_cycle_limit: float = 0.01
    downlink_loss: float = 0.0
    slot_pick: str = SLOT_PICK_RANDOM


@dataclass(frozen=True)
class TraceRow:
    """One finished uplink as the server saw it."""

    frame_index: int
    device_id: str
    true_time_ns: int  # uplink end, reference clock
    arrival_position_ns: int
    signed_drift_ns: int
    in_sync: bool
    action: str  # "none" | "resync"
    remaining_ms: int | None
    strategy: str


@dataclass
class DeviceMetrics:
    resync_count: int = 0
    out_sync_frames: int = 0
    slot_violations: int = 0
    drift_series: list = field(default_factory=list)  # (true_ns, signed_drift_ns)


@dataclass
class GatewayMetrics:
    downlink_count: int = 0
    sync_overhead_bytes: int = 0
    downlink_airtime_ns: int = 0
    duty_cycle_used_fraction: float = 0.0
    downlink_intervals: list = field(default_factory=list)  # (start_ns, end_ns)


@dataclass
class Metrics:
    duration_ns: int
    strategy: str
    per_device: dict
    gateway: GatewayMetrics
    collision_count: int = 0
    frames_total: int = 0
    round_log: list = field(default_factory=list)  # (true_ns, device, drift_ns|None)


def validate_scenario(sc: Scenario):
    if sc.duration_s <= 0:
        raise ConfigError("duration_s must be positive")
    if not sc.devices:
        raise ConfigError("scenario needs at least one device")
    names = [d.name for d in sc.devices]
    if len(set(names)) != len(names):
        raise ConfigError("device names must be unique")
    fixed_addrs = [d.dev_addr for d in sc.devices if d.dev_addr is not None]
    if len(set(fixed_addrs)) != len(fixed_addrs):
        raise ConfigError("dev_addr values must be unique")
    if sc.strategy not in (ADAPTIVE, FIXED_RATE):
        raise ConfigError(f"unknown strategy {sc.strategy!r}")
    if sc.strategy == FIXED_RATE and (sc.round_s is None or sc.round_s <= 0):
        raise ConfigError("fixed_rate strategy needs round_s > 0")
    if not 0.0 <= sc.downlink_loss <= 1.0:
        raise ConfigError("downlink_loss must be in [0, 1]")
    if not 0.0 < sc.duty_cycle_limit <= 1.0:
        raise ConfigError("duty_cycle_limit must be in (0, 1]")
    if sc.slot_pick not in (SLOT_PICK_RANDOM, SLOT_PICK_ALIGNED):
        raise ConfigError(f"unknown slot_pick {sc.slot_pick!r}")
    for d in sc.devices:
        if d.tx_period_s <= 0:
            raise ConfigError(f"device {d.name}: tx_period_s must be positive")
        if not 0 <= d.payload_bytes <= _MAX_UPLINK_PAYLOAD:
            raise ConfigError(
                f"device {d.name}: payload_bytes must be in 0..{_MAX_UPLINK_PAYLOAD}"
            )
        if d.dev_addr is not None and not 0 <= d.dev_addr < (1 << 32):
            raise ConfigError(f"device {d.name}: dev_addr must fit in 32 bits")


def detect_violation(arrival_pos_ns: int, cfg: SlotConfig) -> bool:
    """Guard exceedance: the frame strayed outside its slot's tolerance."""
    in_sync, _ = uplink_end_in_sync(arrival_pos_ns, cfg)
    return not in_sync


class _DeviceRt:
    """Mutable per-device simulation state."""

    __slots__ = (
        "idx",
        "name",
        "addr",
        "clock",
        "state",
        "rng",
        "payload",
        "fcnt",
        "down_fcnt",
        "beg_local_ns",
        "period_ns",
        "next_window_start_ns",
    )

    def __init__(self, idx, name, addr, clock, state, rng, payload, period_ns):
        self.idx = idx
        self.name = name
        self.addr = addr
        self.clock = clock
        self.state = state
        self.rng = rng
        self.payload = payload
        self.fcnt = 0
        self.down_fcnt = 0
        self.beg_local_ns = 0
        self.period_ns = period_ns
        self.next_window_start_ns = 0


def run(scenario: Scenario) -> tuple[Metrics, list[TraceRow]]:
    """Execute one scenario; returns (metrics, trace rows in time order)."""
    validate_scenario(scenario)
    cfg = scenario.cfg
    duration_ns = s_to_ns(scenario.duration_s)
    ref = TimelineRef(0)
    server = NetworkServerState(ref, cfg, strategy=scenario.strategy)
    master = random.Random(scenario.seed)

    devices: list[_DeviceRt] = []
    used_addrs = {d.dev_addr for d in scenario.devices if d.dev_addr is not None}
    next_auto = 1
    for idx, spec in enumerate(scenario.devices):
        # one master draw per device keeps clock realizations and phases
        # paired across strategy variants of the same scenario seed
        dev_master = random.Random(master.getrandbits(64))
        sched_rng = random.Random(dev_master.getrandbits(64))
        clock_seed = dev_master.getrandbits(64)
        model = spec.clock_model
        if isinstance(model, RandomWalk) and model.seed is None:
            model = replace(model, seed=clock_seed)
        addr = spec.dev_addr
        if addr is None:
            while next_auto in used_addrs:
                next_auto += 1
            addr = next_auto
            used_addrs.add(addr)
        period_ns = s_to_ns(spec.tx_period_s)
        state = EndDeviceState(
            clock=SimClock(model), tx_period_ns=period_ns, t_slot_ns=cfg.t_slot_ns
        )
        devices.append(
            _DeviceRt(
                idx,
                spec.name,
                addr,
                state.clock,
                state,
                sched_rng,
                bytes(spec.payload_bytes),
                period_ns,
            )
        )
    loss_rng = random.Random(master.getrandbits(64))
    name_of = {d.addr: d.name for d in devices}

    metrics = Metrics(
        duration_ns=duration_ns,
        strategy=scenario.strategy,
        per_device={d.name: DeviceMetrics() for d in devices},
        gateway=GatewayMetrics(),
    )
    trace: list[TraceRow] = []

    heap: list = []
    seq = 0

    def push(t, kind, payload):
        nonlocal seq
        heapq.heappush(heap, (t, seq, kind, payload))
        seq += 1

    def schedule_uplink(dev: _DeviceRt, tx_local_ns: int):
        tx_true = dev.clock.true_time_at_local(tx_local_ns)
        if tx_true + cfg.t_tx_ns <= duration_ns:  # only complete frames
            push(tx_true, _UPLINK_START, (dev.idx, tx_local_ns))

    def schedule_next_uplink(dev: _DeviceRt, now_local_ns: int):
        d = dev.state
        if scenario.slot_pick == SLOT_PICK_RANDOM:
            # uniform slot pick inside this device's next period window
            lo = max(dev.next_window_start_ns, now_local_ns)
            hi = dev.next_window_start_ns + dev.period_ns
            dev.next_window_start_ns += dev.period_ns
            s0 = d.slot_start_local_ns
            k0 = -((s0 - lo) // d.t_slot_ns)
            if k0 < 0:
                k0 = 0
            first = s0 + k0 * d.t_slot_ns
            if first >= hi:
                nxt = first  # no grid point in the window: earliest after it
            else:
                n_slots = 1 + (hi - 1 - first) // d.t_slot_ns
                nxt = first + dev.rng.randrange(n_slots) * d.t_slot_ns
        else:
            dev.next_window_start_ns += dev.period_ns
            nxt = ed_next_tx_time(d, now_local_ns)
        schedule_uplink(dev, nxt)

    # bootstrap: each device first transmits at a uniform whole-millisecond
    # phase inside its first period window, on its own clock
    for dev in devices:
        period_ms = max(1, dev.period_ns // NS_PER_MS)
        phase_local = dev.rng.randrange(period_ms) * NS_PER_MS
        dev.next_window_start_ns = phase_local + dev.period_ns
        schedule_uplink(dev, phase_local)

    if scenario.strategy == FIXED_RATE:
        round_ns = scenario.round_s * NS_PER_S
        for k in range(1, duration_ns // round_ns + 1):
            push(k * round_ns, _ROUND_BOUNDARY, ())

    active_ends: list[tuple[int, int]] = []  # (end_ns, dev_idx) of in-flight uplinks

    while heap:
        t, _, kind, payload = heapq.heappop(heap)
        if t > duration_ns:
            break

        if kind == _UPLINK_START:
            idx, tx_local = payload
            dev = devices[idx]
            active_ends = [(e, i) for e, i in active_ends if e > t]
            metrics.collision_count += len(active_ends)  # one per overlapping pair
            active_ends.append((t + cfg.t_tx_ns, idx))
            ed_mark_transmitting(dev.state, tx_local)
            push(t + cfg.t_tx_ns, _UPLINK_END, (idx,))

        elif kind == _UPLINK_END:
            (idx,) = payload
            dev = devices[idx]
            dev.beg_local_ns = dev.clock.local_time(t)
            wire = encode_uplink(UplinkFrame(dev.addr, dev.fcnt, SYNC_FPORT, dev.payload))
            up = decode_uplink(wire)
            dev.fcnt = (dev.fcnt + 1) & 0xFFFF
            plan = ns_on_uplink_end(server, up.dev_addr, t, fcnt=up.fcnt)
            pos = position_in_slot(t, ref, cfg)
            in_sync, signed_drift = uplink_end_in_sync(pos, cfg)
            dm = metrics.per_device[dev.name]
            dm.drift_series.append((t, signed_drift))
            if not in_sync:
                dm.out_sync_frames += 1
            if detect_violation(pos, cfg):
                dm.slot_violations += 1
            action = "none" if plan.remaining_ms is None else "resync"
            if scenario.strategy == ADAPTIVE and plan.remaining_ms is not None:
                metrics.gateway.sync_overhead_bytes += ADAPTIVE_SYNC_BYTES
            trace.append(
                TraceRow(
                    metrics.frames_total,
                    dev.name,
                    t,
                    pos,
                    signed_drift,
                    in_sync,
                    action,
                    plan.remaining_ms,
                    scenario.strategy,
                )
            )
            metrics.frames_total += 1
            push(plan.scheduled_tx_true_time_ns, _RX1_OPEN, (idx, plan.remaining_ms))

        elif kind == _RX1_OPEN:
            idx, remaining_ms = payload
            dev = devices[idx]
            gw = metrics.gateway
            gw.downlink_count += 1
            gw.downlink_airtime_ns += cfg.t_rx_ns
            gw.downlink_intervals.append((t, t + cfg.t_rx_ns))
            wire = encode_ack(SyncAck(dev.addr, dev.down_fcnt, remaining_ms))
            dev.down_fcnt = (dev.down_fcnt + 1) & 0xFFFF
            delivered = True
            if scenario.downlink_loss > 0.0:
                delivered = loss_rng.random() >= scenario.downlink_loss
            push(t + cfg.t_rx_ns, _ACK_END, (idx, wire if delivered else None))

        elif kind == _ACK_END:
            idx, wire = payload
            dev = devices[idx]
            end_local = dev.clock.local_time(t)
            if wire is not None:
                ed_on_ack(dev.state, dev.beg_local_ns, end_local, decode_ack(wire))
            # a lost ACK changes nothing: the device keeps its grid and
            # simply schedules the next uplink
            schedule_next_uplink(dev, end_local)

        else:  # _ROUND_BOUNDARY
            actions = fixed_rate_round(server, scenario.round_s)
            for a in actions:
                metrics.round_log.append((t, name_of[a.dev_addr], a.last_signed_drift_ns))
            metrics.gateway.sync_overhead_bytes += FIXED_RATE_SYNC_BYTES * len(actions)

    for dev in devices:
        rec = server.records.get(dev.addr)
        if rec is not None:
            metrics.per_device[dev.name].resync_count = rec.resync_count
    metrics.gateway.duty_cycle_used_fraction = (
        metrics.gateway.downlink_airtime_ns / duration_ns
    )
    return metrics, trace


def duty_cycle_report(m: Metrics, window_s) -> float:
    """Worst sliding-window fraction of gateway downlink air-time.

    Windows of the given length slide over the run; the maximum overlap
    is always achieved with a window flush against some transmission
    edge, so only those candidates are evaluated.  Intervals are uniform
    length and time ordered (the simulator emits them that way).
    """
    window_ns = s_to_ns(window_s)
    if window_ns <= 0:
        raise ParamError("window_s must be positive")
    intervals = m.gateway.downlink_intervals
    if not intervals:
        return 0.0
    starts = [a for a, _ in intervals]
    ends = [b for _, b in intervals]
    prefix_starts = [0]
    for a in starts:
        prefix_starts.append(prefix_starts[-1] + a)
    prefix_ends = [0]
    for b in ends:
        prefix_ends.append(prefix_ends[-1] + b)

    def overlap(w_start: int) -> int:
        w_end = w_start + window_ns
        i0 = bisect_right(ends, w_start)  # skip intervals ending at/before the window
        i1 = bisect_left(starts, w_end)  # skip intervals starting at/after it
        if i0 >= i1:
            return 0
        j_end = min(max(bisect_right(ends, w_end), i0), i1)
        sum_min_end = (prefix_ends[j_end] - prefix_ends[i0]) + (i1 - j_end) * w_end
        j_start = min(max(bisect_right(starts, w_start), i0), i1)
        sum_max_start = (j_start - i0) * w_start + (
            prefix_starts[i1] - prefix_starts[j_start]
        )
        return sum_min_end - sum_max_start

    candidates = {0}
    for a, b in intervals:
        candidates.add(a)
        candidates.add(max(0, b - window_ns))
    return max(overlap(c) for c in candidates) / window_ns
