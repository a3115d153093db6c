"""Slot geometry and modular timeline arithmetic.

A slot holds one uplink at its head, the class-A receive window, and two
guard intervals at the tail:

    | t_tx | rx_delay | t_rx | tb1 | tb2 |   -> t_slot = sum

tb1 absorbs early arrivals (fast device clocks), tb2 late ones.  The
in-sync judgement looks at where an uplink *ends* inside the slot: the
ideal end sits at offset t_tx, and the signed drift is how far before
(+) or after (-) the ideal end the frame actually landed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParamError, UsageError
from .units import NS_PER_MS

# the 2-byte millisecond wire field caps the slot length
MAX_SLOT_MS = 65_535
# and the worst-case uplink air-time (11936 ms) leaves this much of it
# for everything else, guards included
GUARD_HEADROOM_MS = 53_599


@dataclass(frozen=True)
class SlotConfig:
    t_tx_ns: int
    rx_delay_ns: int
    t_rx_ns: int
    tb1_ns: int
    tb2_ns: int

    def __post_init__(self):
        for name in ("t_tx_ns", "rx_delay_ns", "t_rx_ns", "tb1_ns", "tb2_ns"):
            if getattr(self, name) < 0:
                raise ParamError(f"{name} must be >= 0")
        if self.t_tx_ns <= 0:
            raise ParamError("t_tx_ns must be positive")
        if self.t_tx_ns <= self.tb1_ns:
            # keeps the in-sync window wrap-free around the ideal end
            raise ParamError("t_tx must exceed tb1")
        t_slot = self.t_slot_ns
        if 2 * self.tb1_ns >= t_slot or 2 * self.tb2_ns >= t_slot:
            raise ParamError("guards must stay below half a slot")
        if (self.tb1_ns + self.tb2_ns) > GUARD_HEADROOM_MS * NS_PER_MS:
            raise ParamError(f"tb1 + tb2 must not exceed {GUARD_HEADROOM_MS} ms")
        if t_slot > MAX_SLOT_MS * NS_PER_MS:
            raise ParamError(f"t_slot must not exceed {MAX_SLOT_MS} ms")

    @property
    def t_slot_ns(self) -> int:
        return self.t_tx_ns + self.rx_delay_ns + self.t_rx_ns + self.tb1_ns + self.tb2_ns


@dataclass(frozen=True)
class TimelineRef:
    """Slot-grid origin, set once at server start."""

    ref_ns: int = 0

    def __post_init__(self):
        if self.ref_ns < 0:
            raise ParamError("ref_ns must be >= 0")


def slot_start(ref: TimelineRef, n: int, cfg: SlotConfig) -> int:
    if n < 0:
        raise UsageError("slot index must be >= 0")
    return ref.ref_ns + n * cfg.t_slot_ns


def position_in_slot(time_ns: int, ref: TimelineRef, cfg: SlotConfig) -> int:
    if time_ns < ref.ref_ns:
        raise UsageError("time precedes the timeline reference")
    return (time_ns - ref.ref_ns) % cfg.t_slot_ns


def remaining_to_next_slot(time_ns: int, ref: TimelineRef, cfg: SlotConfig) -> int:
    """Time until the next slot boundary; a full t_slot exactly on one."""
    return cfg.t_slot_ns - position_in_slot(time_ns, ref, cfg)


def uplink_end_in_sync(arrival_pos_ns: int, cfg: SlotConfig) -> tuple[bool, int]:
    """Judge an uplink by where it ended inside the slot.

    Returns (in_sync, signed_drift).  signed_drift = t_tx - arrival_pos,
    wrapped into (-t_slot/2, t_slot/2]: positive means the frame ended
    early (fast clock, charged against tb1), negative means late (slow
    clock, charged against tb2).  In-sync iff -tb2 < drift < tb1, strict.
    """
    t_slot = cfg.t_slot_ns
    if not 0 <= arrival_pos_ns < t_slot:
        raise UsageError(f"arrival position must be in [0, {t_slot})")
    d = (cfg.t_tx_ns - arrival_pos_ns) % t_slot
    if 2 * d > t_slot:
        d -= t_slot
    return (-cfg.tb2_ns < d < cfg.tb1_ns), d
