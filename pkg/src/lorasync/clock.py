"""Drifting-oscillator models: reference time vs device-local time.

A device whose oscillator runs at f0 + df sees its local clock advance by
(1 + ppm*1e-6) per reference second.  Drift is reported with the sign of
(reference - local): a fast device is ahead, so its drift is negative.

Offsets accumulate per rate segment and are rounded once over the full
interval since the segment start, so querying a clock in many small steps
or one big step yields bit-identical local times (the simulator depends
on that).
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass

from .errors import ParamError, UsageError
from .units import NS_PER_S

# |ppm| must stay below this for local time to keep moving forward
_PPM_LIMIT = 1_000_000


@dataclass(frozen=True)
class Ideal:
    """Perfect oscillator, local time equals reference time."""


@dataclass(frozen=True)
class ConstantPpm:
    offset_ppm: float

    def __post_init__(self):
        if not abs(self.offset_ppm) < _PPM_LIMIT:
            raise ParamError(f"|offset_ppm| must be < {_PPM_LIMIT}")


@dataclass(frozen=True)
class RandomWalk:
    """Piecewise-constant ppm that takes a Gaussian step every interval.

    seed=None means the simulator derives one from the scenario seed.
    """

    step_interval_s: float
    step_std_ppm: float
    initial_ppm: float
    seed: int | None = None

    def __post_init__(self):
        if self.step_interval_s <= 0:
            raise ParamError("step_interval_s must be positive")
        if self.step_std_ppm < 0:
            raise ParamError("step_std_ppm must be >= 0")
        if not abs(self.initial_ppm) < _PPM_LIMIT:
            raise ParamError(f"|initial_ppm| must be < {_PPM_LIMIT}")


@dataclass(frozen=True)
class Piecewise:
    """Explicit (from_time_s, offset_ppm) segments, first at t=0."""

    segments: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.segments:
            raise ParamError("piecewise model needs at least one segment")
        if self.segments[0][0] != 0:
            raise ParamError("first piecewise segment must start at t=0")
        times = [t for t, _ in self.segments]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ParamError("piecewise segment times must strictly increase")
        if any(not abs(ppm) < _PPM_LIMIT for _, ppm in self.segments):
            raise ParamError(f"|offset_ppm| must be < {_PPM_LIMIT}")


ClockModel = Ideal | ConstantPpm | RandomWalk | Piecewise


def _seg_offset_ns(dt_ns: int, ppm: float) -> int:
    # one rounding per (segment start, query) pair; makes step patterns
    # telescope exactly within a segment
    return round(dt_ns * ppm / 1_000_000)


class SimClock:
    """Single simulated oscillator.

    local_time() and drift() must be queried with non-decreasing reference
    times; true_time_at_local() is the scheduling inverse and carries no
    such restriction.
    """

    def __init__(self, model: ClockModel):
        if isinstance(model, RandomWalk) and model.seed is None:
            raise ParamError("RandomWalk clock needs a concrete seed to run")
        self.model = model
        self._last_query_ns = 0
        # materialized rate segments; grown lazily for random walks
        self._starts = [0]  # segment start, reference ns
        self._bases = [0]  # accumulated local-offset at segment start, ns
        if isinstance(model, Ideal):
            self._ppms = [0.0]
            self._next_boundary = None
        elif isinstance(model, ConstantPpm):
            self._ppms = [model.offset_ppm]
            self._next_boundary = None
        elif isinstance(model, RandomWalk):
            self._ppms = [model.initial_ppm]
            self._rng = random.Random(model.seed)
            self._step_ns = s_ns = round(model.step_interval_s * NS_PER_S)
            if s_ns <= 0:
                raise ParamError("step_interval_s too small")
            self._next_boundary = s_ns
        else:  # Piecewise
            self._ppms = [model.segments[0][1]]
            for (t0, ppm0), (t1, ppm1) in zip(model.segments, model.segments[1:]):
                start = round(t1 * NS_PER_S)
                prev_start = self._starts[-1]
                base = self._bases[-1] + _seg_offset_ns(start - prev_start, self._ppms[-1])
                self._starts.append(start)
                self._bases.append(base)
                self._ppms.append(ppm1)
            self._next_boundary = None

    def _extend_to(self, true_time_ns: int):
        # random walk is the only lazily growing model
        while self._next_boundary is not None and true_time_ns >= self._next_boundary:
            boundary = self._next_boundary
            base = self._bases[-1] + _seg_offset_ns(boundary - self._starts[-1], self._ppms[-1])
            ppm = self._ppms[-1] + self._rng.gauss(0.0, self.model.step_std_ppm)
            if not abs(ppm) < _PPM_LIMIT:
                raise ParamError("random walk left the valid ppm range")
            self._starts.append(boundary)
            self._bases.append(base)
            self._ppms.append(ppm)
            self._next_boundary = boundary + self._step_ns

    def _offset_at(self, true_time_ns: int) -> int:
        self._extend_to(true_time_ns)
        i = bisect_right(self._starts, true_time_ns) - 1
        return self._bases[i] + _seg_offset_ns(true_time_ns - self._starts[i], self._ppms[i])

    def _check_forward(self, true_time_ns: int):
        if true_time_ns < 0:
            raise UsageError("reference time precedes the common origin")
        if true_time_ns < self._last_query_ns:
            raise UsageError(
                f"non-monotone clock query: {true_time_ns} after {self._last_query_ns}"
            )
        self._last_query_ns = true_time_ns

    def local_time(self, true_time_ns: int) -> int:
        self._check_forward(true_time_ns)
        return true_time_ns + self._offset_at(true_time_ns)

    def drift(self, true_time_ns: int) -> int:
        """Reference minus local at the given reference instant."""
        self._check_forward(true_time_ns)
        return -self._offset_at(true_time_ns)

    def peek_local(self, true_time_ns: int) -> int:
        """local_time without the monotone-cursor side effect."""
        if true_time_ns < 0:
            raise UsageError("reference time precedes the common origin")
        return true_time_ns + self._offset_at(true_time_ns)

    def true_time_at_local(self, local_ns: int) -> int:
        """Earliest reference time whose local reading is >= local_ns.

        This is how a scheduler turns "wake me when my clock reads L" into
        a reference-time event.
        """
        if local_ns <= 0:
            return 0
        # make sure the covering segment exists (local moves at a rate
        # within (0, 2), so reference time 2*L is always far enough)
        self._extend_to(2 * local_ns)
        starts, bases, ppms = self._starts, self._bases, self._ppms
        # find the segment whose local range contains local_ns
        lo, hi = 0, len(starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if starts[mid] + bases[mid] < local_ns:
                lo = mid
            else:
                hi = mid - 1
        i = lo
        while True:
            s, b, ppm = starts[i], bases[i], ppms[i]
            rate = 1.0 + ppm / 1_000_000
            target = local_ns - s - b
            d = max(0, int(target / rate))
            while d + _seg_offset_ns(d, ppm) < target:
                d += 1
            while d > 0 and (d - 1) + _seg_offset_ns(d - 1, ppm) >= target:
                d -= 1
            t = s + d
            # rounding can push the solution past the segment end; retry there
            if i + 1 < len(starts) and t >= starts[i + 1]:
                i += 1
                continue
            return t


def preset(name: str, seed: int | None = None) -> ClockModel:
    """Named clock archetypes measured on common dev boards.

    "feather-like": wobbly crystal, random walk around +30 ppm.
    "ttgo-like": stable TCXO-grade part, constant +2 ppm.
    """
    if name == "ideal":
        return Ideal()
    if name == "feather-like":
        return RandomWalk(step_interval_s=60.0, step_std_ppm=4.0, initial_ppm=30.0, seed=seed)
    if name == "ttgo-like":
        return ConstantPpm(2.0)
    raise ParamError(f"unknown clock preset {name!r}")


def is_in_sync(drift_ns: int, tb1_ns: int, tb2_ns: int) -> bool:
    """Strict guard check: -tb2 < drift < tb1."""
    if tb1_ns < 0 or tb2_ns < 0:
        raise ParamError("guard intervals must be >= 0")
    return -tb2_ns < drift_ns < tb1_ns
