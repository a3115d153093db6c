"""Scenario config files.

Flat INI-style key/value sections, diff friendly:

    [scenario]          duration, seed, strategy, medium options
    [slot]              millisecond slot fields; t_tx_ms/t_rx_ms may be
                        omitted when radio sections provide air-times
    [radio.uplink]      LoRa parameters the uplink air-time derives from
    [radio.downlink]    same for the ACK
    [device NAME]       one section per device: clock model + schedule

Unknown sections or keys are errors, and every error carries the line
number it came from.
"""

from __future__ import annotations

from .airtime import RadioParams, time_on_air
from .clock import ClockModel, ConstantPpm, Ideal, Piecewise, RandomWalk, preset
from .errors import ConfigError, ParamError
from .sim import DeviceSpec, Scenario, validate_scenario
from .slot import SlotConfig
from .units import ms_to_ns

_REQUIRED = object()


def _to_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _to_segments(raw: str) -> tuple:
    """Piecewise clock segments, "0:30, 3600:-20" style."""
    out = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        time_s, sep, ppm = part.partition(":")
        if not sep:
            raise ValueError(f"segment needs time:ppm, got {part!r}")
        out.append((float(time_s), float(ppm)))
    if not out:
        raise ValueError("no segments given")
    return tuple(out)


class _Section:
    def __init__(self, name: str, line: int, items: dict):
        self.name = name
        self.line = line
        self._items = items

    def take(self, key: str, conv, default=_REQUIRED):
        if key not in self._items:
            if default is _REQUIRED:
                raise ConfigError(f"[{self.name}] is missing required key {key!r}", self.line)
            return default
        raw, line = self._items.pop(key)
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", line) from exc

    def finish(self):
        for key, (_, line) in self._items.items():
            raise ConfigError(f"unknown key {key!r} in [{self.name}]", line)


def _split_sections(text: str) -> list[_Section]:
    sections = []
    current: dict | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", lineno)
            name = line[1:-1].strip()
            if not name:
                raise ConfigError("empty section name", lineno)
            current = {}
            sections.append(_Section(name, lineno, current))
            continue
        if current is None:
            raise ConfigError("key/value before any [section]", lineno)
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError("expected key = value", lineno)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError("empty key", lineno)
        if key in current:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        current[key] = (value, lineno)
    return sections


def _radio_from(sec: _Section) -> RadioParams:
    params = RadioParams(
        sf=sec.take("sf", int),
        bw_hz=sec.take("bw_khz", int) * 1000,
        cr=sec.take("cr", int),
        pl_bytes=sec.take("payload_bytes", int),
        n_preamble=sec.take("preamble", int, 8),
        crc_on=sec.take("crc", _to_bool, True),
        implicit_header=sec.take("implicit_header", _to_bool, False),
        low_datarate_opt=sec.take("low_datarate_opt", _to_bool, False),
    )
    sec.finish()
    return params


def _clock_from(sec: _Section) -> ClockModel:
    kind = sec.take("clock", str)
    if kind == "ideal":
        return Ideal()
    if kind in ("feather-like", "ttgo-like"):
        return preset(kind, sec.take("seed", int, None))
    if kind == "constant_ppm":
        return ConstantPpm(sec.take("offset_ppm", float))
    if kind == "random_walk":
        return RandomWalk(
            step_interval_s=sec.take("step_interval_s", float),
            step_std_ppm=sec.take("step_std_ppm", float),
            initial_ppm=sec.take("initial_ppm", float),
            seed=sec.take("seed", int, None),
        )
    if kind == "piecewise":
        return Piecewise(sec.take("segments", _to_segments))
    raise ConfigError(f"unknown clock model {kind!r}", sec.line)


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    sections = _split_sections(text)
    by_name: dict[str, _Section] = {}
    devices: list[_Section] = []
    for sec in sections:
        head, _, label = sec.name.partition(" ")
        if head == "device":
            label = label.strip()
            if not label:
                raise ConfigError("device section needs a name: [device NAME]", sec.line)
            devices.append(_Section(label, sec.line, sec._items))
            continue
        if sec.name in by_name:
            raise ConfigError(f"duplicate section [{sec.name}]", sec.line)
        if sec.name not in ("scenario", "slot", "radio.uplink", "radio.downlink"):
            raise ConfigError(f"unknown section [{sec.name}]", sec.line)
        by_name[sec.name] = sec

    if "scenario" not in by_name:
        raise ConfigError(f"{source}: missing [scenario] section")
    if "slot" not in by_name:
        raise ConfigError(f"{source}: missing [slot] section")
    if not devices:
        raise ConfigError(f"{source}: needs at least one [device NAME] section")

    sc = by_name["scenario"]
    duration_s = sc.take("duration_s", float)
    seed = sc.take("seed", int, 0)
    strategy = sc.take("strategy", str, "adaptive")
    round_s = sc.take("round_s", int, None)
    duty_cycle_limit = sc.take("duty_cycle_limit", float, 0.01)
    downlink_loss = sc.take("downlink_loss", float, 0.0)
    slot_pick = sc.take("slot_pick", str, "random")
    sc.finish()

    radio_up = _radio_from(by_name["radio.uplink"]) if "radio.uplink" in by_name else None
    radio_down = _radio_from(by_name["radio.downlink"]) if "radio.downlink" in by_name else None

    slot_sec = by_name["slot"]
    t_tx_ms = slot_sec.take("t_tx_ms", int, None)
    t_rx_ms = slot_sec.take("t_rx_ms", int, None)
    rx_delay_ms = slot_sec.take("rx_delay_ms", int)
    tb1_ms = slot_sec.take("tb1_ms", int)
    tb2_ms = slot_sec.take("tb2_ms", int)
    slot_sec.finish()
    if t_tx_ms is None:
        if radio_up is None:
            raise ConfigError(
                "[slot] needs t_tx_ms or a [radio.uplink] section to derive it from",
                slot_sec.line,
            )
        t_tx_ms = time_on_air(radio_up).t_packet_ms
    if t_rx_ms is None:
        if radio_down is None:
            raise ConfigError(
                "[slot] needs t_rx_ms or a [radio.downlink] section to derive it from",
                slot_sec.line,
            )
        t_rx_ms = time_on_air(radio_down).t_packet_ms
    try:
        cfg = SlotConfig(
            t_tx_ns=ms_to_ns(t_tx_ms),
            rx_delay_ns=ms_to_ns(rx_delay_ms),
            t_rx_ns=ms_to_ns(t_rx_ms),
            tb1_ns=ms_to_ns(tb1_ms),
            tb2_ns=ms_to_ns(tb2_ms),
        )
    except ParamError as exc:
        raise ConfigError(f"invalid slot geometry: {exc}", slot_sec.line) from exc

    specs = []
    for sec in devices:
        clock_model = _clock_from(sec)
        spec = DeviceSpec(
            name=sec.name,
            clock_model=clock_model,
            tx_period_s=sec.take("tx_period_s", float),
            payload_bytes=sec.take("payload_bytes", int, 0),
            dev_addr=sec.take("dev_addr", int, None),
        )
        sec.finish()
        specs.append(spec)

    scenario = Scenario(
        duration_s=duration_s,
        cfg=cfg,
        devices=tuple(specs),
        strategy=strategy,
        round_s=round_s,
        seed=seed,
        duty_cycle_limit=duty_cycle_limit,
        downlink_loss=downlink_loss,
        slot_pick=slot_pick,
    )
    validate_scenario(scenario)
    return scenario


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text, source=str(path))
