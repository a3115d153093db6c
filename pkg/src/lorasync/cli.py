"""Command-line front end.

    lorasync airtime  --sf 12 --bw 125 --cr 4 --pl 255      air-time table
    lorasync airtime  --max                                  worst-case uplink
    lorasync simulate CONFIG [--out trace.csv] [--seed N]    run one scenario
    lorasync compare  CONFIG [--rounds 3600,1800] [--seed N] adaptive vs fixed

Exit codes: 0 ok, 1 bad parameters or config, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace

from .airtime import RadioParams, remaining_time_bit_width, symbol_duration_ns, time_on_air
from .config import load_scenario
from .errors import ConfigError, LorasyncError, ParamError
from .protocol import ADAPTIVE, FIXED_RATE
from .sim import Metrics, Scenario, TraceRow, run
from .units import fmt_ms, ns_to_ms_round

CSV_HEADER = [
    "frame_index",
    "device_id",
    "true_time_ms",
    "arrival_position_ms",
    "signed_drift_ms",
    "in_sync",
    "action",
    "remaining_ms",
    "strategy",
]

WORST_CASE = RadioParams(sf=12, bw_hz=125_000, cr=4, pl_bytes=255)


def trace_csv_rows(rows: list[TraceRow]):
    for r in rows:
        yield [
            r.frame_index,
            r.device_id,
            fmt_ms(r.true_time_ns),
            fmt_ms(r.arrival_position_ns),
            fmt_ms(r.signed_drift_ns),
            int(r.in_sync),
            r.action,
            "" if r.remaining_ms is None else r.remaining_ms,
            r.strategy,
        ]


def write_trace_csv(path, rows: list[TraceRow]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(trace_csv_rows(rows))


def _cmd_airtime(args) -> int:
    if args.max:
        p = WORST_CASE
        print("worst-case uplink: sf 12, bw 125 kHz, cr 4, payload 255 B, "
              "preamble 8, crc on")
    else:
        if args.sf is None or args.bw is None or args.cr is None or args.pl is None:
            raise ParamError("need --sf, --bw, --cr and --pl (or --max)")
        p = RadioParams(
            sf=args.sf,
            bw_hz=args.bw * 1000,
            cr=args.cr,
            pl_bytes=args.pl,
            n_preamble=args.preamble,
            crc_on=not args.no_crc,
            implicit_header=args.implicit_header,
            low_datarate_opt=args.low_datarate_opt,
        )
    at = time_on_air(p)
    total_ms = at.t_packet_ms
    print(f"symbol    {fmt_ms(symbol_duration_ns(p))} ms")
    print(f"preamble  {fmt_ms(at.t_preamble_ns)} ms  ({p.n_preamble} + 4.25 symbols)")
    print(f"payload   {fmt_ms(at.t_payload_ns)} ms  ({at.n_payload_symbols} symbols)")
    print(f"total     {fmt_ms(at.t_packet_ns)} ms  (rounds to {total_ms} ms, "
          f"{remaining_time_bit_width(total_ms)} bits to count it)")
    return 0


def _summary_pairs(sc: Scenario, m: Metrics) -> list[tuple[str, str]]:
    cfg = sc.cfg
    pairs = [
        ("strategy", m.strategy),
        ("duration_s", f"{sc.duration_s:g}"),
        ("seed", str(sc.seed)),
        ("t_slot_ms", fmt_ms(cfg.t_slot_ns)),
        ("ideal_arrival_ms", fmt_ms(cfg.t_tx_ns)),
        ("in_sync_lower_ms", fmt_ms(cfg.t_tx_ns - cfg.tb1_ns)),
        ("in_sync_upper_ms", fmt_ms(cfg.t_tx_ns + cfg.tb2_ns)),
        ("frames_total", str(m.frames_total)),
        ("collision_count", str(m.collision_count)),
        ("downlink_count", str(m.gateway.downlink_count)),
        ("downlink_airtime_ms", fmt_ms(m.gateway.downlink_airtime_ns)),
        ("duty_cycle_fraction", f"{m.gateway.duty_cycle_used_fraction:.6f}"),
        ("duty_cycle_limit", f"{sc.duty_cycle_limit:.6f}"),
        ("sync_overhead_bytes", str(m.gateway.sync_overhead_bytes)),
        ("resyncs_total", str(sum(d.resync_count for d in m.per_device.values()))),
    ]
    if m.strategy == FIXED_RATE:
        pairs.insert(1, ("round_s", str(sc.round_s)))
    for name in sorted(m.per_device):
        dm = m.per_device[name]
        pairs.append((f"device.{name}.resyncs", str(dm.resync_count)))
        pairs.append((f"device.{name}.out_sync_frames", str(dm.out_sync_frames)))
        pairs.append((f"device.{name}.violations", str(dm.slot_violations)))
    return pairs


def _print_summary(sc: Scenario, m: Metrics):
    cfg = sc.cfg
    strategy = m.strategy if m.strategy == ADAPTIVE else f"{m.strategy} ({sc.round_s} s rounds)"
    print("run summary")
    print(f"  strategy         {strategy}")
    print(f"  duration         {sc.duration_s:g} s, {m.frames_total} frames, "
          f"{m.collision_count} collisions")
    print(f"  slot             {fmt_ms(cfg.t_slot_ns)} ms = tx {fmt_ms(cfg.t_tx_ns)}"
          f" + delay {fmt_ms(cfg.rx_delay_ns)} + rx {fmt_ms(cfg.t_rx_ns)}"
          f" + guards {fmt_ms(cfg.tb1_ns)}/{fmt_ms(cfg.tb2_ns)}")
    print(f"  in-sync window   uplink end in ({fmt_ms(cfg.t_tx_ns - cfg.tb1_ns)}, "
          f"{fmt_ms(cfg.t_tx_ns + cfg.tb2_ns)}) ms, ideal {fmt_ms(cfg.t_tx_ns)} ms")
    for name in sorted(m.per_device):
        dm = m.per_device[name]
        print(f"  device {name:<10} resyncs {dm.resync_count}, "
              f"out-of-sync {dm.out_sync_frames}, violations {dm.slot_violations}")
    gw = m.gateway
    print(f"  gateway          {gw.downlink_count} acks, {gw.sync_overhead_bytes} sync bytes, "
          f"{fmt_ms(gw.downlink_airtime_ns)} ms downlink air-time")
    print(f"  duty cycle       {gw.duty_cycle_used_fraction:.6f} of {sc.duty_cycle_limit:g} allowed")
    print()
    print("[summary]")
    for key, value in _summary_pairs(sc, m):
        print(f"{key}={value}")


def _cmd_simulate(args) -> int:
    sc = load_scenario(args.config)
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    metrics, trace = run(sc)
    if args.out:
        write_trace_csv(args.out, trace)
        print(f"wrote {len(trace)} trace rows to {args.out}", file=sys.stderr)
    _print_summary(sc, metrics)
    return 0


def _cmd_compare(args) -> int:
    sc = load_scenario(args.config)
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    try:
        rounds = [int(r) for r in args.rounds.split(",") if r.strip()]
    except ValueError as exc:
        raise ParamError(f"bad --rounds value: {exc}") from exc
    if not rounds or any(r <= 0 for r in rounds):
        raise ParamError("--rounds needs positive integers")

    variants = [("adaptive", replace(sc, strategy=ADAPTIVE, round_s=None))]
    for r in rounds:
        variants.append((f"fixed {r} s", replace(sc, strategy=FIXED_RATE, round_s=r)))
    results = [(label, *run(v)) for label, v in variants]

    base = results[0][1]
    base_resyncs = sum(d.resync_count for d in base.per_device.values())
    base_bytes = base.gateway.sync_overhead_bytes

    labels = [label for label, _, _ in results]
    rows = [
        ("resyncs", [str(sum(d.resync_count for d in m.per_device.values()))
                     for _, m, _ in results]),
        ("out-of-sync frames", [str(sum(d.out_sync_frames for d in m.per_device.values()))
                                for _, m, _ in results]),
        ("slot violations", [str(sum(d.slot_violations for d in m.per_device.values()))
                             for _, m, _ in results]),
        ("sync overhead bytes", [str(m.gateway.sync_overhead_bytes) for _, m, _ in results]),
        ("downlink airtime ms", [fmt_ms(m.gateway.downlink_airtime_ns) for _, m, _ in results]),
        ("duty-cycle fraction", [f"{m.gateway.duty_cycle_used_fraction:.6f}"
                                 for _, m, _ in results]),
    ]

    def ratio(value, base_value):
        if base_value == 0:
            return "inf"
        return f"{value / base_value:.2f}"

    overhead_ratios = ["-"]
    byte_ratios = ["-"]
    for _, m, _ in results[1:]:
        overhead_ratios.append(
            ratio(sum(d.resync_count for d in m.per_device.values()), base_resyncs))
        byte_ratios.append(ratio(m.gateway.sync_overhead_bytes, base_bytes))
    rows.append(("overhead ratio", overhead_ratios))
    rows.append(("byte ratio", byte_ratios))

    name_w = max(len(r[0]) for r in rows)
    col_w = max(12, max(len(v) for _, vals in rows for v in vals), max(len(l) for l in labels))
    print(" " * name_w + "  " + "  ".join(f"{l:>{col_w}}" for l in labels))
    for name, vals in rows:
        print(f"{name:<{name_w}}  " + "  ".join(f"{v:>{col_w}}" for v in vals))

    print()
    print("[compare]")
    for (label, m, _), oratio, bratio in zip(results, overhead_ratios, byte_ratios):
        key = label.replace(" s", "").replace(" ", "_")
        print(f"{key}.resyncs={sum(d.resync_count for d in m.per_device.values())}")
        print(f"{key}.sync_overhead_bytes={m.gateway.sync_overhead_bytes}")
        print(f"{key}.duty_cycle_fraction={m.gateway.duty_cycle_used_fraction:.6f}")
        if oratio != "-":
            print(f"{key}.overhead_ratio={oratio}")
            print(f"{key}.byte_ratio={bratio}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorasync",
        description="Slot synchronization for class-A LoRaWAN: air-time math and "
                    "a deterministic protocol simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_air = sub.add_parser("airtime", help="LoRa time-on-air for one parameter set")
    p_air.add_argument("--sf", type=int, help="spreading factor 5..12")
    p_air.add_argument("--bw", type=int, choices=(125, 250, 500), help="bandwidth, kHz")
    p_air.add_argument("--cr", type=int, help="coding rate 1..4 (4/5..4/8)")
    p_air.add_argument("--pl", type=int, help="payload bytes 0..255")
    p_air.add_argument("--preamble", type=int, default=8, help="preamble symbols")
    p_air.add_argument("--no-crc", action="store_true", help="disable payload CRC")
    p_air.add_argument("--implicit-header", action="store_true")
    p_air.add_argument("--low-datarate-opt", action="store_true")
    p_air.add_argument("--max", action="store_true",
                       help="show the worst-case uplink instead")
    p_air.set_defaults(func=_cmd_airtime)

    p_sim = sub.add_parser("simulate", help="run one scenario config")
    p_sim.add_argument("config", help="scenario config file")
    p_sim.add_argument("--out", help="write the frame trace as CSV")
    p_sim.add_argument("--seed", type=int, help="override the scenario seed")
    p_sim.set_defaults(func=_cmd_simulate)

    p_cmp = sub.add_parser("compare",
                           help="adaptive vs fixed-rate resync on one scenario")
    p_cmp.add_argument("config", help="scenario config file")
    p_cmp.add_argument("--rounds", default="3600,1800",
                       help="fixed-rate round lengths, seconds, comma separated")
    p_cmp.add_argument("--seed", type=int, help="override the scenario seed")
    p_cmp.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParamError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (LorasyncError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
