#!/usr/bin/env python3
"""
VoxelLink - Multi-Resolution Sparse Voxel Grids for Collective Perception
Voxelize clouds, encode grid messages, run the sparse backbone and simulate the V2X channel

Commands: voxelize | bandwidth | forward | simulate | bench | golden
"""

import argparse
import hashlib
import os
import sys
from fractions import Fraction
from typing import List, Optional

from core import UI, Reporter, Config, RunConfig, load_config, __version__
from core.config import parse_threads
from core.errors import ConfigError, VoxelLinkError
from core.log import setup_logging
from core import golden

from backbone import ForwardTrace, forward, init_weights, load_weights, plan_shapes, write_bev
from backbone.bev import encode_bev
from codec import CodecMode, Sublayout, bandwidth, decode, encode, make_message, payload_size, reduction_vs_raw
from codec.sizes import truncate_tenths
from comms import ChannelConfig, gen_scenario, read_scenario, simulate, simulate_pinned
from grid import Level, Pose, canonical_specs, mean_features, read_pcf, regrid, voxelize_with_stats
from sparse.bench import run_benchmark
from strategies import get_all_strategies, get_strategy_by_type

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERRUPTED = 130


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors become ConfigError so main() owns every exit code"""

    def error(self, message):
        raise ConfigError(message)


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse CLI arguments
    :param argv: Arguments without the program name (sys.argv[1:] when None)
    :return: Parsed arguments
    """
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file (flags override its values)")
    common.add_argument("--seed", type=int, help=f"Weights / strategy seed (default: {Config.DEFAULT_SEED})")
    common.add_argument("--threads", help="Convolution worker threads: N or 'max' (default: 1)")
    common.add_argument("--mode", choices=["coords", "mean"], help="Codec mode (default: coords)")
    common.add_argument("--sublayout", choices=["compat", "packed"], help="Coordinate layout (default: compat)")
    common.add_argument("--frequency", type=float, help=f"Sensor frequency in Hz (default: {Config.FREQUENCY_HZ:g})")
    common.add_argument("-o", "--output", help="Output file path")
    common.add_argument("--no-banner", action="store_true", help="Disable ASCII banner display")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = _ArgumentParser(
        prog="main.py",
        description="VoxelLink - Multi-Resolution Sparse Voxel Grids for Collective Perception",
        epilog="Example: python main.py simulate --synthetic 1 --strategy uniform",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = commands.add_parser("voxelize", parents=[common], help="Encode a PCF1 cloud as an SVG1 grid message")
    p.add_argument("input", help="PCF1 point cloud")
    p.add_argument("--level", choices=["high", "medium", "low"], default="high", help="Grid resolution (default: high)")
    p.add_argument("--id", type=int, default=0, help="Sender id written into the message (default: 0)")

    p = commands.add_parser("bandwidth", parents=[common], help="Bandwidth of message sizes or files")
    p.add_argument("inputs", nargs="+", help="Byte counts or SVG1 message files")

    p = commands.add_parser("forward", parents=[common], help="Backbone forward pass to a BEV1 map")
    p.add_argument("ego", help="Ego PCF1 point cloud (ego frame)")
    p.add_argument("messages", nargs="*", help="SVG1 messages received from CAVs")
    p.add_argument("--weights", help="MRW1 weights file (default: initialize from --seed)")
    p.add_argument("--features", choices=["center", "mean"], help="Voxel features (default: center)")
    p.add_argument("--ego-pose", help="Ego pose in world coordinates: 12 comma-separated values (default: identity)")

    p = commands.add_parser("simulate", parents=[common], help="Simulate the channel over a scenario")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--scenario", help="Scenario directory (scenario.txt + PCF1 files)")
    source.add_argument("--synthetic", type=int, metavar="SEED", help="Generate a synthetic scenario from SEED")
    source.add_argument("--pinned", action="store_true", help="Per-level message sizes pinned to the reference sizes")
    p.add_argument("--strategy", choices=[s().strategy_type for s in get_all_strategies()], default="uniform",
                   help="Resolution assignment strategy (default: uniform)")
    p.add_argument("--level", choices=["high", "medium", "low"], default="high", help="Level of the fixed strategy")
    p.add_argument("--frames", type=int, default=100, help="Synthetic / pinned frame count (default: 100)")
    p.add_argument("--points", type=int, default=Config.POINTS_PER_VEHICLE,
                   help=f"Synthetic points per vehicle (default: {Config.POINTS_PER_VEHICLE})")
    p.add_argument("--capacity", type=float, help="Channel capacity in Mbit/s (budget strategy)")
    p.add_argument("--range", dest="comm_range", type=float, help=f"Communication range in m (default: {Config.COMM_RANGE_M:g})")
    p.add_argument("--format", choices=["txt", "json"], default=Config.DEFAULT_REPORT_FORMAT, help="Report format")
    p.add_argument("--fuse", action="store_true", help="Also run the backbone on every frame")

    p = commands.add_parser("bench", parents=[common], help="Sparse engine throughput")
    p.add_argument("sizes", nargs="*", type=int, default=[16, 32, 64], help="Volume edge lengths (default: 16 32 64)")
    p.add_argument("--density", type=float, default=0.05, help="Fraction of active sites (default: 0.05)")
    p.add_argument("--channels", type=int, default=16, help="Feature channels (default: 16)")

    p = commands.add_parser("golden", parents=[common], help="Verify or regenerate golden artifacts")
    p.add_argument("--bless", action="store_true", help="Regenerate the golden files")
    p.add_argument("--dir", default=golden.GOLDEN_DIR, help="Golden directory (default: tests/golden)")

    return parser.parse_args(argv)


def build_config(args: argparse.Namespace) -> RunConfig:
    """Config file values overridden by explicit flags"""
    cfg = load_config(args.config)
    return cfg.with_overrides(
        seed=args.seed,
        threads=parse_threads(args.threads) if args.threads is not None else None,
        mode=args.mode,
        sublayout=args.sublayout,
        frequency=args.frequency,
        output=args.output,
        capacity=getattr(args, "capacity", None),
        comm_range=getattr(args, "comm_range", None),
        weights=getattr(args, "weights", None),
        features=getattr(args, "features", None),
    )


def cmd_voxelize(args, cfg: RunConfig, ui: UI) -> int:
    mode, sublayout = CodecMode.from_name(cfg.mode), Sublayout.from_name(cfg.sublayout)
    level = Level.from_name(args.level)
    spec = canonical_specs(cfg.extent, cfg.origin)[level]
    cloud = read_pcf(args.input)
    grid, stats = voxelize_with_stats(cloud, spec)
    if mode == CodecMode.COORDS_PLUS_MEAN:
        grid = mean_features(cloud, spec)
    data = encode(make_message(args.id, 0, Pose.identity(), grid, mode), mode, sublayout)
    output = cfg.output or os.path.splitext(args.input)[0] + f"_{level.label}.svg"
    with open(output, "wb") as f:
        f.write(data)
    ui.show_summary("Voxelize", {
        "Input": args.input,
        "Level": f"{level.label} {spec.dims}",
        "Points": f"{stats.points_in} kept, {stats.points_dropped} outside",
        "Voxels": len(grid),
        "Payload Bytes": payload_size(len(grid), mode, sublayout),
        "Message Bytes": len(data),
        "Output": output,
    })
    return EXIT_OK


def _input_bytes(token: str) -> int:
    if os.path.exists(token):
        with open(token, "rb") as f:
            data = f.read()
        decode(data)
        return len(data)
    try:
        value = int(token)
    except ValueError:
        raise ConfigError(f"'{token}' is neither a byte count nor an existing file") from None
    if value < 0:
        raise ConfigError(f"byte count must be non-negative, got {value}")
    return value


def cmd_bandwidth(args, cfg: RunConfig, ui: UI) -> int:
    reports = [(token, bandwidth(_input_bytes(token), cfg.frequency)) for token in args.inputs]
    mean = sum((r.exact_mbps for _, r in reports), Fraction(0)) / len(reports)
    ui.show_bandwidth_table(
        ((token, r.frame_bytes, r.display) for token, r in reports),
        truncate_tenths(mean),
    )
    for token, r in reports:
        ui.print_info(f"{token}: {r.display} Mbit/s @ {cfg.frequency:g} Hz, "
                      f"{reduction_vs_raw(r.frame_bytes):.1f}% below the raw cloud")
    return EXIT_OK


def _parse_pose(text: Optional[str]) -> Pose:
    if not text:
        return Pose.identity()
    try:
        return Pose.from_wire([float(x) for x in text.split(",")])
    except ValueError as e:
        raise ConfigError(f"--ego-pose: {e}") from None


def cmd_forward(args, cfg: RunConfig, ui: UI) -> int:
    specs = canonical_specs(cfg.extent, cfg.origin)
    plan = plan_shapes(specs)
    in_channels = Config.MEAN_FEATURES if cfg.features == "mean" else Config.CENTER_FEATURES
    weights = load_weights(cfg.weights) if cfg.weights else init_weights(cfg.seed, in_channels)
    ego_pose = _parse_pose(args.ego_pose)
    ego = read_pcf(args.ego, frame_pose=ego_pose)

    collective = []
    for path in args.messages:
        with open(path, "rb") as f:
            message = decode(f.read())
        level = message.spec.level
        relative = message.sender_pose.relative_to(ego_pose)
        collective.append((level, regrid(message.payload, relative, specs[level])))
        ui.print_info(f"{path}: CAV {message.sender_id}, {level.label}, {message.voxel_count} voxels")

    trace = ForwardTrace()
    bev = forward(ego, collective, weights, specs, cfg.threads, trace)
    output = cfg.output or "bev.bin"
    write_bev(bev, output)

    ui.show_table("Forward", ("Stream", "Block", "Shape", "Channels", "Active", "ms"), (
        (b.stream, b.block, "x".join(map(str, b.shape)), b.channels, b.active, f"{b.seconds * 1e3:.1f}")
        for b in trace.blocks
    ))
    ui.show_summary("BEV", {
        "Inputs": ", ".join(f"{k}={v}" for k, v in trace.inputs.items()),
        "Fused Shape": "x".join(map(str, plan.fused_shape)),
        "BEV Shape": "x".join(map(str, bev.features.shape)),
        "Weights Seed": weights.seed,
        "Threads": cfg.threads,
        "Seconds": f"{trace.seconds:.2f}",
        "SHA-256": hashlib.sha256(encode_bev(bev)).hexdigest(),
        "Output": output,
    })
    return EXIT_OK


def cmd_simulate(args, cfg: RunConfig, ui: UI) -> int:
    if args.frames < 1:
        raise ConfigError("scenario has no frames")
    channel = ChannelConfig.from_run_config(cfg)
    strategy_class = get_strategy_by_type(args.strategy)
    strategy = strategy_class(cfg.seed, level=args.level) if args.strategy == "fixed" else strategy_class(cfg.seed)
    if args.strategy == "budget" and channel.capacity is None:
        ui.print_warning("budget strategy without --capacity assigns every CAV High")
    ui.print_info(f"Strategy: {strategy.name} - {strategy.description}")

    if args.pinned:
        level_bytes = {Level.from_name(k): v for k, v in Config.LEVEL_FRAME_BYTES.items()}
        report = simulate_pinned(args.frames, level_bytes, channel, strategy, cfg.seed)
    else:
        if args.scenario:
            frames = read_scenario(args.scenario)
        else:
            seed = args.synthetic if args.synthetic is not None else cfg.seed
            frames = gen_scenario(seed, args.frames, args.points)
        if not frames:
            raise ConfigError("scenario has no frames")
        weights = None
        if args.fuse:
            in_channels = Config.MEAN_FEATURES if cfg.features == "mean" else Config.CENTER_FEATURES
            weights = load_weights(cfg.weights) if cfg.weights else init_weights(cfg.seed, in_channels)
        with ui.create_progress_bar() as progress:
            task = progress.add_task(f"Simulating {len(frames)} frames", total=len(frames))
            report = simulate(frames, channel, strategy, weights, cfg.threads,
                              on_frame=lambda _: progress.advance(task))

    summary = report.summary()
    ui.show_summary("Simulation", {k.replace("_", " ").title(): v for k, v in summary.items()},
                    alert=channel.capacity is not None and report.max_mbps > channel.capacity)
    if cfg.output:
        Reporter(ui).generate_report(summary, cfg.output, args.format, [f.row() for f in report.frames])
    return EXIT_OK


def cmd_bench(args, cfg: RunConfig, ui: UI) -> int:
    if not args.sizes or min(args.sizes) < 2:
        raise ConfigError("bench sizes must be at least 2")
    results = run_benchmark(args.sizes, cfg.seed, args.channels, args.density, cfg.threads)
    ui.show_table("Sparse Engine", ("Kernel", "Size", "Sites", "Rules", "Oracle", "Sites/s"), (
        (r.kernel, r.size, r.sites, r.rules, "" if r.oracle_rules is None else r.oracle_rules,
         f"{r.sites_per_second:,.0f}")
        for r in results
    ))
    mismatched = [r for r in results if r.oracle_rules is not None and r.oracle_rules != r.rules]
    if mismatched:
        for r in mismatched:
            ui.print_error(f"{r.kernel} @ {r.size}: {r.rules} rules, dense oracle reaches {r.oracle_rules}")
        return EXIT_DATA
    return EXIT_OK


def cmd_golden(args, cfg: RunConfig, ui: UI) -> int:
    if args.bless:
        for name, size in golden.bless(args.dir):
            ui.print_success(f"blessed {name} ({size} bytes)")
        return EXIT_OK
    results = golden.verify(args.dir)
    ui.show_table("Golden Artifacts", ("Artifact", "Status"), results)
    failed = [name for name, status in results if status != "ok"]
    if failed:
        ui.print_error(f"{len(failed)} artifact(s) differ or are missing; regenerate with --bless")
        return EXIT_DATA
    return EXIT_OK


COMMANDS = {
    "voxelize": cmd_voxelize,
    "bandwidth": cmd_bandwidth,
    "forward": cmd_forward,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
    "golden": cmd_golden,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main execution function
    :param argv: Arguments without the program name
    :return: Exit code (0 ok, 1 usage, 2 data/format, 130 interrupted)
    """
    ui = UI()
    try:
        args = parse_arguments(argv)
        setup_logging(args.verbose)
        if not args.no_banner:
            ui.show_banner(version=__version__)
        cfg = build_config(args)
        return COMMANDS[args.command](args, cfg, ui)
    except ConfigError as e:
        ui.print_error(str(e))
        return EXIT_USAGE
    except (VoxelLinkError, ValueError, OSError) as e:
        ui.print_error(f"{type(e).__name__}: {e}")
        return EXIT_DATA
    except KeyboardInterrupt:
        ui.print_warning("Interrupted by user")
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())
