"""Command line interface: detect | scan | simulate | mc.

Exit codes: 0 success, 2 usage errors (bad flags, unknown presets),
3 data errors (unreadable values, series too short), with the offending
flag or file row named in the message.

Sample indices in reports are 0-based positions in the input column.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .detector import DetectorConfig, MultiConfig, detect_multiple, detect_single
from .exceptions import (InsufficientDataError, InvalidSampleError,
                         ReplicationError, SeriesFormatError)
from .mmd import KernelConfig
from .ordinal import PatternConfig
from .presets import PRESET_NAMES, get_preset
from .report import build_report, mc_report_to_dict, to_json
from .series_io import SeriesFile, read_series, write_scan_csv, write_series
from .simulate import (AffineMap, PiecewiseLinearMap, ScaleTailsMap, SimSpec,
                       monte_carlo, simulate_ar1)


def _add_input_flags(parser):
    parser.add_argument("path", help="input CSV file")
    parser.add_argument("--column", default=None,
                        help="column name or 0-based index "
                             "(default: first numeric column)")
    parser.add_argument("--has-header", choices=("auto", "yes", "no"),
                        default="auto", help="header row handling")
    parser.add_argument("--delimiter", default=",", help="field delimiter")


def _add_detector_flags(parser):
    parser.add_argument("--order", type=int, default=None,
                        help="pattern order d (default 3)")
    parser.add_argument("--delay", type=int, default=None,
                        help="pattern delay tau (default 1)")
    parser.add_argument("--window", type=int, default=None,
                        help="window size in pattern positions (default 500)")
    parser.add_argument("--sigma-sq", type=float, default=None,
                        help="RBF kernel bandwidth sigma^2 (default 1.0)")
    parser.add_argument("--statistic", choices=("mmd", "cmmd"), default=None,
                        help="statistic maximized over splits (default cmmd)")
    parser.add_argument("--correction-scale", type=float, default=None,
                        help="multiplier on the CMMD correction term (default 1.0)")
    parser.add_argument("--max-changes", type=int, default=None,
                        help="cap on detected change-points (default 1)")
    parser.add_argument("--min-segment-windows", type=int, default=None,
                        help="windows per side required to keep splitting (default 2)")
    parser.add_argument("--threshold", type=float, default=None,
                        help="minimum statistic value to accept a split")


def _series_file(args) -> SeriesFile:
    column = args.column
    if column is not None:
        try:
            column = int(column)
        except ValueError:
            pass
    has_header = {"auto": None, "yes": True, "no": False}[args.has_header]
    return SeriesFile(path=args.path, column=column, has_header=has_header,
                      delimiter=args.delimiter)


def _detector_config(args, base: DetectorConfig | None = None) -> DetectorConfig:
    base = base or DetectorConfig()
    base_multi = base.multi or MultiConfig()

    def pick(value, fallback):
        return fallback if value is None else value

    return DetectorConfig(
        pattern=PatternConfig(
            order=pick(args.order, base.pattern.order),
            delay=pick(args.delay, base.pattern.delay),
            window=pick(args.window, base.pattern.window)),
        kernel=KernelConfig(sigma_sq=pick(args.sigma_sq, base.kernel.sigma_sq)),
        statistic=pick(args.statistic, base.statistic),
        correction_scale=pick(args.correction_scale, base.correction_scale),
        multi=MultiConfig(
            max_changes=pick(args.max_changes, base_multi.max_changes),
            min_segment_windows=pick(args.min_segment_windows,
                                     base_multi.min_segment_windows),
            score_threshold=pick(args.threshold, base_multi.score_threshold)),
    )


def _parse_phi_entry(text: str) -> tuple[int, float]:
    try:
        start, phi = text.split(":")
        return int(start), float(phi)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--phi expects START:PHI, got {text!r}") from None


def _parse_distortion(text: str) -> tuple[int, object]:
    parts = text.split(":")
    try:
        start = int(parts[0])
        kind = parts[1]
        if kind == "affine":
            scale = float(parts[2])
            offset = float(parts[3]) if len(parts) > 3 else 0.0
            return start, AffineMap(scale, offset)
        if kind == "scale_tails":
            return start, ScaleTailsMap(float(parts[2]), float(parts[3]))
        if kind == "piecewise_linear":
            xs = tuple(float(v) for v in parts[2].split(","))
            ys = tuple(float(v) for v in parts[3].split(","))
            return start, PiecewiseLinearMap(xs, ys)
    except (IndexError, ValueError) as exc:
        raise argparse.ArgumentTypeError(
            f"bad --distort spec {text!r}: {exc}") from None
    raise argparse.ArgumentTypeError(
        f"unknown distortion kind {kind!r} in {text!r} "
        f"(expected affine | scale_tails | piecewise_linear)")


def _add_scenario_flags(parser):
    parser.add_argument("--preset", choices=PRESET_NAMES, default=None,
                        help="bundled scenario")
    parser.add_argument("--length", type=int, default=None,
                        help="series length for an explicit scenario")
    parser.add_argument("--phi", action="append", type=_parse_phi_entry,
                        metavar="START:PHI", default=None,
                        help="coefficient schedule entry; repeatable, first "
                             "entry must start at 0")
    parser.add_argument("--innovation-sd", type=float, default=1.0,
                        help="innovation standard deviation (default 1.0)")
    parser.add_argument("--distort", action="append", type=_parse_distortion,
                        metavar="START:KIND:ARGS", default=None,
                        help="calibration distortion, e.g. 3003:affine:1.5:0, "
                             "7003:scale_tails:2:2, "
                             "0:piecewise_linear:-1,0,1:-2,0,3; repeatable")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed (simulate) or Monte Carlo base seed (mc)")


def _scenario(args, parser) -> tuple[SimSpec, DetectorConfig | None]:
    if args.preset is not None:
        spec, detector = get_preset(args.preset)
        return spec, detector
    if args.length is None or not args.phi:
        parser.error("either --preset or both --length and --phi are required")
    spec = SimSpec(
        length=args.length,
        coeff_schedule=tuple(args.phi),
        innovation_sd=args.innovation_sd,
        distortions=tuple(args.distort or ()),
        seed=0,
    )
    return spec, None


def _cmd_detect(args) -> int:
    config = _detector_config(args)
    series = read_series(_series_file(args))
    estimates = detect_multiple(series, config)
    report = build_report(series, config, estimates,
                          emit_distributions=args.emit_distributions)
    print(to_json(report))
    return 0


def _cmd_scan(args) -> int:
    config = _detector_config(args)
    series = read_series(_series_file(args))
    estimate = detect_single(series, config)
    write_scan_csv(estimate.scan, sys.stdout)
    return 0


def _cmd_simulate(args, parser) -> int:
    spec, _ = _scenario(args, parser)
    spec = replace(spec, seed=args.seed)
    write_series(simulate_ar1(spec), sys.stdout)
    return 0


def _cmd_mc(args, parser) -> int:
    spec, preset_detector = _scenario(args, parser)
    config = _detector_config(args, base=preset_detector)
    report = monte_carlo(spec, config, reps=args.reps, base_seed=args.seed)
    print(to_json(mc_report_to_dict(report)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opcpd",
        description="Change-point detection via ordinal-pattern "
                    "distributions and kernel maximum mean discrepancy",
        epilog="Sample indices in all outputs are 0-based positions in the "
               "input column. Set OP_CPD_THREADS to cap Monte Carlo "
               "parallelism (results do not depend on it).")
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser(
        "detect", help="detect change-points in a CSV series, emit a JSON report")
    _add_input_flags(p_detect)
    _add_detector_flags(p_detect)
    p_detect.add_argument("--emit-distributions", action="store_true",
                          help="include per-window pattern distributions")
    p_detect.set_defaults(func=_cmd_detect)

    p_scan = sub.add_parser(
        "scan", help="emit the full MMD/CMMD curve of a CSV series as CSV")
    _add_input_flags(p_scan)
    _add_detector_flags(p_scan)
    p_scan.set_defaults(func=_cmd_scan)

    p_sim = sub.add_parser(
        "simulate", help="emit one simulated AR(1) series as CSV")
    _add_scenario_flags(p_sim)
    p_sim.set_defaults(func=lambda a: _cmd_simulate(a, p_sim))

    p_mc = sub.add_parser(
        "mc", help="Monte Carlo detection histogram over replications (JSON)")
    _add_scenario_flags(p_mc)
    _add_detector_flags(p_mc)
    p_mc.add_argument("--reps", type=int, default=100,
                      help="number of replications (default 100)")
    p_mc.set_defaults(func=lambda a: _cmd_mc(a, p_mc))

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SeriesFormatError, InsufficientDataError, InvalidSampleError,
            ReplicationError) as exc:
        print(f"opcpd: error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"opcpd: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream consumer (head, less) closed the pipe early
        return 0


if __name__ == "__main__":
    sys.exit(main())
