"""
Command line: simulate scenarios, run filters, check a camera and score runs.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from vistrack.config import (
    FilterKind,
    camera_from_values,
    load_run_config,
    parse_run_config,
)
from vistrack.exceptions import DataError, GeometryError, NumericalError
from vistrack.formats import (
    ingest_corners,
    read_estimates,
    read_observations,
    read_truth,
    write_corners,
    write_estimates,
    write_observations,
    write_truth,
)
from vistrack.geometry import BoardSpec, HomPoint
from vistrack.metadata import (
    camera_metadata,
    run_metadata,
    scenario_metadata,
    write_metadata,
    write_sidecar,
)
from vistrack.metrics import evaluate
from vistrack.pipeline import calibration_overlay, run_filter
from vistrack.simulator import PRESETS, preset, simulate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

DEFAULT_TAIL = 10


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(count: int, metavar: str):
    def parse(text: str) -> tuple[float, ...]:
        parts = text.split(",")
        try:
            values = tuple(float(part) for part in parts)
        except ValueError:
            values = ()
        if len(values) != count:
            raise argparse.ArgumentTypeError(f"expected {metavar}, got '{text}'")
        return values

    return parse


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = preset(args.scenario).with_overrides(
        frames=args.frames,
        pixel_noise_std=args.pixel_noise,
        seed=args.seed,
        z0=args.z0,
        camera=camera_from_values(args.camera) if args.camera else None,
    )
    truth, observations = simulate(cfg)
    write_truth(args.out_truth, truth)
    write_observations(args.out_obs, observations)
    metadata = {"scenario": args.scenario, **scenario_metadata(cfg)}
    write_sidecar(args.out_truth, metadata)
    write_sidecar(args.out_obs, metadata)
    return EXIT_OK


def _cmd_track(args: argparse.Namespace) -> int:
    kind = FilterKind.parse(args.filter)
    config = load_run_config(args.config, kind)
    if args.corners:
        observations = ingest_corners(args.corners)
    else:
        observations = read_observations(args.obs)
    write_estimates(args.out, run_filter(observations, config))
    write_sidecar(args.out, run_metadata(config))
    return EXIT_OK


def _cmd_calib_check(args: argparse.Namespace) -> int:
    camera = camera_from_values(args.camera)
    board = BoardSpec(
        center=HomPoint(*args.board_center),
        square_size=args.square_size,
        rows=args.rows,
        cols=args.cols,
    )
    try:
        corners, pixels = calibration_overlay(camera, board, shift=args.shift)
    except GeometryError as e:
        raise DataError(f"Board cannot be projected: {e}") from e
    write_corners(args.out, corners, pixels)
    write_sidecar(
        args.out,
        {
            "camera": camera_metadata(camera),
            "board_center": list(args.board_center),
            "square_size": args.square_size,
            "rows": args.rows,
            "cols": args.cols,
            "shift": list(args.shift),
        },
    )
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    estimates = read_estimates(args.est)
    truth = read_truth(args.truth)
    tail = args.tail if args.tail is not None else min(DEFAULT_TAIL, len(truth))
    camera = camera_from_values(args.camera) if args.camera else None
    metrics = evaluate(estimates, truth, tail, camera=camera)
    for line in metrics.as_lines():
        print(line)
    return EXIT_OK


def _cmd_experiment(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metadata: dict = {"tail": args.tail, "scenarios": {}, "filters": {}}
    for scenario in PRESETS:
        cfg = preset(scenario).with_overrides(
            frames=args.frames,
            pixel_noise_std=args.pixel_noise,
            seed=args.seed,
        )
        truth, observations = simulate(cfg)
        write_truth(out_dir / f"{scenario}_truth.csv", truth)
        metadata["scenarios"][scenario] = scenario_metadata(cfg)
        write_observations(out_dir / f"{scenario}_obs.csv", observations)

        for kind in FilterKind:
            if args.config:
                config = load_run_config(args.config, kind)
            else:
                config = parse_run_config({"seed": args.seed}, kind)
            estimates = run_filter(observations, config)
            name = kind.name.lower()
            metadata["filters"][name] = run_metadata(config)
            write_estimates(out_dir / f"{scenario}_{name}.csv", estimates)
            metrics = evaluate(
                estimates, truth, min(args.tail, len(truth)), camera=config.camera
            )
            for line in metrics.as_lines():
                print(f"{scenario}.{name}.{line}")
    write_metadata(out_dir / "metadata.json", metadata)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="vistrack",
        description="3D tracking of a point seen by a pinhole camera",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    camera_type = _floats(3, "F,CX,CY")

    p = commands.add_parser("simulate", help="generate a scenario")
    p.add_argument("--scenario", required=True, choices=sorted(PRESETS))
    p.add_argument("--frames", type=int)
    p.add_argument("--pixel-noise", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--z0", type=float)
    p.add_argument("--camera", type=camera_type, metavar="F,CX,CY")
    p.add_argument("--out-truth", required=True)
    p.add_argument("--out-obs", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = commands.add_parser("track", help="run a filter over observations")
    p.add_argument("--filter", required=True, choices=["ekf", "pf"])
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--obs", help="observation CSV (frame,u,v)")
    source.add_argument("--corners", help="chessboard corner CSV, 9 corners per frame")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_track)

    p = commands.add_parser("calib-check", help="project a virtual board")
    p.add_argument("--camera", required=True, type=camera_type, metavar="F,CX,CY")
    p.add_argument("--board-center", required=True, type=_floats(3, "X,Y,Z"), metavar="X,Y,Z")
    p.add_argument("--square-size", required=True, type=float)
    p.add_argument("--rows", type=int, default=3)
    p.add_argument("--cols", type=int, default=3)
    p.add_argument(
        "--shift",
        type=_floats(3, "DX,DY,DZ"),
        default=(0.0, 0.0, 0.0),
        metavar="DX,DY,DZ",
        help="displace the board before projecting (cm)",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_calib_check)

    p = commands.add_parser("eval", help="score estimates against the truth")
    p.add_argument("--est", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--tail", type=int)
    p.add_argument("--camera", type=camera_type, metavar="F,CX,CY")
    p.set_defaults(func=_cmd_eval)

    p = commands.add_parser(
        "experiment", help="run both scenarios through both filters"
    )
    p.add_argument("--out-dir", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frames", type=int, default=60)
    p.add_argument("--pixel-noise", type=float, default=1.0)
    p.add_argument("--tail", type=int, default=DEFAULT_TAIL)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    level = logging.WARNING
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )

    try:
        return args.func(args)
    except DataError as e:
        logger.error("%s", e)
        return EXIT_DATA
    except (OSError, UnicodeError) as e:
        logger.error("%s", e)
        return EXIT_DATA
    except (NumericalError, GeometryError) as e:
        logger.error("%s", e)
        return EXIT_NUMERICAL
    except ValueError as e:
        logger.error("%s", e)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
