"""Command-line front end: ``python -m harness <command> ...``."""

import argparse
from pathlib import Path

from config import settings
from harness.capture_file import read_dual_pol, write_capture
from harness.config_file import load_config
from harness.csv_io import write_ber_csv, write_estimation_csv
from harness.detect import frame_detect
from harness.pipeline import LEAF_SAMPLES_PER_SYMBOL, estimate_all, training_capture
from harness.plots import emit_plots
from harness.sweeps import (
    BER_DEFAULT_OSNR_DB,
    PANELS,
    panel_config,
    run_ber_sweep,
    run_estimation_sweep,
    trial_channel,
)
from models.error import ExitCode, LabError
from models.experiment import ExperimentConfig
from utils.logger import get_logger

logger = get_logger("harness.cli", settings.log_level)

SWEEP_COMMANDS = {"sweep-rx": "rx", "sweep-tx": "tx", "sweep-coexist": "coexist", "sweep-ber": "ber"}


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="key = value experiment file")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="Override a config key")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harness", description="Far-end IQ skew and imbalance estimation lab")
    commands = parser.add_subparsers(dest="command", required=True)

    for command, group in SWEEP_COMMANDS.items():
        sweep = commands.add_parser(command, help=f"Run the {group} sweep panels")
        _add_config_arguments(sweep)
        sweep.add_argument("--workers", type=int, default=settings.parallel_workers, help="Worker processes")
        sweep.add_argument("--out", type=Path, help="CSV directory (default: <output_dir>/csv)")
        sweep.add_argument("--plots", action="store_true", help="Also render plots for each CSV")

    estimate = commands.add_parser("estimate", help="Estimate IQ impairments from a capture file")
    _add_config_arguments(estimate)
    estimate.add_argument("capture", type=Path, help="Capture file (2 channels, 2 samples/symbol)")
    estimate.add_argument("--report", type=Path, help="Where to write the JSON estimate report")

    capture = commands.add_parser("capture", help="Simulate a leaf capture of the training frame")
    _add_config_arguments(capture)
    capture.add_argument("output", type=Path, help="Capture file to write")

    plot = commands.add_parser("plot", help="Render plots from result CSVs")
    plot.add_argument("csv", type=Path, nargs="+", help="Result CSV files")
    plot.add_argument("--out", type=Path, help="Plot directory (default: <output_dir>/plots)")
    return parser


def _panels(cfg: ExperimentConfig, group: str) -> list[ExperimentConfig]:
    """Configured axes form one sweep; otherwise the group's default panels."""
    if cfg.axes:
        return [cfg]
    return [panel_config(cfg, panel) for panel in PANELS[group]]


def _run_sweeps(args: argparse.Namespace) -> int:
    group = SWEEP_COMMANDS[args.command]
    cfg, values = load_config(args.config, args.overrides)
    if group == "ber" and "channel.osnr_db" not in values:
        cfg = cfg.model_copy(update={"channel": cfg.channel.model_copy(update={"osnr_db": BER_DEFAULT_OSNR_DB})})
    out_dir = args.out or cfg.csv_dir

    for panel_cfg in _panels(cfg, group):
        if group == "ber":
            path = write_ber_csv(run_ber_sweep(panel_cfg, args.workers), out_dir / f"{panel_cfg.name}.csv")
        else:
            path = write_estimation_csv(run_estimation_sweep(panel_cfg, args.workers), out_dir / f"{panel_cfg.name}.csv")
        logger.info(f"Wrote {path}")
        if args.plots:
            for plot_path in emit_plots(path, cfg.plot_dir):
                logger.info(f"Wrote {plot_path}")
    return ExitCode.SUCCESS


def _run_estimate(args: argparse.Namespace) -> int:
    cfg, _ = load_config(args.config, args.overrides)
    capture = read_dual_pol(args.capture)
    location = frame_detect(capture, cfg.tfit, LEAF_SAMPLES_PER_SYMBOL)
    report = estimate_all(capture, location, cfg.tfit, cfg.estimator, cfg.sc_index)
    path = args.report or cfg.report_dir / f"{args.capture.stem}.json"
    report.write_json(path)
    for key, value in report.finals().items():
        logger.info(f"{key} = {value:+.3f}")
    logger.info(f"Wrote {path}")
    return ExitCode.SUCCESS


def _run_capture(args: argparse.Namespace) -> int:
    cfg, _ = load_config(args.config, args.overrides)
    impairments = cfg.point_impairments({})
    capture = training_capture(cfg, impairments, trial_channel(cfg, {}, cfg.seed), cfg.sc_index)
    path = write_capture(args.output, [capture.x, capture.y])
    logger.info(f"Wrote {path} ({len(capture)} samples/channel)")
    return ExitCode.SUCCESS


def _run_plot(args: argparse.Namespace) -> int:
    for csv_path in args.csv:
        for path in emit_plots(csv_path, args.out):
            logger.info(f"Wrote {path}")
    return ExitCode.SUCCESS


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"estimate": _run_estimate, "capture": _run_capture, "plot": _run_plot}
    handler = handlers.get(args.command, _run_sweeps)
    try:
        return int(handler(args))
    except LabError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return int(exc.exit_code)
    except OSError as exc:
        logger.error(f"I/O error: {exc}")
        return int(ExitCode.IO)
