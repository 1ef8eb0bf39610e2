"""Monte-Carlo sweeps over impairment grids, one process task per trial."""

import logging
import math
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from dsp.compensate import average_tx_reports
from harness.pipeline import estimate_leaf, leaf_rx_specs, payload_ber
from models.error import LabError, LowConfidenceError
from models.experiment import BerRow, ExperimentConfig, SweepAxis, SweepAxisName, SweepRow, preset_values
from models.link import ChannelConfig
from models.signal import RngStream
from utils.logger import Logger

PAYLOAD_STREAM = 3
BER_DEFAULT_OSNR_DB = 22.0

SKEW_RANGE = (-15.0, 15.0, 2.5)
IMBALANCE_RANGE = (-3.0, 3.0, 0.5)


class SweepPanel(BaseModel):
    """One sweep panel: swept axes plus impairments held fixed for the whole panel."""

    model_config = ConfigDict(frozen=True)

    name: str
    axes: list[SweepAxis]
    fixed: dict[str, float] = Field(default_factory=dict)


def _axis(name: SweepAxisName) -> SweepAxis:
    start, stop, step = SKEW_RANGE if name.value.endswith("_ps") else IMBALANCE_RANGE
    return SweepAxis(name=name, start=start, stop=stop, step=step)


def _single(name: SweepAxisName, **fixed: float) -> SweepPanel:
    return SweepPanel(name=name.value, axes=[_axis(name)], fixed=fixed)


PANELS: dict[str, list[SweepPanel]] = {
    "rx": [_single(SweepAxisName.RX_SKEW_PS), _single(SweepAxisName.RX_IMBALANCE_DB)],
    "tx": [_single(SweepAxisName.TX_SKEW_PS), _single(SweepAxisName.TX_IMBALANCE_DB)],
    "coexist": [
        _single(SweepAxisName.RX_SKEW_PS, tx_skew_ps=5.0, tx_imbalance_db=1.0, rx_imbalance_db=-1.0),
        _single(SweepAxisName.RX_IMBALANCE_DB, tx_skew_ps=5.0, tx_imbalance_db=1.0, rx_skew_ps=-5.0),
        _single(SweepAxisName.TX_SKEW_PS, tx_imbalance_db=1.0, rx_skew_ps=-5.0, rx_imbalance_db=-1.0),
        _single(SweepAxisName.TX_IMBALANCE_DB, tx_skew_ps=5.0, rx_skew_ps=-5.0, rx_imbalance_db=-1.0),
    ],
    "ber": [
        _single(SweepAxisName.RX_SKEW_PS),
        _single(SweepAxisName.RX_IMBALANCE_DB),
        _single(SweepAxisName.TX_SKEW_PS),
        _single(SweepAxisName.TX_IMBALANCE_DB),
    ],
}


def panel_config(cfg: ExperimentConfig, panel: SweepPanel) -> ExperimentConfig:
    """``cfg`` with the panel's axes and fixed impairments."""
    return cfg.model_copy(
        update={
            "name": f"{cfg.name}_{panel.name}",
            "axes": list(panel.axes),
            "impairments": cfg.point_impairments(panel.fixed),
        }
    )


def trial_seed(seed: int, point: int, trial: int) -> int:
    """Independent, reproducible seed for one trial of one grid point."""
    return RngStream(seed=seed).child(point).child(trial).seed


def trial_channel(cfg: ExperimentConfig, point: dict[str, float], seed: int) -> ChannelConfig:
    return cfg.point_channel(point).model_copy(update={"seed": RngStream(seed=seed)})


def _describe(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def _execute(func: Callable[[Any], Any], tasks: list[Any], workers: int) -> list[Any]:
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, tasks))


def _tasks(cfg: ExperimentConfig) -> list[tuple[ExperimentConfig, int, dict[str, float], int]]:
    return [
        (cfg, index, point, trial)
        for index, point in enumerate(cfg.grid())
        for trial in range(cfg.trials_per_point)
    ]


def estimation_trial(task: tuple[ExperimentConfig, int, dict[str, float], int]) -> SweepRow:
    """One grid point, one trial; stage errors land in the row."""
    cfg, index, point, trial = task
    seed = trial_seed(cfg.seed, index, trial)
    preset: dict[str, float] = {}
    try:
        impairments = cfg.point_impairments(point)
        preset = preset_values(impairments)
        report = estimate_leaf(cfg, impairments, trial_channel(cfg, point, seed))
    except (LabError, ValueError) as exc:
        level = logging.WARNING if isinstance(exc, LowConfidenceError) else logging.ERROR
        Logger.log(f"Point {index} trial {trial}: {_describe(exc)}", level=level)
        return SweepRow(point=index, trial=trial, seed=seed, axes=point, preset=preset, error=_describe(exc))
    return SweepRow.from_report(index, trial, seed, point, preset, report)


def _log_points(rows: Iterable[SweepRow]) -> None:
    by_point: dict[int, list[SweepRow]] = {}
    for row in rows:
        by_point.setdefault(row.point, []).append(row)
    for index, point_rows in sorted(by_point.items()):
        done = [r for r in point_rows if r.error is None]
        if not done:
            Logger.log(f"Point {index}: all {len(point_rows)} trials failed", level=logging.WARNING)
            continue
        skew = max(r.max_abs_error("tau") for r in done)
        imbalance = max(r.max_abs_error("imb") for r in done)
        Logger.log(
            f"Point {index} {point_rows[0].axes}: max |skew error| {skew:.3f} ps, "
            f"max |imbalance error| {imbalance:.3f} dB over {len(done)} trials"
        )


def run_estimation_sweep(cfg: ExperimentConfig, workers: int = 1) -> list[SweepRow]:
    """Estimate every trial of every grid point; rows sorted by (point, trial)."""
    tasks = _tasks(cfg)
    Logger.log(f"Estimation sweep '{cfg.name}': {len(tasks)} trials on {workers} worker(s)")
    rows = sorted(_execute(estimation_trial, tasks, workers), key=lambda r: (r.point, r.trial))
    _log_points(rows)
    return rows


def ber_trial(task: tuple[ExperimentConfig, int, dict[str, float], int]) -> list[BerRow]:
    """Uncompensated and compensated BER of the configured subcarriers under one seed."""
    cfg, index, point, trial = task
    seed = trial_seed(cfg.seed, index, trial)
    payload_rng = RngStream(seed=seed).child(PAYLOAD_STREAM)
    rows: list[BerRow] = []

    def _rows(compensated: bool, results: dict | None, error: str | None) -> list[BerRow]:
        return [
            BerRow(
                point=index,
                trial=trial,
                seed=seed,
                axes=point,
                sc_index=sc_index,
                compensated=compensated,
                result=results[sc_index] if results else None,
                error=error,
            )
            for sc_index in cfg.ber_subcarriers
        ]

    try:
        impairments = cfg.point_impairments(point)
        channel = trial_channel(cfg, point, seed)
        rows += _rows(False, payload_ber(cfg, impairments, channel, payload_rng), None)
    except (LabError, ValueError) as exc:
        Logger.log(f"Point {index} trial {trial} baseline: {_describe(exc)}", level=logging.ERROR)
        return _rows(False, None, _describe(exc)) + _rows(True, None, _describe(exc))

    try:
        reports = [estimate_leaf(cfg, impairments, channel, sc_index) for sc_index in cfg.ber_subcarriers]
        tx_specs = average_tx_reports(reports)
        rx_specs = {r.sc_index: leaf_rx_specs(r, cfg.estimator.gsop) for r in reports}
        rows += _rows(True, payload_ber(cfg, impairments, channel, payload_rng, tx_specs, rx_specs), None)
    except (LabError, ValueError) as exc:
        Logger.log(f"Point {index} trial {trial} compensated: {_describe(exc)}", level=logging.ERROR)
        rows += _rows(True, None, _describe(exc))
    return rows


def run_ber_sweep(cfg: ExperimentConfig, workers: int = 1) -> list[BerRow]:
    """BER with and without compensation; rows sorted by (point, trial, compensated, sc_index)."""
    tasks = _tasks(cfg)
    Logger.log(f"BER sweep '{cfg.name}': {len(tasks)} trials on {workers} worker(s)")
    rows = [row for batch in _execute(ber_trial, tasks, workers) for row in batch]
    rows.sort(key=lambda r: (r.point, r.trial, r.compensated, r.sc_index))
    for row in rows:
        if row.result is not None and row.trial == 0:
            Logger.log(
                f"Point {row.point} SC-{row.sc_index} {'w/' if row.compensated else 'w/o'} compensation: "
                f"BER {row.result.ber:.3e}"
            )
    return rows


def pooled_ber(rows: Iterable[BerRow], sc_index: int, compensated: bool) -> float:
    """Bit errors over bits across all successful trials of a selection."""
    selected = [r.result for r in rows if r.result is not None and r.sc_index == sc_index and r.compensated == compensated]
    bits = sum(r.bits_total for r in selected)
    return sum(r.bit_errors for r in selected) / bits if bits else math.nan
