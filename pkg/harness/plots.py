"""Batch plots derived from result CSVs, one file per panel."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from config import settings  # noqa: E402
from harness.csv_io import read_results  # noqa: E402
from models.error import SchemaError  # noqa: E402
from models.experiment import SweepAxisName  # noqa: E402
from models.tfit import Polarization  # noqa: E402

# swept axis -> estimated quantity plotted against it
AXIS_QUANTITY = {
    SweepAxisName.RX_SKEW_PS: ("tau_rx", "ps", "Rx IQ skew"),
    SweepAxisName.RX_IMBALANCE_DB: ("imb_rx", "db", "Rx IQ power imbalance"),
    SweepAxisName.TX_SKEW_PS: ("tau_tx", "ps", "Tx IQ skew"),
    SweepAxisName.TX_IMBALANCE_DB: ("imb_tx", "db", "Tx IQ power imbalance"),
}
UNIT_LABEL = {"ps": "ps", "db": "dB"}


def _swept_axes(frame: pd.DataFrame) -> list[SweepAxisName]:
    swept = [name for name in SweepAxisName if frame[f"axis_{name.value}"].notna().any()]
    if not swept:
        raise SchemaError("CSV has no swept axis to plot against")
    return swept


def _estimate_panel(frame: pd.DataFrame, axis: SweepAxisName, pol: Polarization, out_dir: Path, stem: str) -> Path:
    quantity, unit, title = AXIS_QUANTITY[axis]
    key = f"{quantity}_{pol.value}_{unit}"
    done = frame[frame["error"].isna() | (frame["error"] == "")]
    preset, estimate, error = done[f"preset_{key}"], done[f"est_{key}"], done[f"err_{key}"]

    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(5, 6))
    top.scatter(preset, estimate, s=12, label="estimated")
    limits = [preset.min(), preset.max()]
    top.plot(limits, limits, "k--", linewidth=1, label="y = x")
    top.set_ylabel(f"Estimated ({UNIT_LABEL[unit]})")
    top.set_title(f"{title}, {pol.value.upper()} polarization")
    top.legend()
    bottom.scatter(preset, error, s=12, color="tab:red")
    bottom.axhline(0, color="k", linewidth=1)
    bottom.set_xlabel(f"Pre-set ({UNIT_LABEL[unit]})")
    bottom.set_ylabel(f"Error ({UNIT_LABEL[unit]})")
    fig.tight_layout()

    path = out_dir / f"{stem}_{key}.{settings.plot_format}"
    fig.savefig(path)
    plt.close(fig)
    return path


def _error_panel(frame: pd.DataFrame, axis: SweepAxisName, out_dir: Path, stem: str) -> Path:
    """Per-quantity max |error| against a non-impairment axis (e.g. OSNR)."""
    done = frame[frame["error"].isna() | (frame["error"] == "")]
    column = f"axis_{axis.value}"
    fig, ax = plt.subplots(figsize=(5, 4))
    for quantity, unit, title in AXIS_QUANTITY.values():
        for pol in Polarization:
            key = f"err_{quantity}_{pol.value}_{unit}"
            worst = done.assign(abs_err=done[key].abs()).groupby(column)["abs_err"].max()
            ax.plot(worst.index, worst.values, marker="o", label=f"{title} {pol.value.upper()} ({UNIT_LABEL[unit]})")
    ax.set_xlabel(axis.value)
    ax.set_ylabel("max |error|")
    ax.legend(fontsize="x-small")
    fig.tight_layout()
    path = out_dir / f"{stem}_error_vs_{axis.value}.{settings.plot_format}"
    fig.savefig(path)
    plt.close(fig)
    return path


def _ber_panel(frame: pd.DataFrame, axis: SweepAxisName, out_dir: Path, stem: str) -> Path:
    done = frame[frame["bits_total"].notna()]
    column = f"axis_{axis.value}"
    fig, ax = plt.subplots(figsize=(5, 4))
    for (sc_index, compensated), group in done.groupby(["sc_index", "compensated"]):
        pooled = group.groupby(column)[["bit_errors", "bits_total"]].sum()
        ber = pooled["bit_errors"] / pooled["bits_total"]
        style = "-o" if compensated else "--s"
        ax.semilogy(ber.index, ber.values, style, label=f"SC-{sc_index} {'w/' if compensated else 'w/o'} comp.")
    ax.set_xlabel(axis.value)
    ax.set_ylabel("BER")
    ax.legend()
    fig.tight_layout()
    path = out_dir / f"{stem}_ber_vs_{axis.value}.{settings.plot_format}"
    fig.savefig(path)
    plt.close(fig)
    return path


def emit_plots(csv_path: Path, out_dir: Path | None = None) -> list[Path]:
    """Write every panel a result CSV supports; returns the written files."""
    csv_path = Path(csv_path)
    kind, frame = read_results(csv_path)
    out_dir = Path(out_dir) if out_dir is not None else settings.plot_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = csv_path.stem

    paths: list[Path] = []
    for axis in _swept_axes(frame):
        if kind == "ber":
            paths.append(_ber_panel(frame, axis, out_dir, stem))
        elif axis in AXIS_QUANTITY:
            paths.extend(_estimate_panel(frame, axis, pol, out_dir, stem) for pol in Polarization)
        else:
            paths.append(_error_panel(frame, axis, out_dir, stem))
    return paths
