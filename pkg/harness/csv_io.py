"""Frozen CSV schemas for sweep results.

Column names carry their unit suffix (``_ps``, ``_db``). Axis columns exist
for every sweepable quantity and stay empty when the quantity is not swept.
"""

from pathlib import Path

import pandas as pd

from dsp.payload import theory_ber_16qam
from models.error import SchemaError
from models.experiment import ESTIMATE_KEYS, BerRow, SweepAxisName, SweepRow

FLOAT_FORMAT = "%.9g"

AXIS_COLUMNS = [f"axis_{name.value}" for name in SweepAxisName]

ESTIMATION_COLUMNS = [
    "point",
    "trial",
    "seed",
    *AXIS_COLUMNS,
    *(f"{kind}_{key}" for key in ESTIMATE_KEYS for kind in ("preset", "est", "err")),
    "min_tone_snr_db",
    "out_of_range",
    "error",
]

BER_COLUMNS = [
    "point",
    "trial",
    "seed",
    *AXIS_COLUMNS,
    "sc_index",
    "compensated",
    "bit_errors",
    "bits_total",
    "ber",
    "snr_db",
    "theory_ber",
    "error",
]


def _axis_cells(axes: dict[str, float]) -> dict[str, float | None]:
    return {f"axis_{name.value}": axes.get(name.value) for name in SweepAxisName}


def estimation_frame(rows: list[SweepRow]) -> pd.DataFrame:
    records = []
    for row in rows:
        record: dict = {"point": row.point, "trial": row.trial, "seed": str(row.seed), **_axis_cells(row.axes)}
        errors = row.errors
        for key in ESTIMATE_KEYS:
            record[f"preset_{key}"] = row.preset.get(key)
            record[f"est_{key}"] = row.estimate.get(key)
            record[f"err_{key}"] = errors.get(key)
        record["min_tone_snr_db"] = row.min_tone_snr_db
        record["out_of_range"] = int(row.out_of_range)
        record["error"] = row.error or ""
        records.append(record)
    return pd.DataFrame(records, columns=ESTIMATION_COLUMNS)


def ber_frame(rows: list[BerRow]) -> pd.DataFrame:
    records = []
    for row in rows:
        result = row.result
        records.append(
            {
                "point": row.point,
                "trial": row.trial,
                "seed": str(row.seed),
                **_axis_cells(row.axes),
                "sc_index": row.sc_index,
                "compensated": int(row.compensated),
                "bit_errors": result.bit_errors if result else None,
                "bits_total": result.bits_total if result else None,
                "ber": result.ber if result else None,
                "snr_db": result.snr_db if result else None,
                "theory_ber": theory_ber_16qam(result.snr_db) if result else None,
                "error": row.error or "",
            }
        )
    return pd.DataFrame(records, columns=BER_COLUMNS)


def write_frame(frame: pd.DataFrame, path: Path) -> Path:
    """UTF-8 CSV with a header row; the float format keeps reruns byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8", lineterminator="\n")
    return path


def write_estimation_csv(rows: list[SweepRow], path: Path) -> Path:
    return write_frame(estimation_frame(rows), path)


def write_ber_csv(rows: list[BerRow], path: Path) -> Path:
    return write_frame(ber_frame(rows), path)


def read_results(path: Path) -> tuple[str, pd.DataFrame]:
    """Read a result CSV; returns ("estimation" | "ber", frame).

    Raises SchemaError for missing files, empty tables or unknown column sets.
    """
    try:
        frame = pd.read_csv(path, dtype={"seed": str, "error": str}, keep_default_na=True)
    except FileNotFoundError as exc:
        raise SchemaError(f"{path}: no such file") from exc
    except pd.errors.EmptyDataError as exc:
        raise SchemaError(f"{path}: empty CSV") from exc
    columns = list(frame.columns)
    if columns == ESTIMATION_COLUMNS:
        kind = "estimation"
    elif columns == BER_COLUMNS:
        kind = "ber"
    else:
        raise SchemaError(f"{path}: columns do not match a known schema")
    if frame.empty:
        raise SchemaError(f"{path}: no result rows")
    return kind, frame
