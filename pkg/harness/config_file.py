"""Plain-text ``key = value`` experiment configuration.

Example::

    schema_version = 1
    name = rx_panels
    trials_per_point = 10
    channel.osnr_db = 17
    subcarriers.centers_hz = 13.2e9, 4.4e9, -4.4e9, -13.2e9
    impairments.tx.skew_ps = 5          # both polarizations
    impairments.rx_y.imbalance_db = -1  # one polarization
    sweep.rx_skew_ps = -15:15:2.5       # start:stop:step

Top-level keys are ``ExperimentConfig`` fields; dotted keys address the
``tfit``, ``subcarriers``, ``channel`` and ``estimator`` sections,
``impairments.<tx|rx>[_<x|y>].<skew_ps|imbalance_db|quad_deg>`` and
``sweep.<axis>``.
"""

from pathlib import Path

from pydantic import BaseModel, ValidationError

from config import settings
from models.error import ConfigurationError
from models.experiment import EstimatorOptions, ExperimentConfig, SweepAxis, SweepAxisName
from models.impairment import ImpairmentSet, IqImpairment
from models.link import ChannelConfig, SubcarrierPlan
from models.tfit import Polarization, TfitPlan

SCHEMA_VERSION = 1

SECTIONS: dict[str, type[BaseModel]] = {
    "tfit": TfitPlan,
    "subcarriers": SubcarrierPlan,
    "channel": ChannelConfig,
    "estimator": EstimatorOptions,
}
TOP_LEVEL = (
    "name",
    "trials_per_point",
    "seed",
    "sc_index",
    "guard_symbols",
    "payload_symbols",
    "ber_subcarriers",
    "output_dir",
)
LIST_KEYS = ("subcarriers.centers_hz", "ber_subcarriers")
IMPAIRMENT_FIELDS = ("skew_ps", "imbalance_db", "quad_deg")


def parse_lines(lines: list[str], source: str = "<config>") -> dict[str, str]:
    """Key/value pairs of a config text; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for number, line in enumerate(lines, start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigurationError(f"{source}:{number}: expected 'key = value', got '{content}'")
        key, value = (part.strip() for part in content.split("=", 1))
        if not key:
            raise ConfigurationError(f"{source}:{number}: empty key")
        if key in values:
            raise ConfigurationError(f"{source}:{number}: duplicate key '{key}'")
        values[key] = value
    return values


def read_values(path: Path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    values = parse_lines(text.splitlines(), str(path))
    version = values.pop("schema_version", None)
    if version is None:
        raise ConfigurationError(f"{path}: missing schema_version")
    if version != str(SCHEMA_VERSION):
        raise ConfigurationError(f"{path}: schema_version {version} not supported (expected {SCHEMA_VERSION})")
    return values


def parse_overrides(items: list[str] | None) -> dict[str, str]:
    """``--set key=value`` arguments."""
    overrides: dict[str, str] = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigurationError(f"override '{item}' is not key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        overrides[key] = value
    overrides.pop("schema_version", None)
    return overrides


def _value(key: str, raw: str) -> str | list[str]:
    if key in LIST_KEYS:
        return [item.strip() for item in raw.split(",") if item.strip()]
    return raw


def _axis(name: str, raw: str) -> SweepAxis:
    try:
        axis_name = SweepAxisName(name)
    except ValueError as exc:
        raise ConfigurationError(f"unknown sweep axis '{name}'") from exc
    parts = [p.strip() for p in raw.split(":")]
    if len(parts) == 1:
        parts = [parts[0], parts[0], "0"]
    if len(parts) != 3:
        raise ConfigurationError(f"sweep.{name}: expected start:stop:step, got '{raw}'")
    return SweepAxis(name=axis_name, start=parts[0], stop=parts[1], step=parts[2])


def _impairments(entries: dict[str, str]) -> ImpairmentSet:
    """Side-wide keys first, then per-polarization keys on top."""
    per_target: dict[str, dict[str, float]] = {f"{s}_{p.value}": {} for s in ("tx", "rx") for p in Polarization}
    for key in sorted(entries, key=lambda k: "_" in k.partition(".")[0]):
        target, _, field = key.partition(".")
        if field not in IMPAIRMENT_FIELDS:
            raise ConfigurationError(f"impairments.{key}: unknown field '{field}'")
        if target in ("tx", "rx"):
            names = [f"{target}_{p.value}" for p in Polarization]
        elif target in per_target:
            names = [target]
        else:
            raise ConfigurationError(f"impairments.{key}: unknown target '{target}'")
        for name in names:
            per_target[name][field] = float(entries[key])
    return ImpairmentSet(
        **{
            name: IqImpairment.from_db(
                skew_ps=values.get("skew_ps", 0.0),
                imbalance_db=values.get("imbalance_db", 0.0),
                quad_error_deg=values.get("quad_deg", 0.0),
            )
            for name, values in per_target.items()
        }
    )


def build_config(values: dict[str, str]) -> ExperimentConfig:
    """Validate flat key/value pairs into an ``ExperimentConfig``."""
    data: dict = {}
    sections: dict[str, dict] = {name: {} for name in SECTIONS}
    impairment_entries: dict[str, str] = {}
    axes: list[SweepAxis] = []
    try:
        for key, raw in values.items():
            head, _, rest = key.partition(".")
            if not rest:
                if key not in TOP_LEVEL:
                    raise ConfigurationError(f"unknown key '{key}'")
                data[key] = _value(key, raw)
            elif head in SECTIONS:
                if rest not in SECTIONS[head].model_fields or rest == "seed":
                    raise ConfigurationError(f"unknown key '{key}'")
                sections[head][rest] = _value(key, raw)
            elif head == "impairments":
                impairment_entries[rest] = raw
            elif head == "sweep":
                axes.append(_axis(rest, raw))
            else:
                raise ConfigurationError(f"unknown section '{head}' in '{key}'")
        for name, model in SECTIONS.items():
            if sections[name]:
                data[name] = model(**sections[name])
        if impairment_entries:
            data["impairments"] = _impairments(impairment_entries)
        if axes:
            data["axes"] = axes
        data.setdefault("seed", settings.default_seed)
        data.setdefault("trials_per_point", settings.trials_per_point)
        data.setdefault("output_dir", settings.output_dir)
        return ExperimentConfig(**data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid configuration: {exc}") from exc
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def load_config(path: Path | None, overrides: list[str] | None = None) -> tuple[ExperimentConfig, dict[str, str]]:
    """Config file (optional) plus ``--set`` overrides; returns the config and the merged keys."""
    values = read_values(path) if path is not None else {}
    values.update(parse_overrides(overrides))
    return build_config(values), values
