"""Experiment configuration: flat ``section.key = value`` text files.

Omitted keys fall back to the default operating point (the standard radio
constants plus the densities the reference experiments use).  Powers are
given in dBm and converted once on load; everything downstream is SI.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .content import ContentConfig, EXPLICIT, MOST_POPULAR
from .montecarlo import SimulationSpec
from .params import DeliverySpec, DeploymentConfig, RadioConfig


class ConfigError(ValueError):
    """Raised for unparseable files, unknown keys or invalid values."""


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentKnobs:
    """Grids and conditioning loads used by the experiment commands."""

    s_o: int = 10
    kmax_load: int = 5
    k_values: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8)
    eps_values: tuple[float, ...] = (0.5, 0.6, 0.7, 0.8, 0.9)
    rho_values: tuple[float, ...] = (0.1, 0.01)
    n_values: tuple[int, ...] = (64, 128, 256)
    s_o_values: tuple[int, ...] = (5, 10, 15)
    cache_sizes: tuple[int, ...] = tuple(range(1000, 10000, 1000))


@dataclass(frozen=True)
class ExperimentConfig:
    radio: RadioConfig = field(default_factory=RadioConfig)
    deploy: DeploymentConfig = field(default_factory=DeploymentConfig)
    content: ContentConfig = field(default_factory=ContentConfig)
    delivery: DeliverySpec = field(default_factory=DeliverySpec)
    sim: SimulationSpec | None = field(default_factory=SimulationSpec)
    experiment: ExperimentKnobs = field(default_factory=ExperimentKnobs)
    sweep: SweepSpec | None = None


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part.strip()) for part in text.split(",") if part.strip())


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(_parse_int(part.strip()) for part in text.split(",") if part.strip())


# dotted key -> (section, field name, parser)
_KEYS = {
    "radio.p_a_dbm": ("radio", "p_a_dbm", float),
    "radio.p_b_dbm": ("radio", "p_b_dbm", float),
    "radio.alpha_a": ("radio", "alpha_a", float),
    "radio.alpha_b": ("radio", "alpha_b", float),
    "radio.carrier_hz": ("radio", "carrier_hz", float),
    "radio.bandwidth_hz": ("radio", "bandwidth_hz", float),
    "radio.eta": ("radio", "eta", float),
    "radio.r_b_m": ("radio", "r_b_m", float),
    "deploy.lambda_u": ("deploy", "lambda_u", float),
    "deploy.lambda_s": ("deploy", "lambda_s", float),
    "deploy.lambda_m": ("deploy", "lambda_m", float),
    "deploy.antennas": ("deploy", "antennas", _parse_int),
    "deploy.gamma_load": ("deploy", "gamma_load", float),
    "content.library_size": ("content", "library_size", _parse_int),
    "content.zipf_exponent": ("content", "zipf_exponent", float),
    "content.cache_size": ("content", "cache_size", _parse_int),
    "content.placement": ("content", "placement", str),
    "content.q": ("content", "explicit_q", _parse_float_list),
    "delivery.content_bits": ("delivery", "content_bits", float),
    "delivery.deadline_s": ("delivery", "deadline_s", float),
    "delivery.scd_threshold": ("delivery", "scd_threshold", float),
    "delivery.overload_rho": ("delivery", "overload_rho", float),
    "delivery.min_backhaul_rate": ("delivery", "min_backhaul_rate", float),
    "sim.enabled": ("sim", "enabled", _parse_bool),
    "sim.trials": ("sim", "trials", _parse_int),
    "sim.seed": ("sim", "seed", _parse_int),
    "sim.window_radius_m": ("sim", "window_radius_m", float),
    "sim.include_noise": ("sim", "include_noise", _parse_bool),
    "experiment.s_o": ("experiment", "s_o", _parse_int),
    "experiment.kmax_load": ("experiment", "kmax_load", _parse_int),
    "experiment.k_values": ("experiment", "k_values", _parse_int_list),
    "experiment.eps_values": ("experiment", "eps_values", _parse_float_list),
    "experiment.rho_values": ("experiment", "rho_values", _parse_float_list),
    "experiment.n_values": ("experiment", "n_values", _parse_int_list),
    "experiment.s_o_values": ("experiment", "s_o_values", _parse_int_list),
    "experiment.cache_sizes": ("experiment", "cache_sizes", _parse_int_list),
    "sweep.parameter": ("sweep", "parameter", str),
    "sweep.values": ("sweep", "values", _parse_float_list),
}


def parse_config_text(text: str) -> dict[str, object]:
    """Parse the flat key-value syntax into a {dotted key: value} dict."""
    values: dict[str, object] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(
                f"line {line_no}, column {len(raw) + 1}: expected 'key = value'"
            )
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        column = raw.index("=") + 2
        if key not in _KEYS:
            raise ConfigError(f"line {line_no}, column 1: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {line_no}, column 1: duplicate key {key!r}")
        _, _, parser = _KEYS[key]
        try:
            values[key] = parser(value_text)
        except ValueError as exc:
            raise ConfigError(f"line {line_no}, column {column}: {exc}") from exc
    return values


def build_config(values: dict[str, object]) -> ExperimentConfig:
    """Assemble the validated config from parsed key-value pairs."""
    sections: dict[str, dict[str, object]] = {}
    for key, value in values.items():
        section, field_name, _ = _KEYS[key]
        sections.setdefault(section, {})[field_name] = value

    try:
        radio = RadioConfig(**sections.get("radio", {}))
        deploy = DeploymentConfig(**sections.get("deploy", {}))
        content_kwargs = sections.get("content", {})
        if "explicit_q" in content_kwargs:
            content_kwargs = dict(content_kwargs)
            content_kwargs["explicit_q"] = np.asarray(
                content_kwargs["explicit_q"], dtype=float
            )
        content = ContentConfig(**content_kwargs)
        delivery = DeliverySpec(**sections.get("delivery", {}))
        sim_kwargs = dict(sections.get("sim", {}))
        enabled = sim_kwargs.pop("enabled", True)
        sim = SimulationSpec(**sim_kwargs) if enabled else None
        experiment = ExperimentKnobs(**sections.get("experiment", {}))
        sweep_kwargs = sections.get("sweep")
        sweep = None
        if sweep_kwargs:
            if "parameter" not in sweep_kwargs or "values" not in sweep_kwargs:
                raise ConfigError("sweep: both sweep.parameter and sweep.values are required")
            parameter = str(sweep_kwargs["parameter"])
            if parameter not in _KEYS or parameter.startswith("sweep."):
                raise ConfigError(f"sweep.parameter: {parameter!r} is not a recognized field")
            sweep = SweepSpec(parameter=parameter, values=tuple(sweep_kwargs["values"]))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(
        radio=radio,
        deploy=deploy,
        content=content,
        delivery=delivery,
        sim=sim,
        experiment=experiment,
        sweep=sweep,
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return build_config(parse_config_text(text))


def default_config() -> ExperimentConfig:
    return ExperimentConfig()


def apply_override(cfg: ExperimentConfig, dotted_key: str, value) -> ExperimentConfig:
    """Return a copy of the config with one dotted field replaced."""
    if dotted_key not in _KEYS:
        raise ConfigError(f"unknown key {dotted_key!r}")
    section, field_name, parser = _KEYS[dotted_key]
    if section == "sweep":
        raise ConfigError("sweep keys cannot be swept")
    if isinstance(value, str):
        value = parser(value)
    elif parser is _parse_int and not isinstance(value, int):
        if not float(value).is_integer():
            raise ConfigError(f"{dotted_key}: expected an integer, got {value!r}")
        value = int(value)
    current = getattr(cfg, section)
    if current is None:
        raise ConfigError(f"{dotted_key}: section {section!r} is disabled")
    try:
        replaced = dataclasses.replace(current, **{field_name: value})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return dataclasses.replace(cfg, **{section: replaced})


def format_real(value: float) -> str:
    """CSV representation: 12 significant digits, '.' decimal separator."""
    if value != value:  # nan
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.12g}"
