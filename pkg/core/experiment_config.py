# core/experiment_config.py v1.1.0
"""
ExperimentConfig: one experiment family plus its sweep, loaded from a flat
`key = value` file (`#` comments) through python-dotenv.

Resolution order: built-in defaults → EXPERIMENT_DEFAULTS[family] → file.
"""

import os
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values

from core.errors import ConfigError
from core.kernel_config import (
    DEFAULT_NODE_COUNT, DEFAULT_REGION_SIDE, DEFAULT_OMNI_RANGE, DEFAULT_REPETITIONS,
    DEFAULT_BASE_SEED, DEFAULT_TRAFFIC_F, DEFAULT_MAX_MULTIPLE, DEFAULT_ESTIMATOR,
    DEFAULT_FBC_MAX_NODES, CONNECTIVITY_MODES, EXPERIMENT_DEFAULTS, MODELS, STRATEGIES, SWEEP_KEYS, WFB_ESTIMATORS,
)
from core.utils import round_count


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    node_count: int = DEFAULT_NODE_COUNT
    width: float = DEFAULT_REGION_SIDE
    height: float = DEFAULT_REGION_SIDE
    density: Optional[float] = None
    omni_range: float = DEFAULT_OMNI_RANGE
    model: str = "sector"
    strategy: str = "randomized"
    sweep: str = "p"
    values: Tuple[float, ...] = ()
    f: float = DEFAULT_TRAFFIC_F
    p: float = 0.1
    beta: float = 2.0
    repetitions: int = DEFAULT_REPETITIONS
    base_seed: int = DEFAULT_BASE_SEED
    output: str = ""
    max_multiple: int = DEFAULT_MAX_MULTIPLE
    neighborhood_size: Optional[int] = None
    estimator: str = DEFAULT_ESTIMATOR
    fbc_max_nodes: int = DEFAULT_FBC_MAX_NODES
    connectivity: str = "strong"

    @property
    def requires_connected(self) -> bool:
        return self.connectivity == "strong"

    @property
    def is_correlation(self) -> bool:
        return self.experiment == "D"

    def geometry_for(self, sweep_value: float) -> Tuple[int, float, float]:
        """(N, width, height) of one sweep point; region sweeps keep density when it is set."""
        width, height, count = self.width, self.height, self.node_count
        if self.sweep == "region":
            width = height = float(sweep_value)
        if self.density is not None:
            count = round_count(self.density, width * height)
        return count, width, height

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENT_DEFAULTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of A–G")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.sweep not in SWEEP_KEYS:
            raise ConfigError(f"unknown sweep variable {self.sweep!r}")
        if self.estimator not in WFB_ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        if self.connectivity not in CONNECTIVITY_MODES:
            raise ConfigError(f"connectivity must be one of {CONNECTIVITY_MODES}, got {self.connectivity!r}")
        if not self.values:
            raise ConfigError("sweep values must not be empty")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.omni_range <= 0 or self.width <= 0 or self.height <= 0:
            raise ConfigError("region dimensions and omni_range must be positive")
        if self.density is not None and self.density <= 0:
            raise ConfigError("density must be positive")
        if self.max_multiple < 1:
            raise ConfigError("max_multiple must be >= 1")
        if not (0.0 <= self.f <= 1.0) or not (0.0 <= self.p <= 1.0):
            raise ConfigError("f and p must lie in [0, 1]")
        if self.beta <= 0:
            raise ConfigError("beta must be positive")

        for value in self.values:
            if self.sweep in ("p", "f") and not (0.0 <= value <= 1.0):
                raise ConfigError(f"{self.sweep} sweep value {value} outside [0, 1]")
            if self.sweep in ("beta", "region") and value <= 0:
                raise ConfigError(f"{self.sweep} sweep value {value} must be positive")
            count, _, _ = self.geometry_for(value)
            if count < 2:
                raise ConfigError(f"sweep value {value} leaves fewer than 2 nodes")
            if self.is_correlation and not (3 <= count <= self.fbc_max_nodes):
                raise ConfigError(
                    f"correlation runs need 3..{self.fbc_max_nodes} nodes, sweep value {value} gives {count}"
                )
        return self


_INT_KEYS = {"node_count", "repetitions", "base_seed", "max_multiple", "neighborhood_size", "fbc_max_nodes"}
_FLOAT_KEYS = {"width", "height", "density", "omni_range", "f", "p", "beta"}
_KNOWN_KEYS = {f.name for f in fields(ExperimentConfig)}


def _coerce(key: str, raw: Any) -> Any:
    if isinstance(raw, str):
        raw = raw.strip()
    try:
        if key == "values":
            if isinstance(raw, (list, tuple)):
                return tuple(float(v) for v in raw)
            return tuple(float(v) for v in str(raw).split(",") if v.strip())
        if key in _INT_KEYS:
            return None if raw in ("", None) and key == "neighborhood_size" else int(raw)
        if key in _FLOAT_KEYS:
            return None if raw in ("", None) and key == "density" else float(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad value for {key}: {raw!r}") from e
    if key == "experiment":
        return str(raw).upper()
    return str(raw) if raw is not None else ""


def config_from_mapping(values: Mapping[str, Any]) -> ExperimentConfig:
    """Builds and validates a config from raw key/value pairs."""
    unknown = sorted(set(values) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "experiment" not in values or not values["experiment"]:
        raise ConfigError("config must name an experiment (A–G)")

    experiment = _coerce("experiment", values["experiment"])
    merged: Dict[str, Any] = dict(EXPERIMENT_DEFAULTS.get(experiment, {}))
    merged.update(values)
    merged["experiment"] = experiment
    kwargs = {key: _coerce(key, raw) for key, raw in merged.items()}
    config = ExperimentConfig(**kwargs)
    if not config.output:
        config = replace(config, output=os.path.join("results", f"exp{experiment}.csv"))
    return config.validate()


def load_config(path: str) -> ExperimentConfig:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    raw = dotenv_values(path, interpolate=False)
    return config_from_mapping({key.strip().lower(): value for key, value in raw.items()})
