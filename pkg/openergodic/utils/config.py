"""
Run configuration: YAML file, then command-line overrides, then EO_SEED.

Author: openergodic contributors
"""

import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

import yaml

from openergodic.utils.errors import ConfigError

base_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
config_path = os.path.join(base_dir, "config", "Default.yaml")

SEED_ENV_VAR = "EO_SEED"
GOLDEN_MODES = ("write", "check", "off")


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every identity check."""
    parseval: float = 1e-10
    identity: float = 1e-8
    quadrature: float = 1e-9
    stabilization: float = 1e-12

    def __post_init__(self):
        for name in ("parseval", "identity", "quadrature", "stabilization"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"Tolerance {name} must be positive, got {value}")


@dataclass(frozen=True)
class CornerSettings:
    """Thresholds of the corner-block construction (beta = factor * alpha, gamma = factor * beta)."""
    beta_factor: float = 0.99
    gamma_factor: float = 0.99
    tail_fraction: float = 0.5

    def __post_init__(self):
        for name in ("beta_factor", "gamma_factor", "tail_fraction"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ConfigError(f"Corner setting {name} must lie in (0, 1), got {value}")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    tolerances: Tolerances = field(default_factory=Tolerances)
    rho: float = 2.0
    grid_size: int = 1024
    output_dir: str = "results"
    golden_mode: str = "off"
    golden_file: str = "goldens.yaml"
    n_jobs: int = 4
    log_level: int = 2
    corner: CornerSettings = field(default_factory=CornerSettings)

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.rho > 1:
            raise ConfigError(f"rho must be > 1, got {self.rho}")
        if self.grid_size < 1 or self.grid_size & (self.grid_size - 1):
            raise ConfigError(f"grid_size must be a power of two, got {self.grid_size}")
        if self.golden_mode not in GOLDEN_MODES:
            raise ConfigError(f"golden_mode must be one of {GOLDEN_MODES}, got {self.golden_mode!r}")
        if self.n_jobs < 1:
            raise ConfigError(f"n_jobs must be >= 1, got {self.n_jobs}")

    @property
    def golden_path(self) -> str:
        if os.path.isabs(self.golden_file):
            return self.golden_file
        return os.path.join(self.output_dir, self.golden_file)

    def with_overrides(self, **overrides) -> "RunConfig":
        """Return a copy with every non-None override applied."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **changes) if changes else self


def _golden_mode(value: Any) -> str:
    # YAML reads a bare `off` as False
    if value is False:
        return "off"
    return str(value)


def config_from_dict(config: Dict[str, Any]) -> RunConfig:
    """
    Build a RunConfig from a parsed YAML mapping; missing keys take defaults.
    :param config: dict, as returned by yaml.safe_load
    :return: RunConfig
    """
    if not isinstance(config, dict):
        raise ConfigError(f"Config root must be a mapping, got {type(config).__name__}")
    tolerances = config.get('tolerances', {}) or {}
    corner = config.get('corner', {}) or {}
    try:
        return RunConfig(
            seed=int(config.get('seed', 42)),
            tolerances=Tolerances(**{k: float(v) for k, v in tolerances.items()}),
            rho=float(config.get('rho', 2.0)),
            grid_size=int(config.get('grid_size', 1024)),
            output_dir=str(config.get('output_dir', 'results')),
            golden_mode=_golden_mode(config.get('golden_mode', 'off')),
            golden_file=str(config.get('golden_file', 'goldens.yaml')),
            n_jobs=int(config.get('n_jobs', 4)),
            log_level=int(config.get('log_level', 2)),
            corner=CornerSettings(**{k: float(v) for k, v in corner.items()}),
        )
    except TypeError as e:
        raise ConfigError(f"Unknown config key: {e}") from e


def load_config(config_file: Optional[str] = None, env: Optional[Dict[str, str]] = None, **overrides) -> RunConfig:
    """
    Load the run configuration.
    :param config_file: str, YAML path; falls back to the packaged Default.yaml when missing
    :param env: mapping used for the EO_SEED lookup, defaults to os.environ
    :param overrides: command-line values, applied when not None
    :return: RunConfig
    """
    if config_file is None or not os.path.exists(config_file):
        if config_file is not None:
            logging.warning(f'Config file {config_file} does not exist, using default config')
        config_file = config_path

    with open(config_file, 'r') as file:
        config = yaml.safe_load(file) or {}

    run_config = config_from_dict(config).with_overrides(**overrides)

    env = os.environ if env is None else env
    seed = env.get(SEED_ENV_VAR)
    if seed:
        try:
            run_config = replace(run_config, seed=int(seed))
        except ValueError as e:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {seed!r}") from e
    logging.debug(f"Loaded config from {config_file}: seed={run_config.seed}, golden_mode={run_config.golden_mode}")
    return run_config
