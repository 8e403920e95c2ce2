"""
Experiment Configuration
key = value config files merged with command-line flags
"""

import argparse
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from models.errors import ConfigError
from models.ring_model import WalkConfig

from .helpers import load_defaults, parse_float_list, parse_grid, parse_int_list, phi_from_fraction

logger = logging.getLogger(__name__)

# Config key -> converter for the raw text
CONFIG_KEYS: Dict[str, Callable[[str, str], Any]] = {
    "n": lambda text, key: int(text),
    "delta": lambda text, key: int(text),
    "phi": lambda text, key: float(text),
    "phi_over_pin": lambda text, key: float(text),
    "tau": lambda text, key: float(text),
    "total_time": lambda text, key: float(text),
    "phi_grid": parse_grid,
    "tau_grid": parse_grid,
    "out": lambda text, key: text,
    "workers": lambda text, key: int(text),
    "tol_degenerate": lambda text, key: float(text),
    "tol_unit": lambda text, key: float(text),
    "n_values": parse_int_list,
    "t_values": parse_float_list,
    "k_max": lambda text, key: int(text),
    "n_max": lambda text, key: int(text),
}

# WalkConfig field -> config key
_WALK_KEYS = {"N": "n", "delta": "delta", "phi": "phi", "tau": "tau", "total_time": "total_time"}


@dataclass
class ExperimentConfig:
    """
    Fully resolved settings of one run

    lines maps each key that came from the config file to its line number.
    """

    command: str
    N: Optional[int] = None
    delta: Optional[int] = None
    phi: Optional[float] = None
    tau: Optional[float] = None
    total_time: float = 200.0
    phi_grid: Optional[np.ndarray] = None
    tau_grid: Optional[np.ndarray] = None
    out: Optional[str] = None
    workers: int = 1
    tol_degenerate: float = 1e-9
    tol_unit: float = 1e-9
    n_values: Optional[List[int]] = None
    t_values: Optional[List[float]] = None
    k_max: Optional[int] = None
    n_max: Optional[int] = None
    lines: Dict[str, int] = field(default_factory=dict)

    def require(self, *keys: str):
        """
        Raise ConfigError naming the first missing field

        Args:
            keys: Config keys ("n", "delta", ...) the subcommand needs
        """
        for key in keys:
            attribute = "N" if key == "n" else key
            if getattr(self, attribute) is None:
                raise ConfigError(key, f"missing required field for '{self.command}'")

    def walk_config(self, **overrides) -> WalkConfig:
        """WalkConfig from the resolved values; overrides win"""
        values = {
            "N": self.N,
            "delta": self.delta,
            "phi": self.phi,
            "tau": self.tau,
            "total_time": self.total_time,
            "tol_degenerate": self.tol_degenerate,
            "tol_unit": self.tol_unit,
        }
        values.update(overrides)
        for name, key in _WALK_KEYS.items():
            if values[name] is None:
                raise ConfigError(key, f"missing required field for '{self.command}'")
        try:
            return WalkConfig(**values)
        except ConfigError as e:
            key = _WALK_KEYS.get(e.key, e.key)
            raise ConfigError(key, e.message, self.lines.get(key)) from e

    def describe(self) -> str:
        """One-line echo of every resolved value"""
        parts = []
        for key in CONFIG_KEYS:
            if key == "phi_over_pin":
                continue
            value = getattr(self, "N" if key == "n" else key)
            if value is None:
                continue
            if isinstance(value, np.ndarray):
                value = f"{value[0]:.17g}:{value[-1]:.17g}:{value.size}"
            elif isinstance(value, list):
                value = ",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, float):
                value = f"{value:.17g}"
            parts.append(f"{key}={value}")
        return " ".join(parts)


def read_config_file(path: str) -> Dict[str, Tuple[str, int]]:
    """
    Read a flat key = value file; '#' starts a comment

    Returns:
        Mapping key -> (raw text, line number)
    """
    entries = {}
    try:
        with open(path, 'r') as f:
            lines = f.readlines()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror}")
    for number, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, value = text.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep or not key:
            raise ConfigError("config", f"expected key = value, got '{text}'", number)
        if key not in CONFIG_KEYS:
            raise ConfigError(key, "unknown key", number)
        entries[key] = (value.strip(), number)
    return entries


def _flag_values(args: argparse.Namespace) -> Dict[str, Any]:
    values = {}
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            values[key] = value
    return values


def parse_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Merge the optional config file with command-line flags

    Flags override file values; every walk parameter present is validated
    here so errors name the key and, for file values, the line.

    Args:
        args: Parsed command-line namespace

    Returns:
        ExperimentConfig for the subcommand
    """
    defaults = load_defaults()
    resolved: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    if getattr(args, "config", None):
        for key, (text, number) in read_config_file(args.config).items():
            try:
                resolved[key] = CONFIG_KEYS[key](text, key)
            except ConfigError as e:
                raise ConfigError(key, e.message, number)
            except ValueError:
                raise ConfigError(key, f"invalid value '{text}'", number)
            lines[key] = number

    flags = _flag_values(args)
    for key, value in flags.items():
        if isinstance(value, str) and key != "out":
            value = CONFIG_KEYS[key](value, key)
        resolved[key] = value
        lines.pop(key, None)
    # an explicit phase of either kind replaces the other one
    if "phi" in flags:
        resolved.pop("phi_over_pin", None)
    elif "phi_over_pin" in flags:
        resolved.pop("phi", None)
    if "phi" in resolved and "phi_over_pin" in resolved:
        raise ConfigError("phi_over_pin", "give either phi or phi_over_pin", lines.get("phi_over_pin"))

    walk = defaults["walk"]
    config = ExperimentConfig(
        command=args.command,
        N=resolved.get("n"),
        delta=resolved.get("delta"),
        phi=resolved.get("phi"),
        tau=resolved.get("tau"),
        total_time=resolved.get("total_time", walk["total_time"]),
        phi_grid=resolved.get("phi_grid"),
        tau_grid=resolved.get("tau_grid"),
        out=resolved.get("out"),
        workers=resolved.get("workers", os.cpu_count() or 1),
        tol_degenerate=resolved.get("tol_degenerate", walk["tol_degenerate"]),
        tol_unit=resolved.get("tol_unit", walk["tol_unit"]),
        n_values=resolved.get("n_values"),
        t_values=resolved.get("t_values"),
        k_max=resolved.get("k_max"),
        n_max=resolved.get("n_max"),
        lines=lines,
    )
    if "phi_over_pin" in resolved:
        config.require("n")
        try:
            config.phi = phi_from_fraction(resolved["phi_over_pin"], config.N)
        except ConfigError as e:
            raise ConfigError(e.key, e.message, lines.get("phi_over_pin"))
        if "phi_over_pin" in lines:
            lines["phi"] = lines["phi_over_pin"]
    _validate(config)
    logger.debug("resolved config: %s", config.describe())
    return config


def _validate(config: ExperimentConfig):
    """Check every walk parameter that is set against the WalkConfig rules"""
    if config.workers < 1:
        raise ConfigError("workers", "must be >= 1", config.lines.get("workers"))
    for key in ("k_max", "n_max"):
        value = getattr(config, key)
        if value is not None and value < 1:
            raise ConfigError(key, "must be >= 1", config.lines.get(key))
    if config.N is None:
        for key in ("delta", "phi"):
            if getattr(config, key) is not None:
                raise ConfigError("n", f"'{key}' needs the site count n")
        trial = {"N": 3, "delta": 1, "phi": 0.0}
    else:
        trial = {"N": config.N, "delta": 1 if config.delta is None else config.delta,
                 "phi": 0.0 if config.phi is None else config.phi}
    trial["tau"] = 1.0 if config.tau is None else config.tau
    config.walk_config(**trial)
