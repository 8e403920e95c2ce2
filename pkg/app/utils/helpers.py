"""
Helper Utilities
General utility functions for the command-line front end
"""

import json
import logging
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from models.errors import ConfigError

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent.parent / "data"


def load_json_file(filepath: str) -> Dict[str, Any]:
    """
    Load JSON file

    Args:
        filepath: Path to JSON file

    Returns:
        Dictionary from JSON
    """
    try:
        with open(filepath, 'r') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error("Error loading file %s: %s", filepath, e)
        raise


def load_defaults() -> Dict[str, Any]:
    """Default grids, budget and tolerances shipped with the package"""
    return load_json_file(str(DATA_DIR / "defaults.json"))


def format_timestamp() -> str:
    """Get formatted timestamp"""
    return datetime.now().strftime("%Y-%m-%d %H:%M:%S")


def parse_grid(spec: str, key: str) -> np.ndarray:
    """
    Parse a LO:HI:COUNT grid specification

    Args:
        spec: Text such as "-0.15:0.15:101"
        key: Config key reported on errors

    Returns:
        COUNT evenly spaced values from LO to HI inclusive
    """
    parts = spec.split(':')
    if len(parts) != 3:
        raise ConfigError(key, f"expected LO:HI:COUNT, got '{spec}'")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(key, f"expected LO:HI:COUNT, got '{spec}'")
    if count < 1:
        raise ConfigError(key, "grid needs at least one point")
    if count > 1 and not lo < hi:
        raise ConfigError(key, f"grid bounds must satisfy LO < HI, got {lo}:{hi}")
    return np.linspace(lo, hi, count)


def parse_int_list(spec: str, key: str) -> List[int]:
    """Parse a comma separated list of integers"""
    try:
        values = [int(item) for item in spec.split(',') if item.strip()]
    except ValueError:
        raise ConfigError(key, f"expected comma separated integers, got '{spec}'")
    if not values:
        raise ConfigError(key, "list must not be empty")
    return values


def parse_float_list(spec: str, key: str) -> List[float]:
    """Parse a comma separated list of numbers"""
    try:
        values = [float(item) for item in spec.split(',') if item.strip()]
    except ValueError:
        raise ConfigError(key, f"expected comma separated numbers, got '{spec}'")
    if not values:
        raise ConfigError(key, "list must not be empty")
    return values


def phi_from_fraction(fraction: float, N: int) -> float:
    """
    Convert phi * N / pi into radians

    Args:
        fraction: Phase in units of pi / N, within [-1, 1]
        N: Number of sites

    Returns:
        Phase in radians
    """
    if not -1.0 <= fraction <= 1.0:
        raise ConfigError("phi_over_pin", f"must lie in [-1, 1], got {fraction}")
    return fraction * math.pi / N
