# config.py
import os
from typing import Any, Dict, List, Optional, TypedDict

from dotenv import load_dotenv

from workbench.errors import InputError

DEFAULT_DEPTH = 6
DEFAULT_SEED = 0
DEFAULT_MAX_ATTEMPTS = 3


class RunConfig(TypedDict, total=False):
    command: str
    inputs: List[str]
    kstar: int
    depth: int
    precision: int
    seed: int
    output: Optional[str]
    csv: Optional[str]
    verify: Optional[str]
    # command-specific options, as parsed by the command's own arguments
    options: Dict[str, Any]


def load_environment() -> None:
    load_dotenv()  # take WORKBENCH_* variables from .env


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}")


def default_depth() -> int:
    return _env_int("WORKBENCH_DEPTH", DEFAULT_DEPTH)


def default_seed() -> int:
    return _env_int("WORKBENCH_SEED", DEFAULT_SEED)


def max_attempts() -> int:
    return _env_int("WORKBENCH_MAX_ATTEMPTS", DEFAULT_MAX_ATTEMPTS)


def validate_config(config: RunConfig) -> RunConfig:
    depth = config.get("depth", default_depth())
    if depth < 1:
        raise InputError(f"depth must be at least 1, got {depth}")
    kstar = config.get("kstar", 0)
    if not 0 <= kstar <= 3:
        raise InputError(f"kstar must be in 0..3, got {kstar}")
    return {**config, "depth": depth, "kstar": kstar, "seed": config.get("seed", default_seed()),
            "options": config.get("options", {})}
