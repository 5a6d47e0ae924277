"""Environment-driven settings.

Values are read at call time so tests can monkeypatch the environment.
"""
import os
from typing import Tuple

DEFAULT_WINDOW: Tuple[int, int] = (-24, 24)
DEFAULT_WORD_LENGTH = 3
DEFAULT_SEED = 0
DEFAULT_CASES = 500


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


def get_max_degree() -> int:
    """Largest |degree| a window may reach."""
    return _int_env("LOOPALG_MAX_DEGREE", 64)


def get_max_rank() -> int:
    """Largest rank m accepted for the SO families of the catalog."""
    return _int_env("LOOPALG_MAX_RANK", 6)


def get_step_guard() -> int:
    return _int_env("LOOPALG_STEP_GUARD", 1_000_000)


def get_log_level() -> str:
    return os.getenv("LOOPALG_LOG_LEVEL", "WARNING").upper()


def get_cache_size() -> int:
    """Entries kept by each per-algebra memo (normal forms, products, operators)."""
    return _int_env("LOOPALG_CACHE_SIZE", 65_536)
