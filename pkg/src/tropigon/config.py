"""
Runtime configuration.

Values come from the environment, optionally seeded by a `.env` file. They are
read on every call so that a changed environment takes effect immediately.
"""

import os

from dotenv import load_dotenv

load_dotenv()

DEFAULT_STEP_GUARD = 1_000_000
DEFAULT_MAX_GENUS = 7


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def step_guard() -> int:
    """Maximum number of firing/smoothing steps before a reduction is declared stuck."""
    return max(1, _int_env("TROPIGON_STEP_GUARD", DEFAULT_STEP_GUARD))


def max_genus() -> int:
    """Largest genus the moduli enumeration accepts."""
    return _int_env("TROPIGON_MAX_GENUS", DEFAULT_MAX_GENUS)


def default_jobs() -> int:
    """Worker processes used by enumerations when no explicit value is given."""
    return max(1, _int_env("TROPIGON_JOBS", 1))


def log_level() -> str:
    return os.getenv("TROPIGON_LOG_LEVEL", "INFO")


def log_file() -> str:
    return os.getenv("TROPIGON_LOG_FILE", "")
