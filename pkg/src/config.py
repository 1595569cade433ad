"""
src/config.py - Application settings.

Override via environment variables or a .env file (loaded automatically via python-dotenv).
"""

import os
from dataclasses import dataclass
from fractions import Fraction

from dotenv import load_dotenv

from src.model import parse_rational

# Load .env from the working directory
load_dotenv()


def _parse_rational_env(name: str, default: str) -> Fraction:
    """Parse an env var as an exact rational ("43/100" or "0.43", never a float)."""
    value = os.getenv(name, default).strip()
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"{name} must be a rational like 43/100, got {value!r}") from None


@dataclass
class Settings:
    """Central configuration for the facility-mechanism toolkit."""

    # Logging level for the CLI (reports go to stdout, logs to stderr)
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Default worker count for sweeps
    THREADS: int = int(os.getenv("FACLOC_THREADS", "1"))

    # θ-mechanism parameter used when --theta is not given
    DEFAULT_THETA: Fraction = _parse_rational_env("FACLOC_DEFAULT_THETA", "43/100")

    # Sweep defaults
    SWEEP_SEED: int = int(os.getenv("FACLOC_SWEEP_SEED", "0"))
    SWEEP_COUNT: int = int(os.getenv("FACLOC_SWEEP_COUNT", "10000"))

    # Position audit grid and joint-deviation cap (per agent)
    AUDIT_DENOMINATOR: int = int(os.getenv("FACLOC_AUDIT_DENOMINATOR", "20"))
    JOINT_BUDGET: int = int(os.getenv("FACLOC_JOINT_BUDGET", "5000"))

    # Exhaustive preference audits enumerate 2^k reports per agent
    EXHAUSTIVE_K_LIMIT: int = 16

    # Significant digits of the human-readable decimal rendering in reports
    DECIMAL_DIGITS: int = int(os.getenv("FACLOC_DECIMAL_DIGITS", "20"))


settings = Settings()
