"""
Configuration Management Module

This module handles all configuration settings for the application,
read from environment variables and an optional local .env file.
"""

import os
from typing import Optional
from dataclasses import dataclass
from pathlib import Path
from dotenv import load_dotenv

from src.core.errors import ConfigError

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


def _int_setting(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}", name)
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}", name)
    return value


@dataclass
class Config:
    """Application configuration settings."""
    # Logging
    log_level: str

    # Parallelism and property suites
    threads: int
    seed: int
    verify_count: int

    # Paths
    output_dir: Path
    log_dir: Path

    @classmethod
    def load(cls) -> 'Config':
        """Load configuration from environment variables."""
        load_dotenv()

        base_dir = Path(__file__).parent.parent.parent
        output_dir = Path(os.getenv('KSTAR_OUTPUT_DIR', str(base_dir / "storage/output")))
        log_dir = Path(os.getenv('KSTAR_LOG_DIR', str(base_dir / "logs")))

        log_level = os.getenv('KSTAR_LOG', 'INFO').upper()
        if log_level not in LOG_LEVELS:
            raise ConfigError(f"KSTAR_LOG must be one of {', '.join(LOG_LEVELS)}, got {log_level!r}", 'KSTAR_LOG')

        return cls(
            log_level=log_level,
            threads=_int_setting('KSTAR_THREADS', os.cpu_count() or 1),
            seed=_int_setting('KSTAR_SEED', 20240101, minimum=0),
            verify_count=_int_setting('KSTAR_VERIFY_COUNT', 1000),
            output_dir=output_dir,
            log_dir=log_dir,
        )


# Create a singleton instance
_config_instance: Optional[Config] = None


def load_config() -> Config:
    """Load and return application configuration."""
    global _config_instance
    if _config_instance is None:
        _config_instance = Config.load()
    return _config_instance


def reset_config() -> None:
    """Forget the loaded configuration so the next load re-reads the environment."""
    global _config_instance
    _config_instance = None


__all__ = ['Config', 'load_config', 'reset_config', 'LOG_LEVELS']
