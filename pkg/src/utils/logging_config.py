"""
Logging Configuration Module

This module provides centralized logging configuration for the application.
Records go to a log file and to stderr; stdout stays free for reports.
"""

import logging
import sys
from pathlib import Path
import os
from typing import Optional


def setup_logging(log_level: Optional[str] = None, log_dir: Optional[Path] = None) -> None:
    """
    Setup application logging with file and console handlers.

    Args:
        log_level: Optional log level override (DEBUG, INFO, WARNING, ERROR)
        log_dir: Optional directory for the log file
    """
    # Explicit level, then KSTAR_LOG, then LOG_LEVEL
    if log_level is None:
        log_level = os.getenv('KSTAR_LOG') or os.getenv('LOG_LEVEL', 'INFO')
    log_level = log_level.upper()

    valid_levels = {'DEBUG', 'INFO', 'WARNING', 'ERROR'}
    if log_level not in valid_levels:
        log_level = 'INFO'

    if log_dir is None:
        log_dir = Path(os.getenv('KSTAR_LOG_DIR', str(Path(__file__).parent.parent.parent / 'logs')))
    log_dir.mkdir(parents=True, exist_ok=True)

    logging.basicConfig(
        level=getattr(logging, log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(
                log_dir / f"kstar_{log_level.lower()}.log"
            ),
            logging.StreamHandler(sys.stderr)
        ],
        force=True,
    )


__all__ = ['setup_logging']
