"""
Resume State Module

This module persists the progress of long classification runs so that an
interrupted run can continue after the last fully completed Picard index.
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Optional, Union

from src.core.errors import InputError

logger = logging.getLogger(__name__)

RESUME_VERSION = 1


class ResumeState:
    """
    File-backed progress marker.

    The file holds {"version", "command", "max_completed_iota"} plus optional
    cumulative census counts; every save replaces it atomically.
    """

    def __init__(self, path: Union[str, Path], command: str):
        """
        Initialize resume state.

        Args:
            path: Resume file path
            command: Sub-command the progress belongs to
        """
        self.path = Path(path)
        self.command = command
        self.max_completed_iota = 0
        self.cumulative: Optional[Dict[str, int]] = None
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        try:
            with open(self.path) as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"invalid resume file ({e})", str(self.path))
        if data.get('version') != RESUME_VERSION:
            raise InputError(f"unsupported resume file version {data.get('version')!r}", str(self.path))
        if data.get('command') != self.command:
            raise InputError(f"resume file belongs to {data.get('command')!r}, not {self.command!r}", str(self.path))
        self.max_completed_iota = int(data.get('max_completed_iota', 0))
        self.cumulative = data.get('cumulative')
        logger.info(f"Resuming {self.command} after iota={self.max_completed_iota}")

    @property
    def next_iota(self) -> int:
        return self.max_completed_iota + 1

    def save(self, iota: int, cumulative: Optional[Dict[str, int]] = None) -> None:
        """
        Record iota as completed.

        Args:
            iota: Highest fully completed Picard index
            cumulative: Census counts up to iota
        """
        self.max_completed_iota = iota
        self.cumulative = cumulative
        data = {'version': RESUME_VERSION, 'command': self.command, 'max_completed_iota': iota}
        if cumulative is not None:
            data['cumulative'] = cumulative
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=self.path.name, suffix='.tmp')
        with os.fdopen(fd, 'w') as f:
            json.dump(data, f, indent=2)
        os.replace(tmp, self.path)
        logger.debug(f"Saved resume state iota={iota} to {self.path}")


__all__ = ['ResumeState', 'RESUME_VERSION']
