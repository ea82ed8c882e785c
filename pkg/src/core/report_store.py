"""
Report Store Module

This module provides the local storage for analysis output. It handles:
- Writing JSON reports of analyze, toric and verify runs
- Writing classification record, census and histogram CSV files
- Reading record CSV files back for histograms
- Saving failing instances for replay
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from src.analyzers.classify import CENSUS_COLUMNS, CensusRow
from src.core.defmat import DefiningMatrix, Fan
from src.core.errors import InputError
from src.utils.config import load_config
from src.utils.serialization import write_json

logger = logging.getLogger(__name__)

RECORD_HEADER = ['picard_index', 'case', 'n_or_lambda', 'weights_or_ltuple', 'd_data', 'local_orders',
                 'canonical_key']
CENSUS_HEADER = (['picard_index'] + list(CENSUS_COLUMNS)
                 + [f"cumulative_{c}" for c in CENSUS_COLUMNS])
HISTOGRAM_HEADER = ['picard_index'] + list(CENSUS_COLUMNS) + ['total']


@dataclass(frozen=True)
class RecordRow:
    """One row of a record CSV file."""

    picard_index: int
    case: str
    fields: Dict[str, str]


class ReportStore:
    """
    Writes reports and CSV files into one output directory.
    """

    def __init__(self, output_dir: Optional[Union[str, Path]] = None):
        """
        Initialize report store.

        Args:
            output_dir: Directory for output files (defaults to config path)
        """
        self.output_dir = Path(output_dir) if output_dir is not None else load_config().output_dir
        self.output_dir.mkdir(parents=True, exist_ok=True)
        logger.debug(f"Initialized report store in {self.output_dir}")

    def _path(self, name: Union[str, Path]) -> Path:
        path = Path(name)
        if not path.is_absolute():
            path = self.output_dir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_report(self, name: Union[str, Path], data: Dict[str, Any]) -> Path:
        """
        Store a JSON report.

        Args:
            name: File name, relative to the output directory unless absolute
            data: Report content

        Returns:
            Path of the written file
        """
        path = write_json(data, self._path(name))
        logger.info(f"Report file: {path}")
        return path

    def _write_rows(self, path: Path, header: List[str], rows: Iterable[List[str]], append: bool) -> Path:
        new_file = not (append and path.exists())
        with open(path, 'w' if new_file else 'a', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            if new_file:
                writer.writerow(header)
            for row in rows:
                writer.writerow(row)
        return path

    def write_records(self, name: Union[str, Path], records: Iterable, append: bool = False) -> Path:
        """Write classification records, one CSV row each."""
        path = self._write_rows(self._path(name), RECORD_HEADER, (rec.to_row() for rec in records), append)
        logger.debug(f"Record file: {path}")
        return path

    def write_census(self, name: Union[str, Path], rows: Iterable[CensusRow], append: bool = False) -> Path:
        path = self._write_rows(self._path(name), CENSUS_HEADER, (row.to_row() for row in rows), append)
        logger.debug(f"Census file: {path}")
        return path

    def write_histogram(self, name: Union[str, Path], rows: Iterable[CensusRow]) -> Path:
        lines = ([str(row.picard_index)] + [str(row.counts.get(c, 0)) for c in CENSUS_COLUMNS] + [str(row.total)]
                 for row in rows)
        return self._write_rows(self._path(name), HISTOGRAM_HEADER, lines, append=False)

    def write_failure(self, suite: str, instance: Any) -> Optional[Path]:
        """Serialize a failing defining matrix or fan for replay."""
        if isinstance(instance, (DefiningMatrix, Fan)):
            path = self.write_report(Path("failures") / f"{suite}.json", instance.to_dict())
            logger.warning(f"Failing instance of {suite} saved to {path}")
            return path
        return None


def read_records(path: Union[str, Path]) -> List[RecordRow]:
    """
    Read a record CSV file.

    Raises:
        InputError: If the file is missing or lacks the record columns
    """
    path = Path(path)
    try:
        with open(path, newline='') as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or not {'picard_index', 'case'} <= set(reader.fieldnames):
                raise InputError("not a record CSV file", str(path))
            rows = []
            for line, row in enumerate(reader, start=2):
                try:
                    iota = int(row['picard_index'])
                except (TypeError, ValueError):
                    raise InputError(f"line {line}: invalid picard_index {row['picard_index']!r}", str(path))
                rows.append(RecordRow(iota, row['case'], dict(row)))
            return rows
    except FileNotFoundError:
        raise InputError("file not found", str(path))


__all__ = ['ReportStore', 'RecordRow', 'read_records', 'RECORD_HEADER', 'CENSUS_HEADER', 'HISTOGRAM_HEADER']
