"""CSV telemetry sink adapter.

Header (exact):

    step,loss,mean_r_w,mean_r_l,mean_margin,mean_logp_w,mean_logp_l,
    mean_alpha,min_alpha,max_alpha,frac_alpha_lo,frac_alpha_hi,effective_beta

Floats use 9 significant digits; absent values are empty fields.
"""

import csv
import logging
from pathlib import Path
from typing import Optional

from app.models import TELEMETRY_COLUMNS, TelemetryRow, TelemetryTable
from app.ports import ITelemetrySink


logger = logging.getLogger(__name__)


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".9g")


def row_fields(row: TelemetryRow) -> list[str]:
    return [format_value(getattr(row, column)) for column in TELEMETRY_COLUMNS]


def export_csv(table: TelemetryTable, path: str) -> None:
    """
    Write a telemetry table as CSV.

    Raises:
        OSError: If the path cannot be written
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TELEMETRY_COLUMNS)
        for row in table.rows:
            writer.writerow(row_fields(row))


def read_csv(path: str) -> TelemetryTable:
    """Parse a telemetry CSV written by export_csv or CsvTelemetrySink."""
    rows = []
    with Path(path).open(newline="", encoding="utf-8") as handle:
        for record in csv.DictReader(handle):
            values: dict[str, Optional[float]] = {}
            for column in TELEMETRY_COLUMNS:
                text = record[column]
                if column == "step":
                    values[column] = int(text)
                else:
                    values[column] = float(text) if text != "" else None
            rows.append(TelemetryRow(**values))
    return TelemetryTable(rows=rows)


class CsvTelemetrySink(ITelemetrySink):
    """Appends one CSV line per step and flushes it immediately."""

    def __init__(self, path: str):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = self.path.open("w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._handle, lineterminator="\n")
        self._writer.writerow(TELEMETRY_COLUMNS)
        self._handle.flush()
        self._table = TelemetryTable()

    def write(self, row: TelemetryRow) -> None:
        self._writer.writerow(row_fields(row))
        self._handle.flush()
        self._table.rows.append(row)

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.close()
            logger.info(f"Telemetry written to {self.path} ({len(self._table)} rows)")

    def table(self) -> TelemetryTable:
        return self._table
