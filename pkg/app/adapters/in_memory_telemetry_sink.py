"""In-memory telemetry sink for testing and comparisons."""

from app.models import TelemetryRow, TelemetryTable
from app.ports import ITelemetrySink


class InMemoryTelemetrySink(ITelemetrySink):
    """Collects rows in a list."""

    def __init__(self):
        self._table = TelemetryTable()

    def write(self, row: TelemetryRow) -> None:
        self._table.rows.append(row)

    def close(self) -> None:
        pass

    def table(self) -> TelemetryTable:
        return self._table
