"""Telemetry sink port."""

import abc

from app.models import TelemetryRow, TelemetryTable


class ITelemetrySink(abc.ABC):
    """
    Port: Abstract contract for receiving per-step training telemetry.

    Rows arrive in step order and are persisted as they arrive.
    """

    @abc.abstractmethod
    def write(self, row: TelemetryRow) -> None:
        """Record one step."""
        pass

    @abc.abstractmethod
    def close(self) -> None:
        """Flush and release any underlying resource."""
        pass

    @abc.abstractmethod
    def table(self) -> TelemetryTable:
        """All rows written so far."""
        pass
