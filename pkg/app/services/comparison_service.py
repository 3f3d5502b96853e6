"""Train several objectives from one initial policy and collect their curves."""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from app.adapters.csv_telemetry_sink import format_value
from app.models import Dataset, ObjectiveKind, TelemetryTable, TrainConfig
from app.ports import IPolicyModel, ITelemetrySink
from app.services.policy_service import clone_as_reference
from app.services.trainer_service import TrainResult, TrainerService


logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("objective", "step", "delta_r_w", "margin", "mean_logp_w")


@dataclass(frozen=True)
class CurvePoint:
    objective: str
    step: int
    delta_r_w: float
    margin: float
    mean_logp_w: float


@dataclass
class ComparisonResult:
    """Per-objective training results plus the combined long-format curves."""
    runs: dict[ObjectiveKind, TrainResult] = field(default_factory=dict)
    curves: list[CurvePoint] = field(default_factory=list)

    def final(self, kind: ObjectiveKind) -> Optional[CurvePoint]:
        points = [p for p in self.curves if p.objective == kind.value]
        return points[-1] if points else None


def curve_points(kind: ObjectiveKind, table: TelemetryTable) -> list[CurvePoint]:
    """delta_r_w is mean_r_w relative to the first recorded step."""
    if not table.rows:
        return []
    baseline = table.rows[0].mean_r_w
    return [
        CurvePoint(
            objective=kind.value,
            step=row.step,
            delta_r_w=row.mean_r_w - baseline,
            margin=row.mean_margin,
            mean_logp_w=row.mean_logp_w,
        )
        for row in table.rows
    ]


def export_curves(points: Sequence[CurvePoint], path: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        for p in points:
            writer.writerow([p.objective, str(p.step)] + [
                format_value(v) for v in (p.delta_r_w, p.margin, p.mean_logp_w)
            ])


class ComparisonService:
    """
    Runs one training per objective from identical starting points.

    Every run starts from a fresh copy of the same initial policy, uses the
    same frozen reference and the same batch schedule seed. A failure in any
    run aborts the comparison.
    """

    def __init__(
        self,
        sink_factory: Optional[Callable[[ObjectiveKind], ITelemetrySink]] = None,
    ):
        self.sink_factory = sink_factory

    def compare(
        self,
        initial: IPolicyModel,
        dataset: Dataset,
        objectives: Sequence[ObjectiveKind],
        base_config: TrainConfig,
    ) -> ComparisonResult:
        result = ComparisonResult()
        ref = clone_as_reference(initial)
        for kind in objectives:
            config = base_config.model_copy(
                update={"objective": base_config.objective.model_copy(update={"kind": kind})}
            )
            sink = self.sink_factory(kind) if self.sink_factory else None
            logger.info(f"Comparison run: {kind.value}")
            run = TrainerService(config, sink=sink).train(initial.clone(frozen=False), ref, dataset)
            result.runs[kind] = run
            result.curves.extend(curve_points(kind, run.table))
            last = result.final(kind)
            if last is not None:
                logger.info(
                    f"{kind.value}: final delta_r_w={last.delta_r_w:.4f} margin={last.margin:.4f}"
                )
        return result
