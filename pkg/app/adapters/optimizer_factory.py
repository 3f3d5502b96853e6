"""Construction of optimizer adapters."""

from app.adapters.adam_optimizer import AdamOptimizer
from app.adapters.sgd_optimizer import SgdOptimizer
from app.models import OptimizerKind
from app.ports import IOptimizer


def build_optimizer(kind: OptimizerKind, learning_rate: float) -> IOptimizer:
    if OptimizerKind(kind) == OptimizerKind.SGD:
        return SgdOptimizer(learning_rate)
    return AdamOptimizer(learning_rate)
