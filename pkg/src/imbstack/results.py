"""Result rows and the orderings used to rank them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .metrics import ConfusionMatrix, MetricsRow

LEVEL0, META, ELEMENT = "level0", "meta", "stack_element"


@dataclass(frozen=True)
class ResultRow:
    test_run: str  # "0SMOTE", "6metalearner", "5stackROS"
    classifier: str  # display name, e.g. "GBM"
    cm: Optional[ConfusionMatrix]
    metrics: Optional[MetricsRow]
    seed: int
    wall_time: float = 0.0
    phase: str = LEVEL0
    resampler_kind: Optional[str] = None
    classifier_kind: Optional[str] = None
    stack_id: Optional[int] = None
    f1_rank: Optional[int] = None
    diagnostic: Optional[str] = None

    @property
    def name(self) -> str:
        return f"{self.test_run} {self.classifier}"

    @property
    def is_na(self) -> bool:
        return self.metrics is None

    def metric(self, key: str) -> Optional[float]:
        return None if self.metrics is None else getattr(self.metrics, key)


def _desc(v):
    # NA sorts after every defined value
    return (1, 0.0) if v is None else (0, -v)


def sort_key(row: ResultRow, primary: str = "auc"):
    """(primary desc, f1 desc, accuracy desc, name asc), NA values last."""
    return (
        _desc(row.metric(primary)),
        _desc(row.metric("f1")),
        _desc(row.metric("accuracy")),
        row.test_run,
        row.classifier,
    )


def rank(rows, primary: str = "auc"):
    return sorted(rows, key=lambda r: sort_key(r, primary))
