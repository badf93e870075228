from .newton import NewtonReport, newton_solve
from .continuation import (
    ContinuationConfig,
    ContinuationState,
    HistoryEntry,
    continuation_solve,
    prevalidate,
)
from .uniqueness import UniquenessStudy, comparison_probe, uniqueness_probe, uniqueness_study
