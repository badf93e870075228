from .capillary import BUILTIN_FAMILIES, CapillaryProblem, gravity, tilted
from .validation import (
    ConditionCheck,
    HeightBound,
    ValidationReport,
    height_bound,
    validate_conditions,
)
