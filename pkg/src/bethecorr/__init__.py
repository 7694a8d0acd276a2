"""Ground-state correlations of the attractive Bose gas from string solutions."""

__version__ = "0.1.0"

from .bethe import ModelParams, StringState, Twist, string_ground_state, twist_roots  # noqa: E402
from .correlations import (CorrelationCurve, density_correlation, field_correlation,  # noqa: E402
                           ground_state_norm)
from .kernel import RapiditySet  # noqa: E402

__all__ = [
    "ModelParams", "StringState", "Twist", "RapiditySet", "CorrelationCurve",
    "string_ground_state", "twist_roots", "ground_state_norm",
    "field_correlation", "density_correlation", "__version__",
]
