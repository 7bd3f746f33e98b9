"""The k -> 0 limit problem on R^d minus B_1 and the working window."""

from odp.exterior.profile import (
    ExteriorProfile,
    solve_exterior_radial,
    energy_identity,
    decay_rate,
)
from odp.exterior.spectrum import (
    LimitSpectrum,
    exterior_linearized_spectrum,
    limit_dtn_value,
    limit_mode_eigenvalue,
)
from odp.exterior.window import LimitProblem, Thresholds, Window, locate_thresholds, select_window, limit_thresholds

__all__ = [
    "ExteriorProfile",
    "solve_exterior_radial",
    "energy_identity",
    "decay_rate",
    "LimitSpectrum",
    "exterior_linearized_spectrum",
    "limit_dtn_value",
    "limit_mode_eigenvalue",
    "LimitProblem",
    "Window",
    "Thresholds",
    "locate_thresholds",
    "select_window",
    "limit_thresholds",
]
