"""Simulation and variation statistics for Hermite processes of order q <= 3."""

__version__ = "0.1.0"

from .errors import HermvarError, ValidationError  # noqa: E402,F401
from .simulator import HermiteParams, SimGrid, build_path  # noqa: E402,F401
from .variations import VariationConfig  # noqa: E402,F401
