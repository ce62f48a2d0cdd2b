"""Excitable: temporal, spatial, and spatio-temporal neuronal excitability
models behind one numerics core and a scenario CLI."""

__version__ = "0.1.0"

from .core import (
    AmariParams,
    GridMismatchError,
    HHParams,
    HHState,
    MemSynapticParams,
    MemTemporalParams,
    SpatialGrid,
    SynapseParams,
    TimeGrid,
    Trajectory,
    ValidationError,
    make_grid,
    make_time_grid,
    validate,
)
from .numerics import (
    Kernel,
    NonFiniteError,
    Normalization,
    convolve_direct,
    convolve_spectral,
    difference_kernel,
    exponential_kernel,
    integrate,
    relu,
)
from .stimulus import GaussianPulse, RectangularPulse, StimulusProgram
