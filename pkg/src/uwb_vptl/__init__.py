"""On-vehicle two-anchor UWB localization and a virtual pedestrian traffic light."""

from .geometry import (
    AnchorLayout,
    Ambiguous,
    CoverageStatus,
    DegenerateLayout,
    Infeasible,
    PerturbMode,
    RangePair,
    Sensitivity,
    Singular,
    TagPosition,
    coverage,
    perturbed_triangulate,
    resolve_side,
    sensitivity,
    sensitivity_frontal,
    triangulate,
)
from .kernels import BACKEND
from .ranging import ErrorProfile, MeasurementBatch, NoiseModel, RangingMode, error_profile, simulate_batch
from .tracking import (
    CrossingEvent,
    EmptyResult,
    LocalizedBatch,
    SideLabel,
    TooFewPoints,
    classify_side,
    detect_crossing,
    localize_batch,
    smooth,
)

__version__ = "0.1.0"
