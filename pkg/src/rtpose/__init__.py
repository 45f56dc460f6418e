"""Camera position from two known ground points and the gravity direction,
computed with rational trigonometry (quadrances and spreads) or with
classical distances and angles."""

from rtpose.errors import (
    DegenerateConfigurationError,
    GeometryError,
    HorizontalBearingError,
    ParallelLinesError,
)
from rtpose.pose_solver import (
    HeightRange,
    LocalSolution,
    PoseEstimate,
    TetrahedronMeasurement,
    height_filter,
    solve_classical,
    solve_from_observation,
    solve_rational,
    to_world,
)
from rtpose.rt_core import SignedSpread, quadrance, spread_between

__version__ = "0.1.0"
