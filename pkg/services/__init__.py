"""
Cube Complex Services

This package contains the halfspace calculus:
- Pocsets and pair classification
- Cubulation of walled spaces and graphs
- Roller points, restriction and products
- Intervals, endpoints and Helly
- Lifting, measures and medians
- Signed permutation groups and the Z-bar^D model
"""

from .pocset_service import Halfspace, HalfspaceSystem
from .cubulation_service import CubeComplex, Orientation, cubulate
from .interval_service import interval
from .lifting_service import median

__all__ = [
    "Halfspace",
    "HalfspaceSystem",
    "CubeComplex",
    "Orientation",
    "cubulate",
    "interval",
    "median",
]
