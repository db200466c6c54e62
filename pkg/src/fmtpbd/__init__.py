"""Parcel delivery with scheduled buses and locker-based drones, solved by
branch-and-price with Benders cuts."""

from .model import Instance, Params, build_derived, validate_instance
from .solution import Solution

__version__ = "0.1.0"

__all__ = ["Instance", "Params", "Solution", "build_derived", "validate_instance", "__version__"]
