"""Radii of convexity of order alpha for normalized Lommel and Struve functions."""

from .errors import *  # noqa: F401,F403
from .family import Family, FamilySpec, NormKind, RadiusQuery

__version__ = "0.1.0"
