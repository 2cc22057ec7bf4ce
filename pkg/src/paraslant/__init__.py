"""Numerical verification toolkit for almost paracontact metric manifolds and their submanifolds."""

from .ambient import AmbientStructure, canonical_paracosymplectic
from .errors import ConfigError, ToolkitError
from .expr import parse
from .report import FAIL, FLAGGED, NA, PASS, CheckReport, Row
from .runner import run_scenario
from .scenario import Scenario, load, load_source
from .submanifold import FrameField, Immersion, PointData, point_data

__version__ = "0.1.0"

__all__ = [
    "AmbientStructure", "CheckReport", "ConfigError", "FAIL", "FLAGGED", "FrameField", "Immersion", "NA", "PASS",
    "PointData", "Row", "Scenario", "ToolkitError", "canonical_paracosymplectic", "load", "load_source", "parse",
    "point_data", "run_scenario",
]
