"""Harmonic analysis, obstruction solvers and cohomology checks for CR
deformations of the twistor space of S^3."""

from . import cli, cohomology, disk_analysis, fillability, rep_core, twistor_calculus
from .errors import (AliasingWarning, ConstraintViolation, NegativeFourierContent, Obstructed,
                     SingularLevi, TruncationOverflow, TwistorFillError, UnsupportedBundle)

__version__ = "0.1.0"

__all__ = ["cli", "cohomology", "disk_analysis", "fillability", "rep_core", "twistor_calculus",
           "AliasingWarning", "ConstraintViolation", "NegativeFourierContent", "Obstructed",
           "SingularLevi", "TruncationOverflow", "TwistorFillError", "UnsupportedBundle"]
