"""Computational toolkit for Orlicz-Lorentz spaces and their Köthe duals."""

from .errors import (
    DomainError,
    InvariantError,
    ModeError,
    OrliczLorentzError,
    RejectedInputError,
    SizeError,
)
from .orliczfn import ExtOrliczFunction, OrliczFunction, complementary
from .stepfn import StepFunction, Weight, characteristic, rearrange

__version__ = "0.1.0"
