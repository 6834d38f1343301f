"""Casimir-Polder energy shifts of an atom above a dielectric layer on a substrate."""
from __future__ import annotations

from .core import EvaluationPoint, Polarization, ShiftResult, Stack, Transition
from .errors import CasimirError
from .numerics import DEFAULT_CONFIG, QuadratureConfig
from .shift import ground_kernel, resonant_kernel, total_shift

__all__ = [
    "CasimirError",
    "DEFAULT_CONFIG",
    "EvaluationPoint",
    "Polarization",
    "QuadratureConfig",
    "ShiftResult",
    "Stack",
    "Transition",
    "ground_kernel",
    "resonant_kernel",
    "total_shift",
]
