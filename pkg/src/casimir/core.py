"""Domain types, units contract and parameter validation.

Natural units throughout: hbar = c = 1 and eps0 = 1. Energies and inverse
lengths share one unit; every public shift value is to be multiplied by
1/eps0 when read in SI-compatible natural units.

Geometry: the layer occupies -L/2 < z < L/2, vacuum lies above it and the
substrate below. The atom sits at z0 = L/2 + Z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple

from .errors import InvalidParameterError


class Polarization(str, Enum):
    TE = "TE"
    TM = "TM"


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidParameterError("non-finite", f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Stack:
    """Layer of index ``n_l`` and thickness ``L`` on a substrate of index ``n_s``."""

    n_l: float
    n_s: float
    L: float

    def __post_init__(self) -> None:
        _require_finite(n_l=self.n_l, n_s=self.n_s, L=self.L)

    @property
    def is_halfspace(self) -> bool:
        return self.L == 0 or self.n_l == self.n_s

    def as_dict(self) -> dict:
        return {"n_l": self.n_l, "n_s": self.n_s, "L": self.L}


@dataclass(frozen=True)
class Transition:
    """One dipole transition; ``E > 0`` upward, ``E < 0`` available downward."""

    E: float
    mu_par_sq: float = 1.0
    mu_perp_sq: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(E=self.E, mu_par_sq=self.mu_par_sq, mu_perp_sq=self.mu_perp_sq)

    @property
    def is_downward(self) -> bool:
        return self.E < 0

    def as_dict(self) -> dict:
        return {"E": self.E, "mu_par_sq": self.mu_par_sq, "mu_perp_sq": self.mu_perp_sq}


@dataclass(frozen=True)
class EvaluationPoint:
    Z: float

    def __post_init__(self) -> None:
        _require_finite(Z=self.Z)


@dataclass(frozen=True)
class ShiftResult:
    value: float
    abs_error: float = 0.0
    evaluations: int = 0
    converged: bool = True

    def __post_init__(self) -> None:
        _require_finite(value=self.value)
        if self.abs_error < 0:
            raise InvalidParameterError("abs_error < 0")

    def __add__(self, other: "ShiftResult") -> "ShiftResult":
        if not isinstance(other, ShiftResult):
            return NotImplemented
        return ShiftResult(
            value=self.value + other.value,
            abs_error=self.abs_error + other.abs_error,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
        )

    def scaled(self, factor: float) -> "ShiftResult":
        return ShiftResult(
            value=self.value * factor,
            abs_error=self.abs_error * abs(factor),
            evaluations=self.evaluations,
            converged=self.converged,
        )


def validate_stack(stack: Stack) -> Stack:
    _require_finite(n_l=stack.n_l, n_s=stack.n_s, L=stack.L)
    if stack.n_l < 1 or stack.n_s < 1:
        raise InvalidParameterError(
            "index < 1", f"refractive indices must be >= 1, got n_l={stack.n_l}, n_s={stack.n_s}"
        )
    if stack.L < 0:
        raise InvalidParameterError("negative L", f"layer thickness must be >= 0, got L={stack.L}")
    return stack


def validate_transition(transition: Transition) -> Transition:
    _require_finite(E=transition.E, mu_par_sq=transition.mu_par_sq, mu_perp_sq=transition.mu_perp_sq)
    if transition.E == 0:
        raise InvalidParameterError("E == 0", "transition energy must be non-zero")
    if transition.mu_par_sq < 0 or transition.mu_perp_sq < 0:
        raise InvalidParameterError("negative moment", "dipole moments squared must be >= 0")
    if transition.mu_par_sq == 0 and transition.mu_perp_sq == 0:
        raise InvalidParameterError("zero moments", "at least one dipole component must be non-zero")
    return transition


def validate_point(point: EvaluationPoint) -> EvaluationPoint:
    _require_finite(Z=point.Z)
    if point.Z <= 0:
        raise InvalidParameterError("Z <= 0", f"atom-surface distance must be positive, got Z={point.Z}")
    return point


def reduced_units(transition: Transition, point: EvaluationPoint, stack: Stack) -> Tuple[float, float]:
    """Return the dimensionless pair ``(a, b) = (|E| Z, |E| L)``."""
    validate_transition(transition)
    validate_point(point)
    validate_stack(stack)
    scale = abs(transition.E)
    return scale * point.Z, scale * stack.L


def sum_results(results: Iterable[ShiftResult]) -> ShiftResult:
    total = ShiftResult(0.0)
    for result in results:
        total = total + result
    return total
