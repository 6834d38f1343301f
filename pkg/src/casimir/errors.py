"""Typed failures raised by the Casimir-Polder toolkit."""
from __future__ import annotations


class CasimirError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(CasimirError, ValueError):
    def __init__(self, invariant: str, message: str | None = None) -> None:
        self.invariant = invariant
        super().__init__(message or invariant)


class DegenerateIncidenceError(CasimirError, ArithmeticError):
    """Fresnel denominator vanished (grazing/degenerate incidence)."""


class DispersionPoleError(CasimirError, ArithmeticError):
    """Stack denominator 1 + r r exp(2i kzl L) is zero at ``kz``."""

    def __init__(self, kz: complex, message: str | None = None) -> None:
        self.kz = kz
        super().__init__(message or f"dispersion-relation pole at kz={kz!r}")


class PoleClusteringError(CasimirError, ArithmeticError):
    """Principal-value poles sit too close to each other or to an endpoint."""


class ScanDensityError(CasimirError, RuntimeError):
    def __init__(self, suggested_points: int, message: str | None = None) -> None:
        self.suggested_points = suggested_points
        super().__init__(message or f"increase scan_points (try {suggested_points})")


class NormalizationError(CasimirError, ArithmeticError):
    """Trapped-mode normalization bracket is not positive."""


class SeriesSingularError(CasimirError, ValueError):
    """Image series used where n_l**4 - 1 vanishes."""


class SlabLimitError(CasimirError, ValueError):
    """Printed thin-layer coefficients evaluated at n_s = 1."""


class MissingPoleError(CasimirError, RuntimeError):
    """Principal-value integrand changes sign across an unlisted pole."""
