"""Quadrature, principal-value, root-finding and Bessel helpers.

Thin, typed wrappers over ``scipy.integrate`` / ``scipy.optimize`` /
``scipy.special`` that report an error estimate, the number of integrand
evaluations and whether the adaptive routine converged. Non-convergence is
never raised: it is logged and returned in the result.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterator, List, NamedTuple, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate, optimize, special

from .errors import InvalidParameterError, PoleClusteringError

LOGGER = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)

RealFunction = Callable[[float], float]
VectorFunction = Callable[[float], np.ndarray]


class QuadratureConfig(BaseModel):
    """Tolerances shared by every integral and root search."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    rel_tol: float = Field(1e-9, gt=0)
    abs_tol: float = Field(1e-14, ge=0)
    max_subdivisions: int = Field(60, ge=1)
    # fraction of machine epsilon at which exp(-rate * x) is cut off
    tail_cutoff: float = Field(1.0, gt=0, le=1)
    pv_exclusion: float = Field(0.25, gt=0, lt=0.5)
    pv_max_halvings: int = Field(4, ge=1)
    scan_points_per_phase: int = Field(64, ge=4)
    root_abs_tol: float = Field(1e-12, gt=0)

    def tightened(self, factor: float) -> "QuadratureConfig":
        return self.model_copy(update={"rel_tol": max(self.rel_tol * factor, 50 * EPS)})


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error: float
    evaluations: int
    converged: bool = True

    def __iter__(self) -> Iterator[float]:
        yield self.value
        yield self.abs_error

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            self.value + other.value,
            self.abs_error + other.abs_error,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
        )


@dataclass(frozen=True)
class VectorQuadratureResult:
    value: np.ndarray
    abs_error: float
    evaluations: int
    converged: bool = True

    def __add__(self, other: "VectorQuadratureResult") -> "VectorQuadratureResult":
        return VectorQuadratureResult(
            self.value + other.value,
            self.abs_error + other.abs_error,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
        )


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise InvalidParameterError("bracket order", f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not self.f_lo * self.f_hi < 0:
            raise InvalidParameterError("bracket sign", "bracket endpoints must have opposite signs")


class RootEstimate(NamedTuple):
    root: float
    residual: float


def _quad_limit(cfg: QuadratureConfig) -> int:
    return max(cfg.max_subdivisions, 1)


def integrate_finite(
    f: RealFunction,
    lo: float,
    hi: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    points: Sequence[float] | None = None,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[lo, hi]``.

    Integrable endpoint singularities of inverse-square-root type are handled
    by the extrapolating QAGS scheme.
    """
    if lo == hi:
        return QuadratureResult(0.0, 0.0, 0)
    inner = None
    if points:
        inner = sorted(p for p in points if min(lo, hi) < p < max(lo, hi))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            f,
            lo,
            hi,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=_quad_limit(cfg),
            points=inner or None,
            full_output=1,
        )
    value, error, info = out[0], out[1], out[2]
    converged = len(out) == 3
    if not converged:
        LOGGER.warning(
            "Unconverged quadrature on [%g, %g]: value=%.6g error=%.3g (%s)",
            lo, hi, value, error, out[3].splitlines()[0] if isinstance(out[3], str) else out[3],
        )
    return QuadratureResult(float(value), float(abs(error)), int(info["neval"]), converged)


def integrate_finite_vector(
    f: VectorFunction,
    lo: float,
    hi: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    points: Sequence[float] | None = None,
) -> VectorQuadratureResult:
    """Vector-valued variant; every component shares the adaptive mesh."""
    if lo == hi:
        return VectorQuadratureResult(np.zeros_like(np.asarray(f(lo), dtype=float)), 0.0, 1)
    inner = None
    if points:
        inner = sorted(p for p in points if min(lo, hi) < p < max(lo, hi))
    value, error, info = integrate.quad_vec(
        f,
        lo,
        hi,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=max(_quad_limit(cfg), 200),
        points=inner or None,
        full_output=True,
    )
    converged = info.status == 0
    if not converged:
        LOGGER.warning("Unconverged vector quadrature on [%g, %g]: %s", lo, hi, info.message)
    return VectorQuadratureResult(np.asarray(value, dtype=float), float(error), int(info.neval), converged)


def truncation_point(damping_rate: float, cfg: QuadratureConfig = DEFAULT_CONFIG, lo: float = 0.0) -> float:
    if damping_rate <= 0:
        raise InvalidParameterError("damping_rate <= 0", f"damping rate must be positive, got {damping_rate}")
    return lo - math.log(cfg.tail_cutoff * EPS) / damping_rate


def _damping_breakpoints(lo: float, hi: float, damping_rate: float) -> List[float]:
    return [lo + k / damping_rate for k in (1.0, 4.0, 12.0) if lo + k / damping_rate < hi]


def integrate_semi_infinite(
    f: RealFunction,
    damping_rate: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    lo: float = 0.0,
    points: Sequence[float] | None = None,
) -> QuadratureResult:
    """Integrate ``f`` over ``[lo, inf)`` for ``|f| <~ exp(-damping_rate x)``.

    The range is cut where the damping factor drops below
    ``tail_cutoff * eps``, then integrated adaptively.
    """
    x_max = truncation_point(damping_rate, cfg, lo)
    breaks = _damping_breakpoints(lo, x_max, damping_rate) + list(points or [])
    return integrate_finite(f, lo, x_max, cfg, points=breaks)


def integrate_semi_infinite_vector(
    f: VectorFunction,
    damping_rate: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    lo: float = 0.0,
    points: Sequence[float] | None = None,
) -> VectorQuadratureResult:
    x_max = truncation_point(damping_rate, cfg, lo)
    breaks = _damping_breakpoints(lo, x_max, damping_rate) + list(points or [])
    return integrate_finite_vector(f, lo, x_max, cfg, points=breaks)


def _pv_pass(
    f: RealFunction,
    lo: float,
    hi: float,
    poles: Sequence[float],
    deltas: Sequence[float],
    cfg: QuadratureConfig,
) -> QuadratureResult:
    total = QuadratureResult(0.0, 0.0, 0)
    left = lo
    for pole, delta in zip(poles, deltas):
        total = total + integrate_finite(f, left, pole - delta, cfg)
        total = total + integrate_cauchy(f, pole - delta, pole + delta, pole, cfg)
        left = pole + delta
    return total + integrate_finite(f, left, hi, cfg)


def integrate_cauchy(
    f: RealFunction, lo: float, hi: float, pole: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> QuadratureResult:
    """Principal value of ``f`` over ``[lo, hi]`` with one simple ``pole`` inside.

    QUADPACK's Cauchy-weight rule integrates ``f(x) (x - pole)`` against
    ``1 / (x - pole)``; rounding in ``x - pole`` cancels between the two.
    """
    if not lo < pole < hi:
        raise PoleClusteringError(f"pole {pole!r} outside open interval ({lo!r}, {hi!r})")
    nudge = 1e-7 * (hi - lo)

    def regular(x: float) -> float:
        if x == pole:
            return 0.5 * (regular(pole + nudge) + regular(pole - nudge))
        return f(x) * (x - pole)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            regular,
            lo,
            hi,
            weight="cauchy",
            wvar=pole,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=_quad_limit(cfg),
            full_output=1,
        )
    value, error, info = out[0], out[1], out[2]
    converged = len(out) == 3
    if not converged:
        LOGGER.warning("Unconverged Cauchy quadrature on [%g, %g] about %g: error=%.3g", lo, hi, pole, error)
    return QuadratureResult(float(value), float(abs(error)), int(info["neval"]), converged)


def integrate_principal_value(
    f: RealFunction,
    lo: float,
    hi: float,
    poles: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> QuadratureResult:
    """Cauchy principal value of ``f`` on ``[lo, hi]`` through simple ``poles``.

    Each pole gets an excision half-width ``pv_exclusion`` times its distance
    to the nearest neighbour or endpoint and is integrated with the
    Cauchy-weight rule; the half-width is halved until successive results
    agree within the requested tolerance or the summed quadrature error.
    """
    ordered = sorted(float(p) for p in poles)
    if not ordered:
        return integrate_finite(f, lo, hi, cfg)
    span = hi - lo
    for pole in ordered:
        if not lo < pole < hi:
            raise PoleClusteringError(f"pole {pole!r} outside open interval ({lo!r}, {hi!r})")
    anchors = [lo, *ordered, hi]
    gaps = [min(anchors[k + 1] - anchors[k], anchors[k + 2] - anchors[k + 1]) for k in range(len(ordered))]
    floor = 1e3 * EPS * max(1.0, abs(lo), abs(hi))
    if min(gaps) <= floor or min(gaps) < 1e-10 * span:
        raise PoleClusteringError(f"pole clustering: minimum separation {min(gaps):.3g} on [{lo}, {hi}]")

    deltas = [cfg.pv_exclusion * gap for gap in gaps]
    previous = _pv_pass(f, lo, hi, ordered, deltas, cfg)
    evaluations = previous.evaluations
    converged = False
    spread = math.inf
    current = previous
    for halving in range(cfg.pv_max_halvings):
        deltas = [delta / 2 for delta in deltas]
        current = _pv_pass(f, lo, hi, ordered, deltas, cfg)
        evaluations += current.evaluations
        spread = abs(current.value - previous.value)
        LOGGER.debug("PV halving %d: value=%.15g spread=%.3g", halving + 1, current.value, spread)
        allowed = max(cfg.abs_tol, 10 * cfg.rel_tol * abs(current.value), 2 * (current.abs_error + previous.abs_error))
        if spread <= allowed:
            converged = current.converged
            break
        previous = current
    if not converged:
        LOGGER.warning("Principal value did not stabilise on [%g, %g]: spread=%.3g", lo, hi, spread)
    return QuadratureResult(current.value, current.abs_error + spread, evaluations, converged)


def find_roots_bracketed(
    f: RealFunction,
    lo: float,
    hi: float,
    scan_points: int,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> List[RootEstimate]:
    """Scan ``scan_points`` uniform cells for sign changes and refine each.

    Sign changes whose refined residual exceeds both bracket values are
    discontinuities (poles), not roots, and are dropped.
    """
    if scan_points < 1:
        raise InvalidParameterError("scan_points < 1")
    grid = np.linspace(lo, hi, scan_points + 1)
    values = [float(f(x)) for x in grid]
    roots: List[RootEstimate] = []
    for k in range(scan_points):
        x_lo, x_hi = float(grid[k]), float(grid[k + 1])
        f_lo, f_hi = values[k], values[k + 1]
        if f_lo == 0.0:
            if not roots or roots[-1].root != x_lo:
                roots.append(RootEstimate(x_lo, 0.0))
            continue
        if f_lo * f_hi >= 0:
            continue
        bracket = Bracket(x_lo, x_hi, f_lo, f_hi)
        root = optimize.brentq(f, bracket.lo, bracket.hi, xtol=cfg.root_abs_tol, rtol=4 * EPS, maxiter=200)
        residual = abs(float(f(root)))
        if residual > max(abs(bracket.f_lo), abs(bracket.f_hi)):
            LOGGER.debug("Discarding sign change at %.12g: residual %.3g marks a pole", root, residual)
            continue
        roots.append(RootEstimate(float(root), residual))
    if values[-1] == 0.0 and (not roots or roots[-1].root != float(grid[-1])):
        roots.append(RootEstimate(float(grid[-1]), 0.0))
    return roots


def bessel_j0(x: float) -> float:
    if not x >= 0:
        raise InvalidParameterError("x < 0", f"bessel_j0 expects x >= 0, got {x!r}")
    return float(special.j0(x))
