"""Quasi-static Green's function of the layer and the electrostatic shift.

The reflected potential of a unit charge at height ``z'`` above the stack,
seen at ``z`` and lateral distance ``rho``, depends on ``s = z + z'`` through
``sigma = s - L`` (heights measured from the layer mid-plane):

    G_H(rho, s) = -(1/4pi) int_0^inf dk J0(k rho) exp(-k sigma) K(k)
    K(k) = (alpha - beta exp(-2kL)) / (1 - alpha beta exp(-2kL))
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Tuple

from scipy import special

from .core import ShiftResult, Stack, validate_stack
from .errors import InvalidParameterError, SeriesSingularError
from .numerics import DEFAULT_CONFIG, QuadratureConfig, QuadratureResult, bessel_j0, integrate_semi_infinite

LOGGER = logging.getLogger(__name__)

Axis = Literal["x", "y", "z"]


@dataclass(frozen=True)
class ImageKernel:
    alpha: float
    beta: float

    @property
    def r_im(self) -> float:
        """Ratio of successive image charges."""
        return self.alpha * self.beta

    def __call__(self, k: float, L: float) -> float:
        decay = math.exp(-2 * k * L)
        return (self.alpha - self.beta * decay) / (1 - self.alpha * self.beta * decay)


def image_kernel(stack: Stack) -> ImageKernel:
    n_l2, n_s2 = stack.n_l**2, stack.n_s**2
    return ImageKernel(alpha=(n_l2 - 1) / (n_l2 + 1), beta=(n_l2 - n_s2) / (n_l2 + n_s2))


def _check_geometry(stack: Stack, rho: float, s: float) -> float:
    validate_stack(stack)
    if rho < 0:
        raise InvalidParameterError("rho < 0", f"lateral distance must be >= 0, got rho={rho}")
    sigma = s - stack.L
    if not sigma > 0:
        raise InvalidParameterError("s <= L", f"both points must lie above the stack, got s={s}, L={stack.L}")
    return sigma


def greens_reflected(
    stack: Stack, rho: float, s: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> QuadratureResult:
    sigma = _check_geometry(stack, rho, s)
    kernel = image_kernel(stack)

    def integrand(k: float) -> float:
        return bessel_j0(k * rho) * math.exp(-k * sigma) * kernel(k, stack.L)

    result = integrate_semi_infinite(integrand, sigma, cfg)
    return QuadratureResult(-result.value / (4 * math.pi), result.abs_error / (4 * math.pi), result.evaluations, result.converged)


def _angular_weight(i: Axis, j: Axis, u: float) -> float:
    """``int dtheta`` of the in-plane factors of ``d_i d'_j exp(i k.rho)``, real part kept."""
    j0, j1, j2 = special.jv([0, 1, 2], u)
    weights = {
        ("x", "x"): math.pi * (j0 - j2),
        ("y", "y"): math.pi * (j0 + j2),
        ("z", "z"): 2 * math.pi * j0,
        ("x", "z"): 2 * math.pi * j1,
        ("z", "x"): -2 * math.pi * j1,
    }
    return float(weights.get((i, j), 0.0))


def greens_hessian(
    stack: Stack,
    rho: float,
    s: float,
    component: Tuple[Axis, Axis],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> QuadratureResult:
    """``d_i d'_j G_H`` with ``rho`` along x; unprimed derivatives act on the field point."""
    sigma = _check_geometry(stack, rho, s)
    i, j = component
    if i not in "xyz" or j not in "xyz":
        raise InvalidParameterError("component", f"component axes must be x, y or z, got {component!r}")
    kernel = image_kernel(stack)

    def integrand(k: float) -> float:
        return k * k * _angular_weight(i, j, k * rho) * math.exp(-k * sigma) * kernel(k, stack.L)

    result = integrate_semi_infinite(integrand, sigma, cfg)
    factor = -1.0 / (8 * math.pi**2)
    return QuadratureResult(factor * result.value, abs(factor) * result.abs_error, result.evaluations, result.converged)


def electrostatic_integral(stack: Stack, Z: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuadratureResult:
    """``int_0^inf dk k^2 exp(-2kZ) K(k)``."""
    validate_stack(stack)
    if not Z > 0:
        raise InvalidParameterError("Z <= 0", f"atom-surface distance must be positive, got Z={Z}")
    kernel = image_kernel(stack)
    return integrate_semi_infinite(lambda k: k * k * math.exp(-2 * k * Z) * kernel(k, stack.L), 2 * Z, cfg)


def electrostatic_shift(
    stack: Stack,
    mu_par_sq: float,
    mu_perp_sq: float,
    Z: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> ShiftResult:
    integral = electrostatic_integral(stack, Z, cfg)
    factor = -(mu_par_sq + 2 * mu_perp_sq) / (16 * math.pi)
    return ShiftResult(factor * integral.value, abs(factor) * integral.abs_error, integral.evaluations, integral.converged)


def halfspace_electrostatic(n: float, mu_par_sq: float, mu_perp_sq: float, Z: float) -> float:
    return -(mu_par_sq + 2 * mu_perp_sq) * (n * n - 1) / (n * n + 1) / (64 * math.pi * Z**3)


def electrostatic_shift_series(
    stack: Stack,
    mu_par_sq: float,
    mu_perp_sq: float,
    Z: float,
    terms: int | None = None,
) -> ShiftResult:
    """Image-charge sum: the bare ``n_l`` half-space plus layer images.

    With ``terms=None`` the sum stops once the next image is below machine
    precision relative to the partial sum.
    """
    validate_stack(stack)
    if not Z > 0:
        raise InvalidParameterError("Z <= 0", f"atom-surface distance must be positive, got Z={Z}")
    n_l4 = stack.n_l**4
    if n_l4 - 1 == 0:
        raise SeriesSingularError("image series needs n_l > 1")
    r_im = image_kernel(stack).r_im
    moment = mu_par_sq + 2 * mu_perp_sq
    prefactor = moment / (16 * math.pi) * stack.n_l**2 / (n_l4 - 1)
    head = halfspace_electrostatic(stack.n_l, mu_par_sq, mu_perp_sq, Z)

    images = 0.0
    count = 0
    term = 0.0
    limit = terms if terms is not None else 100_000
    power = 1.0
    while count < limit:
        count += 1
        power *= r_im
        term = power / (Z + count * stack.L) ** 3
        images += term
        if terms is None and abs(term) <= 1e-17 * max(abs(images), 1e-300):
            break
    tail = abs(term) * abs(r_im) / (1 - abs(r_im)) if abs(r_im) < 1 else math.inf
    LOGGER.debug("Image series: %d terms, r_im=%.6g, tail bound %.3g", count, r_im, tail)
    return ShiftResult(head + prefactor * images, abs(prefactor) * tail, count, math.isfinite(tail))


def dipole_energy_from_green(
    stack: Stack,
    mu_par_sq: float,
    mu_perp_sq: float,
    Z: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> ShiftResult:
    """``(1/2) <mu_i mu_j> d_i d'_j G_H`` at coincident points ``z = z' = L/2 + Z``."""
    s = 2 * Z + stack.L
    xx = greens_hessian(stack, 0.0, s, ("x", "x"), cfg)
    zz = greens_hessian(stack, 0.0, s, ("z", "z"), cfg)
    value = 0.5 * (mu_par_sq * xx.value + mu_perp_sq * zz.value)
    error = 0.5 * (mu_par_sq * xx.abs_error + mu_perp_sq * zz.abs_error)
    return ShiftResult(value, error, xx.evaluations + zz.evaluations, xx.converged and zz.converged)
