"""Retarded Casimir-Polder shift of a multi-level atom above the stack.

Every transition contributes a non-resonant term, an integral along the
imaginary frequency axis written in reduced variables ``a = |E| Z`` and
``b = |E| L``. Downward transitions (``E < 0``) add a resonant term on the
real-frequency contour. Its evanescent branch crosses the guided-mode poles
of the layer and is taken as a Cauchy principal value.

Integration variables for the non-resonant kernel: ``x`` is the imaginary
``kz`` in units of ``|E|`` and ``y`` is folded onto ``[0, 1]`` through
``y = tan(u) / x``, which absorbs the ``1 / (1 + x^2 y^2)`` factor.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Literal, Tuple

import numpy as np

from .core import Polarization, ShiftResult, Stack, Transition, reduced_units, EvaluationPoint, validate_stack
from .errors import InvalidParameterError, MissingPoleError
from .fresnel import ReflectionPart, eta_reflection, imaginary_axis_reflections
from .modes import find_resonance_poles, resonance_dispersion
from .numerics import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadratureResult,
    integrate_finite,
    integrate_finite_vector,
    integrate_principal_value,
    integrate_semi_infinite,
    integrate_semi_infinite_vector,
)

LOGGER = logging.getLogger(__name__)

PVMode = Literal["excise", "displaced"]


@dataclass(frozen=True)
class GroundKernel:
    """Reduced non-resonant integrals; the shift is ``(E^3/8pi^2)(mu_par^2 I_par + mu_perp^2 I_perp)``."""

    I_par: float
    I_perp: float
    abs_error: float = 0.0
    evaluations: int = 0
    converged: bool = True

    def shift(self, transition: Transition) -> ShiftResult:
        prefactor = transition.E**3 / (8 * math.pi**2)
        weighted = transition.mu_par_sq * self.I_par + transition.mu_perp_sq * self.I_perp
        weight = max(transition.mu_par_sq, transition.mu_perp_sq)
        return ShiftResult(
            prefactor * weighted, abs(prefactor) * weight * self.abs_error, self.evaluations, self.converged
        )


@dataclass(frozen=True)
class ResonantKernel:
    """Reduced resonant integrals; the shift is ``|E|^3 (K_par mu_par^2 + K_perp mu_perp^2)``."""

    K_par: float
    K_perp: float
    poles: Tuple[float, ...] = ()
    abs_error: float = 0.0
    evaluations: int = 0
    converged: bool = True
    # imaginary part of the travelling branch, related to spontaneous decay
    decay_par: float = 0.0
    decay_perp: float = 0.0

    def shift(self, transition: Transition) -> ShiftResult:
        scale = abs(transition.E) ** 3
        weighted = transition.mu_par_sq * self.K_par + transition.mu_perp_sq * self.K_perp
        weight = max(transition.mu_par_sq, transition.mu_perp_sq)
        return ShiftResult(scale * weighted, scale * weight * self.abs_error, self.evaluations, self.converged)


def _check_reduced(a: float, b: float) -> None:
    if not a > 0:
        raise InvalidParameterError("Z <= 0", f"reduced distance must be positive, got a={a}")
    if b < 0:
        raise InvalidParameterError("negative L", f"reduced thickness must be >= 0, got b={b}")


def _imaginary_axis_kernel(
    stack: Stack, a: float, b: float, cfg: QuadratureConfig, part: ReflectionPart = "full"
) -> GroundKernel:
    validate_stack(stack)
    _check_reduced(a, b)
    inner_cfg = cfg.tightened(0.1)

    def angular(x: float) -> np.ndarray:
        def integrand(u: float) -> np.ndarray:
            y = math.tan(u) / x
            te, tm = imaginary_axis_reflections(stack.n_l, stack.n_s, b, x, y, part)
            return np.array([y * y * te - tm, 2 * (y * y - 1) * tm])

        return integrate_finite_vector(integrand, 0.0, math.atan(x), inner_cfg).value / x

    def radial(x: float) -> np.ndarray:
        return x**3 * math.exp(-2 * a * x) * angular(x)

    result = integrate_semi_infinite_vector(radial, 2 * a, cfg)
    I_par, I_perp = (float(v) for v in result.value)
    return GroundKernel(I_par, I_perp, result.abs_error, result.evaluations, result.converged)


def ground_kernel(stack: Stack, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> GroundKernel:
    return _imaginary_axis_kernel(stack, a, b, cfg)


def excited_nonresonant_kernel(
    stack: Stack, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> GroundKernel:
    """Same integrals as the ground state; the sign of ``E^3`` is applied by :meth:`GroundKernel.shift`."""
    return _imaginary_axis_kernel(stack, a, b, cfg)


def retarded_thick_layer_split(
    stack: Stack, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> Tuple[GroundKernel, GroundKernel]:
    """Kernels of the bare vacuum/layer interface and of the layer correction.

    For ``b >> a`` the correction is exponentially small and the stack acts
    as a half-space of index ``n_l``.
    """
    return (
        _imaginary_axis_kernel(stack, a, b, cfg, "interface"),
        _imaginary_axis_kernel(stack, a, b, cfg, "correction"),
    )


def _travelling_channels(stack: Stack, b: float, eta: float) -> Tuple[complex, complex]:
    stack_b = Stack(stack.n_l, stack.n_s, b)
    te = eta_reflection(stack_b, 1.0, eta, "travelling", Polarization.TE)
    tm = eta_reflection(stack_b, 1.0, eta, "travelling", Polarization.TM)
    return te - eta * eta * tm, 2 * (1 - eta * eta) * tm


def _evanescent_channels(stack: Stack, b: float, eta: complex) -> Tuple[complex, complex]:
    stack_b = Stack(stack.n_l, stack.n_s, b)
    te = eta_reflection(stack_b, 1.0, eta, "evanescent", Polarization.TE)
    tm = eta_reflection(stack_b, 1.0, eta, "evanescent", Polarization.TM)
    return te + eta * eta * tm, 2 * (1 + eta * eta) * tm


def check_pole_alternation(stack: Stack, b: float, poles: Iterable[float], pol: Polarization) -> None:
    """Raise :class:`MissingPoleError` unless the dispersion alternates sign across ``poles``."""
    lo = math.sqrt(stack.n_s**2 - 1)
    hi = math.sqrt(stack.n_l**2 - 1)
    anchors = [lo, *sorted(poles), hi]
    previous = None
    for left, right in zip(anchors, anchors[1:]):
        sign = math.copysign(1.0, resonance_dispersion(stack, b, 0.5 * (left + right), pol))
        if previous is not None and sign == previous:
            raise MissingPoleError(f"{pol.value} dispersion keeps its sign across eta={left:.12g}")
        previous = sign


def _displaced_window(
    f, lo: float, hi: float, height: float, cfg: QuadratureConfig
) -> QuadratureResult:
    """Real part of the mean of the contours just above and below ``[lo, hi]``."""
    total = QuadratureResult(0.0, 0.0, 0)
    for side in (1.0, -1.0):
        shift = 1j * side * height
        legs = ((lo, lo + shift), (lo + shift, hi + shift), (hi + shift, hi))
        for start, end in legs:
            step = end - start

            def integrand(t: float, start: complex = complex(start), step: complex = step) -> float:
                return (f(start + t * step) * step).real

            total = total + integrate_finite(integrand, 0.0, 1.0, cfg)
    return QuadratureResult(0.5 * total.value, 0.5 * total.abs_error, total.evaluations, total.converged)


def resonant_kernel(
    stack: Stack,
    a: float,
    b: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    pv_mode: PVMode = "excise",
    displacement: float = 0.05,
) -> ResonantKernel:
    """Resonant integrals of a downward transition in reduced units.

    The travelling branch runs over ``0 <= eta <= 1``. The evanescent branch
    runs over ``eta >= 0`` and is a principal value across the guided-mode
    window ``sqrt(n_s^2 - 1) < eta < sqrt(n_l^2 - 1)``. ``pv_mode="displaced"``
    replaces the excision there by the average of two contours displaced by
    ``displacement`` times the window width.
    """
    validate_stack(stack)
    _check_reduced(a, b)

    def travelling(eta: float) -> np.ndarray:
        phase = cmath.exp(2j * a * eta)
        par, perp = _travelling_channels(stack, b, eta)
        return np.array([(phase * par).imag, (phase * perp).imag, (phase * par).real, (phase * perp).real])

    trav = integrate_finite_vector(travelling, 0.0, 1.0, cfg)
    K_par = trav.value[0] / (8 * math.pi)
    K_perp = trav.value[1] / (8 * math.pi)
    abs_error = trav.abs_error / (8 * math.pi)
    evaluations = trav.evaluations
    converged = trav.converged

    n_l, n_s = stack.n_l, stack.n_s
    window = (math.sqrt(n_s**2 - 1), math.sqrt(n_l**2 - 1)) if n_l > n_s else None
    poles_by_pol = {pol: [] for pol in Polarization}
    if window is not None:
        for pol in Polarization:
            poles_by_pol[pol] = [pole.eta for pole in find_resonance_poles(stack, b, pol, cfg)]
            check_pole_alternation(stack, b, poles_by_pol[pol], pol)
    all_poles = tuple(sorted(poles_by_pol[Polarization.TE] + poles_by_pol[Polarization.TM]))

    for index, component_poles in ((0, all_poles), (1, tuple(poles_by_pol[Polarization.TM]))):

        def evanescent(eta: float, index: int = index) -> float:
            return math.exp(-2 * a * eta) * _evanescent_channels(stack, b, eta)[index].real

        def analytic(eta: complex, index: int = index) -> complex:
            return cmath.exp(-2 * a * eta) * _evanescent_channels(stack, b, eta)[index]

        if window is None:
            part = integrate_semi_infinite(evanescent, 2 * a, cfg)
        else:
            lo, hi = window
            if pv_mode == "displaced" and component_poles:
                height = displacement * (hi - lo)
                part = integrate_finite(evanescent, 0.0, lo, cfg) + _displaced_window(analytic, lo, hi, height, cfg)
            elif pv_mode in ("excise", "displaced"):
                part = integrate_principal_value(evanescent, 0.0, hi, component_poles, cfg)
            else:
                raise InvalidParameterError("pv_mode", f"pv_mode must be 'excise' or 'displaced', got {pv_mode!r}")
            part = part + integrate_semi_infinite(evanescent, 2 * a, cfg, lo=hi)
        value = -part.value / (8 * math.pi)
        if index == 0:
            K_par += value
        else:
            K_perp += value
        abs_error += part.abs_error / (8 * math.pi)
        evaluations += part.evaluations
        converged = converged and part.converged

    return ResonantKernel(
        K_par=float(K_par),
        K_perp=float(K_perp),
        poles=all_poles,
        abs_error=abs_error,
        evaluations=evaluations,
        converged=converged,
        decay_par=float(-trav.value[2] / (8 * math.pi)),
        decay_perp=float(-trav.value[3] / (8 * math.pi)),
    )


@dataclass
class ShiftBreakdown:
    """Per-channel contributions of :func:`total_shift`."""

    par: float = 0.0
    perp: float = 0.0
    resonant: float = 0.0
    abs_error: float = 0.0
    evaluations: int = 0
    converged: bool = True
    poles: List[float] = field(default_factory=list)

    @property
    def total(self) -> float:
        return self.par + self.perp

    def as_result(self) -> ShiftResult:
        return ShiftResult(self.total, self.abs_error, self.evaluations, self.converged)


def shift_breakdown(
    stack: Stack,
    transitions: Iterable[Transition],
    Z: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    resonant_only: bool = False,
    pv_mode: PVMode = "excise",
) -> ShiftBreakdown:
    point = EvaluationPoint(Z)
    out = ShiftBreakdown()
    for transition in transitions:
        a, b = reduced_units(transition, point, stack)
        par_only = Transition(transition.E, transition.mu_par_sq, 0.0)
        perp_only = Transition(transition.E, 0.0, transition.mu_perp_sq)
        pieces: List[Tuple[ShiftResult, ShiftResult]] = []
        if not resonant_only:
            kernel = excited_nonresonant_kernel(stack, a, b, cfg) if transition.is_downward else ground_kernel(stack, a, b, cfg)
            pieces.append((kernel.shift(par_only), kernel.shift(perp_only)))
        if transition.is_downward:
            kernel = resonant_kernel(stack, a, b, cfg, pv_mode=pv_mode)
            pieces.append((kernel.shift(par_only), kernel.shift(perp_only)))
            out.resonant += pieces[-1][0].value + pieces[-1][1].value
            out.poles.extend(kernel.poles)
        for par, perp in pieces:
            out.par += par.value
            out.perp += perp.value
            out.abs_error += par.abs_error + perp.abs_error
            out.evaluations += par.evaluations
            out.converged = out.converged and par.converged and perp.converged
    return out


def total_shift(
    stack: Stack,
    transitions: Iterable[Transition],
    Z: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> ShiftResult:
    """Sum of non-resonant and resonant contributions over all ``transitions``."""
    transitions = list(transitions)
    if not transitions:
        raise InvalidParameterError("no transitions", "at least one transition is required")
    result = shift_breakdown(stack, transitions, Z, cfg).as_result()
    LOGGER.debug("Total shift at Z=%.6g over %d transitions: %.12g", Z, len(transitions), result.value)
    return result
