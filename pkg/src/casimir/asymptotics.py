"""Closed-form limits of the shift used to validate the numerics."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Tuple

from .core import Stack, Transition, validate_stack, validate_transition
from .errors import InvalidParameterError, SlabLimitError
from .greens import electrostatic_integral, electrostatic_shift_series, halfspace_electrostatic
from .numerics import DEFAULT_CONFIG, QuadratureConfig, integrate_finite

LOGGER = logging.getLogger(__name__)

_SLAB_SWITCH = 1e-3
_LARGE_INDEX = 100.0


class Regime(str, Enum):
    THIN_ELECTROSTATIC = "thin-electrostatic"
    THICK_ELECTROSTATIC = "thick-electrostatic"
    THIN_RETARDED = "thin-retarded"
    HALFSPACE_RETARDED = "halfspace-retarded"
    EXCITED_NONRETARDED = "excited-nonretarded"
    EXCITED_RETARDED = "excited-retarded"


@dataclass(frozen=True)
class AsymptoticEstimate:
    value: float
    regime: Regime
    validity_note: str

    def as_dict(self) -> dict:
        return {"value": self.value, "regime": self.regime.value, "validity_note": self.validity_note}


@dataclass(frozen=True)
class Envelope:
    """``shift ~ (amplitude / Z) cos(2 energy Z + phase)``."""

    amplitude: float
    phase: float
    energy: float

    def magnitude(self, Z: float) -> float:
        return self.amplitude / Z

    def __call__(self, Z: float) -> float:
        return self.amplitude / Z * math.cos(2 * self.energy * Z + self.phase)


@dataclass(frozen=True)
class ResonanceLengths:
    kappa: int
    L_res: float
    L_antires: float
    # n_s > n_l: L_res and L_antires exchange meaning
    interchanged: bool = False


def _positive(Z: float) -> None:
    if not Z > 0:
        raise InvalidParameterError("Z <= 0", f"atom-surface distance must be positive, got Z={Z}")


# -- electrostatic -----------------------------------------------------------------


def electrostatic_coefficients(n_l: float, n_s: float) -> Tuple[float, float]:
    """First- and second-order coefficients of the thin-layer expansion in ``L / Z``."""
    contrast = n_l**4 - n_s**4
    a1 = 3 / n_l**2 * contrast / (n_s**2 + 1) ** 2
    a2 = -6 / n_l**4 * contrast * (n_s**2 + n_l**4) / (n_s**2 + 1) ** 3
    return a1, a2


def thin_layer_electrostatic(stack: Stack, mu_par_sq: float, mu_perp_sq: float, Z: float) -> AsymptoticEstimate:
    validate_stack(stack)
    _positive(Z)
    a1, a2 = electrostatic_coefficients(stack.n_l, stack.n_s)
    ratio = stack.L / Z
    head = halfspace_electrostatic(stack.n_s, mu_par_sq, mu_perp_sq, Z)
    layer = -(mu_par_sq + 2 * mu_perp_sq) / (64 * math.pi * Z**3) * (a1 * ratio + a2 * ratio**2)
    return AsymptoticEstimate(head + layer, Regime.THIN_ELECTROSTATIC, "L << Z << lambda")


def thick_layer_electrostatic(
    stack: Stack, mu_par_sq: float, mu_perp_sq: float, Z: float, terms: int | None = None
) -> AsymptoticEstimate:
    series = electrostatic_shift_series(stack, mu_par_sq, mu_perp_sq, Z, terms)
    return AsymptoticEstimate(series.value, Regime.THICK_ELECTROSTATIC, f"Z << lambda, {series.evaluations} images")


# -- retarded ground state -----------------------------------------------------------


def _halfspace_reflections(n: float, y: float) -> Tuple[float, float]:
    p = math.sqrt((n * n - 1) * y * y + 1)
    return (1 - p) / (1 + p), (n * n - p) / (n * n + p)


def halfspace_coefficients_quadrature(n: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    if n < 1:
        raise InvalidParameterError("index < 1", f"refractive index must be >= 1, got {n}")

    def par(y: float) -> float:
        te, tm = _halfspace_reflections(n, y)
        return tm - y * y * te

    def perp(y: float) -> float:
        return 2 * (1 - y * y) * _halfspace_reflections(n, y)[1]

    tight = cfg.tightened(1e-3)
    return integrate_finite(par, 0.0, 1.0, tight).value, integrate_finite(perp, 0.0, 1.0, tight).value


def halfspace_coefficients(n: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    """``(c_par, c_perp)`` of the retarded half-space shift; both tend to 4/3 for a perfect mirror."""
    if n < 1:
        raise InvalidParameterError("index < 1", f"refractive index must be >= 1, got {n}")
    if n == 1:
        return 0.0, 0.0
    if abs(n - 1) < _SLAB_SWITCH or n > _LARGE_INDEX:
        return halfspace_coefficients_quadrature(n, cfg)
    n2 = n * n
    root_p = math.sqrt(n2 + 1)
    root_m = math.sqrt(n2 - 1)
    log_p = math.log((root_p + 1) / (n * (root_p + n)))
    log_m = math.log(root_m + n)
    c_par = (
        -(2 * n2 / 3 + n - 8 / 3) / (n2 - 1)
        + 2 * n**4 / ((n2 - 1) * root_p) * log_p
        + (2 * n**4 - 2 * n2 - 1) / root_m**3 * log_m
    )
    c_perp = (
        (4 * n**4 - 2 * n**3 - 4 * n2 / 3 + 4 / 3) / (n2 - 1)
        - 4 * n**6 / ((n2 - 1) * root_p) * log_p
        - 2 * n2 * (2 * n**4 - 2 * n2 + 1) / root_m**3 * log_m
    )
    return c_par, c_perp


def halfspace_retarded(n_s: float, transition: Transition, Z: float) -> AsymptoticEstimate:
    validate_transition(transition)
    _positive(Z)
    c_par, c_perp = halfspace_coefficients(n_s)
    value = -3 / (64 * math.pi**2 * Z**4) * (c_par * transition.mu_par_sq + c_perp * transition.mu_perp_sq) / transition.E
    return AsymptoticEstimate(value, Regime.HALFSPACE_RETARDED, "Z >> lambda")


def slab_coefficients(n_l: float) -> Tuple[float, float]:
    n2 = n_l * n_l
    return (n2 - 1) * (9 * n2 + 5) / (10 * n2), (n2 - 1) * (5 * n2 + 4) / (10 * n2)


def thin_layer_coefficients(n_l: float, n_s: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    """``(a_par, a_perp)``: first-order change of the retarded half-space shift per unit ``L / Z``.

    Evaluated from the angular integral of the layer term of the reflection
    coefficients; free-standing slabs (``n_s`` within 1e-3 of 1) use the
    slab closed form.
    """
    if n_l < 1 or n_s < 1:
        raise InvalidParameterError("index < 1", f"refractive indices must be >= 1, got n_l={n_l}, n_s={n_s}")
    if abs(n_s - 1) < _SLAB_SWITCH:
        return slab_coefficients(n_l)
    n_l2, n_s2 = n_l * n_l, n_s * n_s

    def parts(y: float) -> Tuple[float, float]:
        p_s = math.sqrt((n_s2 - 1) * y * y + 1)
        u_l = math.sqrt((n_l2 - 1) * y * y + 1) / n_l2
        u_s = p_s / n_s2
        te = (n_l2 - n_s2) * y**4 / (1 + p_s) ** 2
        tm = n_l2 * (u_l * u_l - u_s * u_s) / (1 + u_s) ** 2
        return te, tm

    tight = cfg.tightened(1e-3)
    a_par = integrate_finite(lambda y: 3 * (parts(y)[0] - parts(y)[1]), 0.0, 1.0, tight).value
    a_perp = integrate_finite(lambda y: 3 * (y * y - 1) * parts(y)[1], 0.0, 1.0, tight).value
    return a_par, a_perp


def printed_thin_layer_coefficients(n_l: float, n_s: float) -> Tuple[float, float]:
    """Elementary-function form of ``(a_par, a_perp)`` as commonly quoted.

    Kept for comparison only: it is singular at ``n_s = 1`` and cannot give
    the free-slab limit, so :func:`thin_layer_coefficients` is the one used
    by the estimators.
    """
    if n_s == 1:
        raise SlabLimitError("quoted thin-layer coefficients are singular at n_s = 1")
    nl2, ns2 = n_l * n_l, n_s * n_s
    contrast = (nl2 - ns2) / nl2
    rational = contrast / ((ns2 - 1) ** 2 * (ns2 + 1))
    radical = contrast / (ns2 - 1) ** 2.5
    mixed = contrast / (2 * (ns2 - 1) ** 2 * (ns2 + 1) ** 1.5)
    root = math.sqrt(ns2 + 1)
    log_m = math.log(math.sqrt(ns2 - 1) + n_s)
    log_p = math.log((root + 1) / (root - 1) * (root - n_s) / (root + n_s))

    a_par = (
        rational * (n_s**5 * (6 * n_s - 3) * (nl2 - 1) + 3 * ns2 * (nl2 + 1) - nl2 * (2 * n_s**4 + 3 * n_s**3 + 3 * n_s - 8))
        - radical * log_m * (2 * ns2 * nl2 * (ns2 - 1) ** 2 - 2 * n_s**4 * (ns2 - 1) + nl2)
        - n_s**4 * mixed * log_p * (2 * n_s**4 * (nl2 - 1) - 2 * ns2 - 3 * nl2 + 1)
    )
    a_perp = (
        rational
        * (
            n_s**4 * (4 * ns2 - 3 * n_s - 3)
            - ns2 * (12 * n_s**6 - 6 * n_s**5 + 2) * (nl2 - 1)
            + nl2 * (2 * n_s**6 + 7 * n_s**4 - 3 * n_s**3 + 2)
        )
        + ns2 * radical * log_m * (nl2 * (4 * n_s**6 - 6 * n_s**4 + 3 * ns2 - 1) - ns2 * (2 * ns2 - 1) ** 2)
        + n_s**6 * mixed * log_p * (4 * n_s**4 * (nl2 - 1) + 2 * ns2 * (nl2 - 2) - 3 * nl2 + 1)
    )
    return a_par, a_perp


def thin_layer_retarded(
    stack: Stack, transition: Transition, Z: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> AsymptoticEstimate:
    validate_stack(stack)
    head = halfspace_retarded(stack.n_s, transition, Z)
    a_par, a_perp = thin_layer_coefficients(stack.n_l, stack.n_s, cfg)
    layer = -(a_par * transition.mu_par_sq + 2 * a_perp * transition.mu_perp_sq) / transition.E
    layer *= stack.L / Z / (16 * math.pi**2 * Z**4)
    return AsymptoticEstimate(head.value + layer, Regime.THIN_RETARDED, "L << lambda << Z")


# -- excited state -------------------------------------------------------------------


def _downward(transitions: Iterable[Transition]) -> List[Transition]:
    chosen = [t for t in transitions if t.is_downward]
    for transition in chosen:
        validate_transition(transition)
    return chosen


def excited_nonretarded_resonant(
    stack: Stack, transitions: Iterable[Transition], Z: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> AsymptoticEstimate:
    integral = electrostatic_integral(stack, Z, cfg)
    moments = sum(t.mu_par_sq + 2 * t.mu_perp_sq for t in _downward(transitions))
    return AsymptoticEstimate(-moments / (8 * math.pi) * integral.value, Regime.EXCITED_NONRETARDED, "Z << lambda")


def _interface_amplitudes(stack: Stack) -> Tuple[float, float]:
    r_vl = (1 - stack.n_l) / (1 + stack.n_l)
    r_ls = (stack.n_l - stack.n_s) / (stack.n_l + stack.n_s)
    return r_vl, r_ls


def excited_retarded_envelope(stack: Stack, transition: Transition) -> Envelope:
    """Amplitude and phase of the oscillating far-zone resonant shift of one transition."""
    validate_stack(stack)
    validate_transition(transition)
    r_vl, r_ls = _interface_amplitudes(stack)
    energy = abs(transition.E)
    tau = stack.n_l * stack.L
    phase = complex(math.cos(2 * energy * tau), math.sin(2 * energy * tau))
    combined = r_vl * (1 + r_ls**2) + r_vl**2 * r_ls * phase.conjugate() + r_ls * phase
    denominator = 1 + 2 * r_vl * r_ls * math.cos(2 * energy * tau) + (r_vl * r_ls) ** 2
    amplitude = energy**2 * transition.mu_par_sq * abs(combined) / (8 * math.pi * denominator)
    return Envelope(amplitude=amplitude, phase=math.atan2(combined.imag, combined.real) + math.pi, energy=energy)


def excited_retarded_resonant(stack: Stack, transitions: Iterable[Transition], Z: float) -> AsymptoticEstimate:
    """Oscillating far-zone resonant shift, ``|E| Z >> 1``, summed over downward transitions."""
    validate_stack(stack)
    _positive(Z)
    r_vl, r_ls = _interface_amplitudes(stack)
    tau = stack.n_l * stack.L
    total = 0.0
    for transition in _downward(transitions):
        energy = abs(transition.E)
        numerator = (
            r_vl * (1 + r_ls**2) * math.cos(2 * energy * Z)
            + r_vl**2 * r_ls * math.cos(2 * energy * (Z - tau))
            + r_ls * math.cos(2 * energy * (Z + tau))
        )
        denominator = 1 + 2 * r_vl * r_ls * math.cos(2 * energy * tau) + (r_vl * r_ls) ** 2
        total += -energy**2 * transition.mu_par_sq / (8 * math.pi * Z) * numerator / denominator
    return AsymptoticEstimate(total, Regime.EXCITED_RETARDED, "|E| Z >> 1")


def excited_retarded_halfspace(n_s: float, transitions: Iterable[Transition], Z: float) -> float:
    _positive(Z)
    ratio = (n_s - 1) / (n_s + 1)
    return sum(
        t.E**2 * t.mu_par_sq * math.cos(2 * abs(t.E) * Z) for t in _downward(transitions)
    ) * ratio / (8 * math.pi * Z)


def excited_retarded_slab(n_l: float, transitions: Iterable[Transition], L: float, Z: float) -> float:
    _positive(Z)
    r = (1 - n_l) / (1 + n_l)
    tau = n_l * L
    total = 0.0
    for t in _downward(transitions):
        energy = abs(t.E)
        numerator = (
            r * (1 + r * r) * math.cos(2 * energy * Z)
            - r**3 * math.cos(2 * energy * (Z - tau))
            - r * math.cos(2 * energy * (Z + tau))
        )
        denominator = 1 - 2 * r * r * math.cos(2 * energy * tau) + r**4
        total += -(t.E**2) * t.mu_par_sq / (8 * math.pi * Z) * numerator / denominator
    return total


def resonance_condition(stack: Stack, E: float, kappa_max: int) -> List[ResonanceLengths]:
    """Thicknesses where the layer round trip is in (anti-)phase with the transition wavelength.

    The lengths assume a layer denser than the substrate. For ``n_s > n_l``
    the layer/substrate reflection changes sign, so the two conditions swap
    roles: ``L_res`` then marks the anti-resonant thicknesses and ``L_antires``
    the resonant ones. Such entries carry ``interchanged=True``.
    """
    validate_stack(stack)
    if E == 0:
        raise InvalidParameterError("E == 0", "transition energy must be non-zero")
    if kappa_max < 0:
        raise InvalidParameterError("kappa_max < 0")
    wavelength = 2 * math.pi / abs(E)
    return [
        ResonanceLengths(
            kappa=kappa,
            L_res=wavelength / 2 * (kappa + 0.5) / stack.n_l,
            L_antires=wavelength / 2 * kappa / stack.n_l,
            interchanged=stack.n_s > stack.n_l,
        )
        for kappa in range(kappa_max + 1)
    ]
