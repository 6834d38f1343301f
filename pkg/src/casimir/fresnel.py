"""Fresnel coefficients of a single layer on a substrate.

Conventions
-----------
``single_interface(n_b, n_a, kz_b, kz_a)`` is the amplitude pair for a wave
in medium ``b`` hitting medium ``a``; ``r_vl`` therefore means vacuum onto
layer, ``r_ls`` layer onto substrate. Every stack amplitude is assembled from
these primitives and the shared denominator ``1 + r_vl r_ls exp(2i kzl L)``.

Right-incident modes come from the vacuum side (z > L/2), left-incident
modes from the substrate (z < -L/2). Complex square roots follow the
physical branch: propagating components share the sign of ``kz``,
evanescent components have ``Im >= 0``.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Literal, Tuple

from .core import Polarization, Stack
from .errors import DegenerateIncidenceError, DispersionPoleError, InvalidParameterError

LOGGER = logging.getLogger(__name__)

Side = Literal["left", "right"]
Branch = Literal["travelling", "evanescent"]

_DEGENERATE = 64 * 2.220446049250313e-16


@dataclass(frozen=True)
class WaveVectorSet:
    k_par: complex
    kz: complex
    kzl: complex
    kzs: complex


@dataclass(frozen=True)
class CoefficientSet:
    R: complex
    I: complex
    J: complex
    T: complex


def branch_sqrt(radicand: complex, reference: complex = 1.0) -> complex:
    """Square root with ``Im >= 0``; real roots take the sign of ``Re(reference)``."""
    root = cmath.sqrt(complex(radicand))
    if root.imag < 0:
        return -root
    if root.imag == 0 and complex(reference).real < 0:
        return -root
    return root


def wave_vectors(stack: Stack, k_par: float, kz: complex, *, kzs_sign: int = 1) -> WaveVectorSet:
    """Layer and substrate z-components for the vacuum pair ``(k_par, kz)``.

    ``kzs_sign=-1`` selects the other side of the substrate branch cut on the
    segment ``0 < Im kz < Gamma_s`` of the imaginary axis.
    """
    kz = complex(kz)
    kpar2 = k_par * k_par
    kzl = branch_sqrt((stack.n_l**2 - 1) * kpar2 + stack.n_l**2 * kz * kz, kz)
    kzs = branch_sqrt((stack.n_s**2 - 1) * kpar2 + stack.n_s**2 * kz * kz, kz)
    if kzs_sign < 0:
        kzs = -kzs
    return WaveVectorSet(k_par=k_par, kz=kz, kzl=kzl, kzs=kzs)


def single_interface(
    n_b: float, n_a: float, kz_b: complex, kz_a: complex, pol: Polarization
) -> Tuple[complex, complex]:
    if pol is Polarization.TE:
        denominator = kz_b + kz_a
        scale = abs(kz_b) + abs(kz_a)
        if abs(denominator) <= _DEGENERATE * scale or scale == 0:
            raise DegenerateIncidenceError(f"grazing/degenerate incidence (TE, kz_b={kz_b!r}, kz_a={kz_a!r})")
        return (kz_b - kz_a) / denominator, 2 * kz_b / denominator
    wb = kz_b / n_b**2
    wa = kz_a / n_a**2
    denominator = wb + wa
    scale = abs(wb) + abs(wa)
    if abs(denominator) <= _DEGENERATE * scale or scale == 0:
        raise DegenerateIncidenceError(f"grazing/degenerate incidence (TM, kz_b={kz_b!r}, kz_a={kz_a!r})")
    return (wb - wa) / denominator, (2 * kz_b / (n_a * n_b)) / denominator


@dataclass(frozen=True)
class _StackPieces:
    r_vl: complex
    t_vl: complex
    r_lv: complex
    t_lv: complex
    r_ls: complex
    t_ls: complex
    r_sl: complex
    t_sl: complex
    phase: complex
    denominator: complex


def _pieces(stack: Stack, wv: WaveVectorSet, pol: Polarization) -> _StackPieces:
    r_vl, t_vl = single_interface(1.0, stack.n_l, wv.kz, wv.kzl, pol)
    r_lv, t_lv = single_interface(stack.n_l, 1.0, wv.kzl, wv.kz, pol)
    r_ls, t_ls = single_interface(stack.n_l, stack.n_s, wv.kzl, wv.kzs, pol)
    r_sl, t_sl = single_interface(stack.n_s, stack.n_l, wv.kzs, wv.kzl, pol)
    phase = cmath.exp(2j * wv.kzl * stack.L)
    product = r_vl * r_ls * phase
    denominator = 1 + product
    if abs(denominator) <= _DEGENERATE * max(1.0, abs(product)):
        raise DispersionPoleError(wv.kz)
    return _StackPieces(r_vl, t_vl, r_lv, t_lv, r_ls, t_ls, r_sl, t_sl, phase, denominator)


def stack_coefficients(stack: Stack, wv: WaveVectorSet, pol: Polarization, side: Side) -> CoefficientSet:
    p = _pieces(stack, wv, pol)
    L = stack.L
    kz, kzl, kzs = wv.kz, wv.kzl, wv.kzs
    if side == "left":
        return CoefficientSet(
            R=(p.r_sl + p.r_lv * p.phase) / p.denominator * cmath.exp(-1j * kzs * L),
            I=p.t_sl * cmath.exp(0.5j * (kzl - kzs) * L) / p.denominator,
            J=p.t_sl * p.r_lv * cmath.exp(0.5j * (3 * kzl - kzs) * L) / p.denominator,
            T=p.t_sl * p.t_lv * cmath.exp(0.5j * (2 * kzl - kzs - kz) * L) / p.denominator,
        )
    if side == "right":
        return CoefficientSet(
            R=(p.r_vl + p.r_ls * p.phase) / p.denominator * cmath.exp(-1j * kz * L),
            I=p.t_vl * cmath.exp(0.5j * (kzl - kz) * L) / p.denominator,
            J=p.t_vl * p.r_ls * cmath.exp(0.5j * (3 * kzl - kz) * L) / p.denominator,
            T=p.t_vl * p.t_ls * cmath.exp(0.5j * (2 * kzl - kzs - kz) * L) / p.denominator,
        )
    raise InvalidParameterError("side", f"side must be 'left' or 'right', got {side!r}")


def amended_reflection(stack: Stack, wv: WaveVectorSet, pol: Polarization) -> complex:
    """Vacuum-side reflection with the propagation phase to z = L/2 removed."""
    p = _pieces(stack, wv, pol)
    return (p.r_vl + p.r_ls * p.phase) / p.denominator


def amended_reflection_split(stack: Stack, wv: WaveVectorSet, pol: Polarization) -> Tuple[complex, complex]:
    """Return ``(r_vl, correction)`` with ``r_vl + correction`` the amended reflection."""
    p = _pieces(stack, wv, pol)
    correction = (1 - p.r_vl * p.r_vl) * p.r_ls * p.phase / p.denominator
    return p.r_vl, correction


ReflectionPart = Literal["full", "interface", "correction"]


def _combine(r_vl: float, r_ls: float, phase: float, part: ReflectionPart) -> float:
    if part == "interface":
        return r_vl
    denominator = 1 + r_vl * r_ls * phase
    if part == "correction":
        return (1 - r_vl * r_vl) * r_ls * phase / denominator
    return (r_vl + r_ls * phase) / denominator


def imaginary_axis_reflections(
    n_l: float, n_s: float, b: float, x: float, y: float, part: ReflectionPart = "full"
) -> Tuple[float, float]:
    """Real ``(R_TE, R_TM)`` at ``kz = i x``, ``kzi = i x sqrt((n_i^2-1) y^2 + 1)``.

    Lengths are in units of the transition wavelength, so the layer phase is
    ``exp(-2 x b p_l)`` with ``b = |E| L``. ``part`` selects the full
    coefficient, the bare vacuum/layer interface, or the layer correction.
    """
    p_l = math.sqrt((n_l * n_l - 1) * y * y + 1)
    p_s = math.sqrt((n_s * n_s - 1) * y * y + 1)
    phase = math.exp(-2 * x * b * p_l)
    te = _combine((1 - p_l) / (1 + p_l), (p_l - p_s) / (p_l + p_s), phase, part)

    u_l = p_l / (n_l * n_l)
    u_s = p_s / (n_s * n_s)
    tm = _combine((1 - u_l) / (1 + u_l), (u_l - u_s) / (u_l + u_s), phase, part)
    return te, tm


def scaled_reflection_imaginary_axis(
    stack: Stack, energy_scale: float, x: float, y: float, pol: Polarization
) -> float:
    if not x > 0 or not 0 <= y <= 1:
        raise InvalidParameterError("scaled variables", f"need x > 0 and 0 <= y <= 1, got x={x}, y={y}")
    te, tm = imaginary_axis_reflections(stack.n_l, stack.n_s, abs(energy_scale) * stack.L, x, y)
    return te if pol is Polarization.TE else tm


def _evanescent_kz(index_term: float, eta: complex, *, above: bool) -> complex:
    """``sqrt(index_term - eta^2)`` with ``Im >= 0`` on the real axis.

    Off the real axis the root is continued from the guided-mode window
    interior: the layer root from below its branch point (``above=False``),
    the substrate root from above it (``above=True``).
    """
    if eta.imag != 0:
        if above:
            return 1j * cmath.sqrt(eta * eta - index_term)
        return cmath.sqrt(index_term - eta * eta)
    if (eta * eta).real > index_term:
        return 1j * cmath.sqrt(eta * eta - index_term)
    return cmath.sqrt(index_term - eta * eta)


def eta_wave_vectors(stack: Stack, energy_scale: float, eta: complex, branch: Branch) -> WaveVectorSet:
    scale = abs(energy_scale)
    if branch == "travelling":
        eta = float(getattr(eta, "real", eta))
        if not 0 <= eta <= 1:
            raise InvalidParameterError("eta", f"travelling branch needs 0 <= eta <= 1, got {eta}")
        return wave_vectors(stack, scale * math.sqrt(1 - eta * eta), scale * eta)
    if branch == "evanescent":
        eta = complex(eta)
        return WaveVectorSet(
            k_par=scale * cmath.sqrt(1 + eta * eta),
            kz=1j * scale * eta,
            kzl=scale * _evanescent_kz(stack.n_l**2 - 1, eta, above=False),
            kzs=scale * _evanescent_kz(stack.n_s**2 - 1, eta, above=True),
        )
    raise InvalidParameterError("branch", f"branch must be 'travelling' or 'evanescent', got {branch!r}")


def eta_reflection(stack: Stack, energy_scale: float, eta: complex, branch: Branch, pol: Polarization) -> complex:
    """Amended reflection on the real-frequency contour used by the resonant shift.

    Raises :class:`DispersionPoleError` when ``eta`` hits a guided-mode pole.
    """
    return amended_reflection(stack, eta_wave_vectors(stack, energy_scale, eta, branch), pol)
