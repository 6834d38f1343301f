"""Guided (trapped) modes of the layer and the mode-completeness audit.

Trapped modes live in the window where the field propagates inside the layer
but decays in vacuum and substrate. On that window the stack denominator
``1 + r_vl r_ls exp(2i kzl L)`` is, up to a non-vanishing factor, the real
function

    f = q cos(phi) + k sin(phi),   phi = atan2(kappa, k) - kzl L

with ``q = |kz|``, ``kappa = |kzs|`` and ``k = kzl``. For TM the layer and
substrate components carry their ``1/n^2`` weights. Roots are bracketed on a
uniform ``kzl`` grid and refined with Brent's method.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Literal, Sequence, Tuple

import numpy as np
from scipy import special

from . import greens
from .core import Polarization, Stack, validate_stack
from .errors import InvalidParameterError, NormalizationError, ScanDensityError
from .fresnel import amended_reflection, single_interface, stack_coefficients, wave_vectors
from .numerics import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    find_roots_bracketed,
    integrate_finite,
    integrate_semi_infinite,
)

LOGGER = logging.getLogger(__name__)

ModeKind = Literal["left", "right", "trapped"]
Axis = Literal["x", "y", "z"]

_TRAVELLING_RAY = cmath.exp(0.25j * math.pi)


@dataclass(frozen=True)
class TrappedRoot:
    pol: Polarization
    k_par: float
    q: float
    residual: float

    @property
    def kz(self) -> complex:
        return 1j * self.q

    def as_dict(self) -> dict:
        return {"pol": self.pol.value, "k_par": self.k_par, "q": self.q, "residual": self.residual}


@dataclass(frozen=True)
class ResonancePole:
    """Guided-mode pole of the resonant-shift integrand, ``kz = i eta`` at unit frequency."""

    eta: float
    pol: Polarization
    residual: float


@dataclass(frozen=True)
class ModeId:
    kind: ModeKind
    kx: float
    ky: float
    kz: complex
    pol: Polarization

    @property
    def k_par(self) -> float:
        return math.hypot(self.kx, self.ky)


@dataclass(frozen=True)
class AuditResult:
    mode_sum: float
    target: float
    residual: float
    converged: bool

    def as_dict(self) -> dict:
        return {"mode_sum": self.mode_sum, "target": self.target, "residual": self.residual, "converged": self.converged}


def dispersion(stack: Stack, k_par: float, kz: complex, pol: Polarization) -> complex:
    """``1 + r_vl r_ls exp(2i kzl L)``; zero on trapped modes."""
    wv = wave_vectors(stack, k_par, kz)
    r_vl, _ = single_interface(1.0, stack.n_l, wv.kz, wv.kzl, pol)
    r_ls, _ = single_interface(stack.n_l, stack.n_s, wv.kzl, wv.kzs, pol)
    return 1 + r_vl * r_ls * cmath.exp(2j * wv.kzl * stack.L)


def reduced_dispersion(
    n_l: float, n_s: float, L: float, kzl: float, q: float, kappa: float, pol: Polarization
) -> float:
    if pol is Polarization.TE:
        k, kap = kzl, kappa
    else:
        k, kap = kzl / (n_l * n_l), kappa / (n_s * n_s)
    phi = math.atan2(kap, k) - kzl * L
    return q * math.cos(phi) + k * math.sin(phi)


def _window_roots(
    f: Callable[[float], float], kzl_max: float, phase_extent: float, cfg: QuadratureConfig
) -> List[Tuple[float, float]]:
    points = cfg.scan_points_per_phase * max(1, math.ceil(phase_extent))
    lo = kzl_max * 1e-9
    roots = find_roots_bracketed(f, lo, kzl_max, points, cfg)
    cell = (kzl_max - lo) / points
    # Simple roots of a smooth function alternate in crossing direction.
    previous = 0.0
    for estimate in roots:
        direction = math.copysign(1.0, f(max(lo, estimate.root - 0.25 * cell)))
        if direction == previous:
            raise ScanDensityError(2 * points, f"two roots share one scan cell near kzl={estimate.root:.6g}")
        previous = direction
    return [(estimate.root, estimate.residual) for estimate in roots]


def find_trapped_modes(
    stack: Stack, k_par: float, pol: Polarization, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> List[TrappedRoot]:
    """All trapped-mode roots at fixed ``k_par``, ordered by increasing ``q``."""
    validate_stack(stack)
    if k_par < 0:
        raise InvalidParameterError("k_par < 0", f"in-plane wavenumber must be >= 0, got {k_par}")
    n_l, n_s, L = stack.n_l, stack.n_s, stack.L
    if n_l <= n_s or k_par == 0 or L == 0:
        return []
    # kzl_max is where kappa reaches 0, i.e. q = k_par sqrt(1 - 1/n_s^2).
    kzl_max = k_par * math.sqrt(n_l * n_l - n_s * n_s) / n_s

    def q_of(kzl: float) -> float:
        return math.sqrt((n_l * n_l - 1) * k_par * k_par - kzl * kzl) / n_l

    def kappa_of(kzl: float) -> float:
        return n_s / n_l * math.sqrt((kzl_max - kzl) * (kzl_max + kzl))

    def f(kzl: float) -> float:
        return reduced_dispersion(n_l, n_s, L, kzl, q_of(kzl), kappa_of(kzl), pol)

    found = []
    for kzl, _ in _window_roots(f, kzl_max, n_l * k_par * L, cfg):
        q = q_of(kzl)
        residual = abs(dispersion(stack, k_par, 1j * q, pol))
        found.append(TrappedRoot(pol=pol, k_par=k_par, q=q, residual=residual))
    found.sort(key=lambda root: root.q)
    LOGGER.debug("%d %s trapped modes at k_par=%.6g", len(found), pol.value, k_par)
    return found


def resonance_dispersion(stack: Stack, b: float, eta: float, pol: Polarization) -> float:
    """Reduced dispersion at unit frequency and layer thickness ``b`` for ``kz = i eta``."""
    n_l, n_s = stack.n_l, stack.n_s
    if not n_s * n_s - 1 <= eta * eta <= n_l * n_l - 1:
        raise InvalidParameterError("eta outside guided window", f"eta={eta} not in [sqrt(n_s^2-1), sqrt(n_l^2-1)]")
    kzl = math.sqrt(n_l * n_l - 1 - eta * eta)
    kappa = math.sqrt(eta * eta - (n_s * n_s - 1))
    return reduced_dispersion(n_l, n_s, b, kzl, eta, kappa, pol)


def find_resonance_poles(
    stack: Stack, b: float, pol: Polarization, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> List[ResonancePole]:
    """Poles of the evanescent resonant integrand on ``sqrt(n_s^2-1) < eta < sqrt(n_l^2-1)``."""
    validate_stack(stack)
    n_l, n_s = stack.n_l, stack.n_s
    if n_l <= n_s or b <= 0:
        return []
    kzl_max = math.sqrt(n_l * n_l - n_s * n_s)

    def eta_of(kzl: float) -> float:
        return math.sqrt(n_l * n_l - 1 - kzl * kzl)

    def f(kzl: float) -> float:
        kappa = math.sqrt((kzl_max - kzl) * (kzl_max + kzl))
        return reduced_dispersion(n_l, n_s, b, kzl, eta_of(kzl), kappa, pol)

    poles = [ResonancePole(eta=eta_of(kzl), pol=pol, residual=res) for kzl, res in _window_roots(f, kzl_max, n_l * b, cfg)]
    poles.sort(key=lambda pole: pole.eta)
    return poles


def polarization_vector(
    pol: Polarization, kx: float, ky: float, kzi: complex, n_i: float, omega: complex, direction: int
) -> np.ndarray:
    """Unit polarization of the plane wave ``exp(i(kx x + ky y + direction kzi z))``."""
    k_par = math.hypot(kx, ky)
    cx, cy = (kx / k_par, ky / k_par) if k_par > 0 else (1.0, 0.0)
    if pol is Polarization.TE:
        return np.array([-cy, cx, 0.0], dtype=complex)
    return np.array([direction * cx * kzi, direction * cy * kzi, -k_par], dtype=complex) / (n_i * omega)


def _trapped_pieces(stack: Stack, root: TrappedRoot):
    wv = wave_vectors(stack, root.k_par, root.kz)
    r_lv, t_lv = single_interface(stack.n_l, 1.0, wv.kzl, wv.kz, root.pol)
    r_ls, t_ls = single_interface(stack.n_l, stack.n_s, wv.kzl, wv.kzs, root.pol)
    return wv, r_lv, t_lv, r_ls, t_ls


def trapped_normalization(stack: Stack, root: TrappedRoot) -> float:
    """``N`` such that the trapped mode is delta-normalized in ``k_par``.

    The bracket is ``int eps |u|^2 dz`` of the layer profile
    ``exp(i kzl z) + r_lv exp(i kzl L) exp(-i kzl z)``.
    """
    wv, r_lv, t_lv, r_ls, t_ls = _trapped_pieces(stack, root)
    n_l, n_s, L = stack.n_l, stack.n_s, stack.L
    omega = math.sqrt(root.k_par**2 - root.q**2)
    kzl = wv.kzl.real

    def side(n_i: float, kzi: complex, t_li: complex, r_li: complex, direction: int) -> float:
        outer = polarization_vector(root.pol, root.k_par, 0.0, kzi, n_i, omega, direction)
        up = polarization_vector(root.pol, root.k_par, 0.0, wv.kzl, n_l, omega, 1)
        down = polarization_vector(root.pol, root.k_par, 0.0, wv.kzl, n_l, omega, -1)
        cross = float(np.real(np.dot(up, down)))
        leak = 0.5 * n_i * n_i * float(np.vdot(outer, outer).real) * abs(t_li) ** 2 / abs(kzi)
        return leak - n_l * n_l / kzl * r_li.imag * cross

    bracket = 2 * n_l * n_l * L + side(n_s, wv.kzs, t_ls, r_ls, -1) + side(1.0, wv.kz, t_lv, r_lv, 1)
    if not (math.isfinite(bracket) and bracket > 0):
        raise NormalizationError(f"normalization bracket {bracket!r} for {root!r}")
    return 1.0 / (2 * math.pi * math.sqrt(bracket))


def _trapped_field(stack: Stack, mode: ModeId, z: float) -> np.ndarray:
    root = TrappedRoot(mode.pol, mode.k_par, mode.kz.imag, 0.0)
    wv, r_lv, t_lv, r_ls, t_ls = _trapped_pieces(stack, root)
    omega = math.sqrt(root.k_par**2 - root.q**2)
    L = stack.L

    def e(kzi: complex, n_i: float, direction: int) -> np.ndarray:
        return polarization_vector(mode.pol, mode.kx, mode.ky, kzi, n_i, omega, direction)

    kz, kzl, kzs = wv.kz, wv.kzl, wv.kzs
    if z >= L / 2:
        amplitude = t_lv * cmath.exp(0.5j * (kzl - kz) * L)
        field = amplitude * cmath.exp(1j * kz * z) * e(kz, 1.0, 1)
    elif z >= -L / 2:
        V = r_lv * cmath.exp(1j * kzl * L)
        field = cmath.exp(1j * kzl * z) * e(kzl, stack.n_l, 1) + V * cmath.exp(-1j * kzl * z) * e(kzl, stack.n_l, -1)
    else:
        amplitude = t_ls / r_ls * cmath.exp(-0.5j * (kzl + kzs) * L)
        field = amplitude * cmath.exp(-1j * kzs * z) * e(kzs, stack.n_s, -1)
    return trapped_normalization(stack, root) * field


def mode_function(stack: Stack, mode: ModeId, position: Sequence[float]) -> np.ndarray:
    """Vector mode function at ``position = (x, y, z)``.

    Points on an interface take the expression of the medium above it.
    """
    validate_stack(stack)
    x, y, z = (float(c) for c in position)
    lateral = cmath.exp(1j * (mode.kx * x + mode.ky * y))
    if mode.kind == "trapped":
        return lateral * _trapped_field(stack, mode, z)
    if mode.kind not in ("left", "right"):
        raise InvalidParameterError("mode kind", f"unknown mode kind {mode.kind!r}")

    wv = wave_vectors(stack, mode.k_par, mode.kz)
    coeffs = stack_coefficients(stack, wv, mode.pol, mode.kind)
    omega = cmath.sqrt(mode.k_par**2 + wv.kz**2)
    kz, kzl, kzs = wv.kz, wv.kzl, wv.kzs
    L = stack.L

    def e(kzi: complex, n_i: float, direction: int) -> np.ndarray:
        return polarization_vector(mode.pol, mode.kx, mode.ky, kzi, n_i, omega, direction)

    def wave(k: complex, n_i: float, direction: int) -> np.ndarray:
        return cmath.exp(direction * 1j * k * z) * e(k, n_i, direction)

    if mode.kind == "right":
        if z >= L / 2:
            field = wave(kz, 1.0, -1) + coeffs.R * wave(kz, 1.0, 1)
        elif z >= -L / 2:
            field = coeffs.I * wave(kzl, stack.n_l, -1) + coeffs.J * wave(kzl, stack.n_l, 1)
        else:
            field = coeffs.T * wave(kzs, stack.n_s, -1)
        prefactor = 1.0
    else:
        if z >= L / 2:
            field = coeffs.T * wave(kz, 1.0, 1)
        elif z >= -L / 2:
            field = coeffs.I * wave(kzl, stack.n_l, 1) + coeffs.J * wave(kzl, stack.n_l, -1)
        else:
            field = wave(kzs, stack.n_s, 1) + coeffs.R * wave(kzs, stack.n_s, -1)
        prefactor = 1.0 / stack.n_s
    return (2 * math.pi) ** -1.5 * prefactor * lateral * field


def _pair_weight(pol: Polarization, component: Tuple[Axis, Axis], k_par: float, kz: complex, rho: float) -> complex:
    """Angular integral of ``e_i(+) e_j(-) exp(i k_par rho cos theta)`` in vacuum."""
    j0, j1, j2 = special.jv([0, 1, 2], k_par * rho)
    a0 = 2 * math.pi * j0
    a_cos = 2j * math.pi * j1
    a_cos2 = math.pi * (j0 - j2)
    a_sin2 = math.pi * (j0 + j2)
    if pol is Polarization.TE:
        return {("x", "x"): a_sin2, ("y", "y"): a_cos2}.get(component, 0.0)
    omega2 = k_par * k_par + kz * kz
    weights = {
        ("x", "x"): -kz * kz / omega2 * a_cos2,
        ("y", "y"): -kz * kz / omega2 * a_sin2,
        ("z", "z"): k_par * k_par / omega2 * a0,
        ("x", "z"): -kz * k_par / omega2 * a_cos,
        ("z", "x"): kz * k_par / omega2 * a_cos,
    }
    return weights.get(component, 0.0)


def _mode_sum_density(
    stack: Stack, k_par: float, s: float, rho: float, component: Tuple[Axis, Axis], cfg: QuadratureConfig
) -> float:
    """Reflected part of the mode sum per unit ``k_par`` (without the ``k_par`` measure)."""
    sigma = s - stack.L
    plane_waves = (2 * math.pi) ** -3
    total = 0.0
    for pol in Polarization:
        for root in find_trapped_modes(stack, k_par, pol, cfg):
            wv, _, t_lv, _, _ = _trapped_pieces(stack, root)
            amplitude = abs(t_lv * cmath.exp(0.5j * (wv.kzl - wv.kz) * stack.L)) ** 2
            weight = _pair_weight(pol, component, k_par, root.kz, rho).real
            total += trapped_normalization(stack, root) ** 2 * amplitude * weight * math.exp(-root.q * s)

        gamma_s = k_par * math.sqrt(1 - 1 / stack.n_s**2)
        if gamma_s > 0:
            def evanescent(t: float, pol: Polarization = pol) -> float:
                wv = wave_vectors(stack, k_par, 1j * t)
                T = stack_coefficients(stack, wv, pol, "left").T
                weight = _pair_weight(pol, component, k_par, 1j * t, rho).real
                return t / wv.kzs.real * abs(T) ** 2 * weight * math.exp(-t * s)

            total += plane_waves * integrate_finite(evanescent, 0.0, gamma_s, cfg).value

        # Real-kz cross terms, rotated onto kz = kappa exp(i pi/4); the ray in
        # the second quadrant is the mirror image and doubles the real part.
        def travelling(kappa: float, pol: Polarization = pol) -> float:
            kz = kappa * _TRAVELLING_RAY
            wv = wave_vectors(stack, k_par, kz)
            reflected = amended_reflection(stack, wv, pol) * cmath.exp(1j * kz * sigma)
            return 2 * (reflected * _pair_weight(pol, component, k_par, kz, rho) * _TRAVELLING_RAY).real

        total += plane_waves * integrate_semi_infinite(travelling, sigma * _TRAVELLING_RAY.imag, cfg).value
    return total


def completeness_audit(
    stack: Stack,
    z: float,
    z_prime: float,
    rho: float,
    component: Tuple[Axis, Axis],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> AuditResult:
    """Compare the reflected part of the mode sum against ``-d_i d'_j G_H``.

    ``z`` and ``z_prime`` are heights above the layer mid-plane, both in
    vacuum; ``rho`` is the lateral separation along x.
    """
    validate_stack(stack)
    if not (z > stack.L / 2 and z_prime > stack.L / 2):
        raise InvalidParameterError("points in vacuum", f"need z, z' > L/2, got z={z}, z'={z_prime}")
    s = z + z_prime
    sigma = s - stack.L
    k_max = 36.0 / sigma
    outer_cfg = cfg.model_copy(update={"max_subdivisions": max(cfg.max_subdivisions, 200)})
    inner_cfg = cfg.tightened(0.1)

    summed = integrate_finite(
        lambda k: k * _mode_sum_density(stack, k, s, rho, component, inner_cfg), 0.0, k_max, outer_cfg
    )
    target = greens.greens_hessian(stack, rho, s, component, cfg)
    target_value = -target.value
    floor = max(abs(target_value), 1e-12)
    residual = abs(summed.value - target_value) / floor
    LOGGER.info(
        "Completeness %s%s: mode sum %.10g, target %.10g, residual %.3g",
        component[0], component[1], summed.value, target_value, residual,
    )
    return AuditResult(summed.value, target_value, residual, summed.converged and target.converged)
