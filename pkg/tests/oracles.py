"""Brute-force reference routines for the test suite.

Nothing here imports the library's numerical paths: fixed-grid rules, closed
image sums and dense sign scans only.
"""
from __future__ import annotations

import math
from typing import Callable, List, Tuple

import numpy as np

GridFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def brute_double_quadrature(
    integrand: GridFunction, grid: Tuple[int, int], x_max: float, *, chunk: int = 256
) -> float:
    """Composite midpoint rule of ``integrand(x, y)`` on ``[0, x_max] x [0, 1]``."""
    nx, ny = grid
    hx, hy = x_max / nx, 1.0 / ny
    y = (np.arange(ny) + 0.5) * hy
    total = 0.0
    for start in range(0, nx, chunk):
        x = (np.arange(start, min(start + chunk, nx)) + 0.5) * hx
        total += float(integrand(x[:, None], y[None, :]).sum())
    return total * hx * hy


def _reflections(n_l: float, n_s: float, b: float, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    p_l = np.sqrt((n_l**2 - 1) * y**2 + 1)
    p_s = np.sqrt((n_s**2 - 1) * y**2 + 1)
    phase = np.exp(-2 * x * b * p_l)

    def stack(r_top: np.ndarray, r_bottom: np.ndarray) -> np.ndarray:
        return (r_top + r_bottom * phase) / (1 + r_top * r_bottom * phase)

    te = stack((1 - p_l) / (1 + p_l), (p_l - p_s) / (p_l + p_s))
    w_l, w_s = p_l / n_l**2, p_s / n_s**2
    tm = stack((1 - w_l) / (1 + w_l), (w_l - w_s) / (w_l + w_s))
    return te, tm


def ground_kernel_oracle(
    n_l: float, n_s: float, a: float, b: float, grid: Tuple[int, int] = (4096, 4096)
) -> Tuple[float, float]:
    """``(I_par, I_perp)`` straight from the ``(x, y)`` double integral."""
    x_max = 40.0 / (2 * a)

    def weight(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return x**3 * np.exp(-2 * a * x) / (1 + x**2 * y**2)

    def par(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        te, tm = _reflections(n_l, n_s, b, x, y)
        return weight(x, y) * (y**2 * te - tm)

    def perp(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        _, tm = _reflections(n_l, n_s, b, x, y)
        return weight(x, y) * 2 * (y**2 - 1) * tm

    return brute_double_quadrature(par, grid, x_max), brute_double_quadrature(perp, grid, x_max)


def fine_scan_roots(
    f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, step: float, *, refine: int = 60
) -> List[Tuple[float, float, float]]:
    """Every sign change of ``f`` on a dense grid as ``(lo, hi, bisected root)``."""
    grid = np.arange(lo, hi, step)
    values = f(grid)
    found = []
    for k in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
        left, right = float(grid[k]), float(grid[k + 1])
        f_left = float(values[k])
        a, c = left, right
        for _ in range(refine):
            mid = 0.5 * (a + c)
            f_mid = float(f(np.array([mid]))[0])
            if np.sign(f_mid) == np.sign(f_left):
                a, f_left = mid, f_mid
            else:
                c = mid
        found.append((left, right, 0.5 * (a + c)))
    return found


def slab_guide_function(n_l: float, n_s: float, k_par: float, L: float, te: bool) -> Callable[[np.ndarray], np.ndarray]:
    """Pole-free guided-mode condition in the layer wavenumber ``h``.

    ``(h'^2 - q kappa') sin(hL) - h'(q + kappa') cos(hL)`` where primes mark
    the ``1/n^2`` weights of TM; its zeros are the guided modes.
    """

    h_max = guided_h_max(n_l, n_s, k_par)

    def f(h: np.ndarray) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        if np.any(h > h_max) or np.any(h < 0):
            raise ValueError(f"h outside the guided window [0, {h_max}]")
        q = np.sqrt((n_l**2 - 1) * k_par**2 - h**2) / n_l
        # n_s^2 q^2 - (n_s^2 - 1) k_par^2, factored so it stays >= 0 up to h_max
        kappa = n_s / n_l * np.sqrt((h_max - h) * (h_max + h))
        hw, kw = (h, kappa) if te else (h / n_l**2, kappa / n_s**2)
        return (hw**2 - q * kw) * np.sin(h * L) - hw * (q + kw) * np.cos(h * L)

    return f


def guided_h_max(n_l: float, n_s: float, k_par: float) -> float:
    """Layer wavenumber at the substrate light line, ``q = k_par sqrt(1 - 1/n_s^2)``."""
    return k_par * math.sqrt(n_l**2 - n_s**2) / n_s


def guided_q(n_l: float, k_par: float, h: float) -> float:
    return math.sqrt((n_l**2 - 1) * k_par**2 - h**2) / n_l


def image_series_green(n_l: float, n_s: float, L: float, rho: float, s: float, terms: int = 400) -> float:
    """Reflected quasi-static potential as a sum over image charges at depths ``s - L + 2 nu L``."""
    alpha = (n_l**2 - 1) / (n_l**2 + 1)
    beta = (n_l**2 - n_s**2) / (n_l**2 + n_s**2)
    sigma = s - L
    parts = [alpha / math.hypot(rho, sigma)]
    if beta != 0:
        strength = beta * (alpha * alpha - 1)
        ratio = 1.0
        for nu in range(1, terms + 1):
            parts.append(strength * ratio / math.hypot(rho, sigma + 2 * nu * L))
            ratio *= alpha * beta
    return -math.fsum(parts) / (4 * math.pi)


def simpson(values: np.ndarray, h: float) -> float:
    if len(values) % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number of samples")
    return float(h / 3 * (values[0] + values[-1] + 4 * values[1:-1:2].sum() + 2 * values[2:-1:2].sum()))


def halfspace_coefficients_simpson(n: float, samples: int = 20001) -> Tuple[float, float]:
    y = np.linspace(0.0, 1.0, samples)
    p = np.sqrt((n * n - 1) * y * y + 1)
    te = (1 - p) / (1 + p)
    tm = (n * n - p) / (n * n + p)
    h = 1.0 / (samples - 1)
    return simpson(tm - y * y * te, h), simpson(2 * (1 - y * y) * tm, h)
