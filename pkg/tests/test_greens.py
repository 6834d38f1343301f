from __future__ import annotations

import math

import numpy as np
import pytest

from casimir.core import Stack
from casimir.errors import InvalidParameterError, SeriesSingularError
from casimir.greens import (
    dipole_energy_from_green,
    electrostatic_shift,
    electrostatic_shift_series,
    greens_hessian,
    greens_reflected,
    halfspace_electrostatic,
    image_kernel,
)
from casimir.numerics import QuadratureConfig
from oracles import image_series_green


def test_image_kernel_without_layer_is_the_substrate_ratio():
    kernel = image_kernel(Stack(2.0, 1.5, 0.7))
    assert kernel(3.0, 0.0) == pytest.approx((1.5**2 - 1) / (1.5**2 + 1), rel=1e-14)
    assert kernel(1e3, 0.7) == pytest.approx(kernel.alpha, rel=1e-14)
    assert kernel.r_im == pytest.approx(kernel.alpha * kernel.beta)


def test_reflected_potential_of_a_halfspace(tight_cfg: QuadratureConfig):
    n = 1.8
    stack = Stack(n, n, 0.4)
    rho, s = 0.3, 1.4
    expected = -(n * n - 1) / (n * n + 1) / (4 * math.pi * math.hypot(rho, s - stack.L))
    assert greens_reflected(stack, rho, s, tight_cfg).value == pytest.approx(expected, rel=1e-10)


def test_reflected_potential_matches_image_series(tight_cfg: QuadratureConfig, rng: np.random.Generator):
    for _ in range(20):
        n_l, n_s = rng.uniform(1.05, 4.0, 2)
        L = rng.uniform(0.01, 2.0)
        s = L + rng.uniform(0.2, 3.0)
        rho = rng.uniform(0.0, 1.0)
        stack = Stack(n_l, n_s, L)
        value = greens_reflected(stack, rho, s, tight_cfg).value
        assert value == pytest.approx(image_series_green(n_l, n_s, L, rho, s, terms=2000), rel=1e-10)


def test_image_series_oracle_reduces_to_one_image():
    single = image_series_green(2.0, 2.0, 0.5, 0.0, 1.5)
    assert single == pytest.approx(-0.6 / (4 * math.pi * 1.0))
    # coincident images rebuild the bare substrate
    substrate = (1.5**2 - 1) / (1.5**2 + 1)
    assert image_series_green(2.0, 1.5, 0.0, 0.0, 1.0) == pytest.approx(-substrate / (4 * math.pi), rel=1e-12)


def test_electrostatic_series_matches_the_integral(tight_cfg: QuadratureConfig, rng: np.random.Generator):
    for _ in range(20):
        stack = Stack(rng.uniform(1.05, 4.0), rng.uniform(1.0, 4.0), rng.uniform(0.0, 2.0))
        Z = rng.uniform(0.05, 3.0)
        integral = electrostatic_shift(stack, 1.0, 0.5, Z, tight_cfg)
        series = electrostatic_shift_series(stack, 1.0, 0.5, Z)
        assert series.value == pytest.approx(integral.value, rel=1e-10)
        assert series.converged


def test_electrostatic_series_truncation_and_singular_index():
    stack = Stack(2.0, 1.5, 0.4)
    few = electrostatic_shift_series(stack, 1.0, 0.0, 0.5, terms=2)
    assert few.evaluations == 2
    assert few.abs_error > 0
    with pytest.raises(SeriesSingularError):
        electrostatic_shift_series(Stack(1.0, 1.5, 0.4), 1.0, 0.0, 0.5)


def test_electrostatic_shift_of_a_halfspace(cfg: QuadratureConfig):
    value = electrostatic_shift(Stack(3.0, 3.0, 0.2), 1.0, 1.0, 0.5, cfg).value
    assert value == pytest.approx(halfspace_electrostatic(3.0, 1.0, 1.0, 0.5), rel=1e-9)
    assert value < 0


def test_hessian_obeys_laplace_and_antisymmetry(tight_cfg: QuadratureConfig):
    stack = Stack(2.0, 1.5, 0.5)
    rho, s = 0.7, 1.6
    xx = greens_hessian(stack, rho, s, ("x", "x"), tight_cfg).value
    yy = greens_hessian(stack, rho, s, ("y", "y"), tight_cfg).value
    zz = greens_hessian(stack, rho, s, ("z", "z"), tight_cfg).value
    assert zz == pytest.approx(xx + yy, rel=1e-9)
    xz = greens_hessian(stack, rho, s, ("x", "z"), tight_cfg).value
    zx = greens_hessian(stack, rho, s, ("z", "x"), tight_cfg).value
    assert xz == pytest.approx(-zx, rel=1e-12)
    assert greens_hessian(stack, 0.0, s, ("x", "z"), tight_cfg).value == 0.0


def test_dipole_energy_from_green_equals_electrostatic_shift(tight_cfg: QuadratureConfig):
    stack = Stack(2.0, 1.5, 0.3)
    direct = electrostatic_shift(stack, 1.3, 0.4, 0.6, tight_cfg).value
    via_green = dipole_energy_from_green(stack, 1.3, 0.4, 0.6, tight_cfg).value
    assert via_green == pytest.approx(direct, rel=1e-10)


def test_geometry_checks():
    stack = Stack(2.0, 1.5, 1.0)
    with pytest.raises(InvalidParameterError):
        greens_reflected(stack, 0.0, 0.9)
    with pytest.raises(InvalidParameterError):
        greens_reflected(stack, -0.1, 2.0)
    with pytest.raises(InvalidParameterError):
        greens_hessian(stack, 0.0, 2.0, ("x", "w"))  # type: ignore[arg-type]
    with pytest.raises(InvalidParameterError):
        electrostatic_shift(stack, 1.0, 0.0, 0.0)
