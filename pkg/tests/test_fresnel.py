from __future__ import annotations

import math

import numpy as np
import pytest

from casimir.core import Polarization, Stack
from casimir.errors import DegenerateIncidenceError, InvalidParameterError
from casimir.fresnel import (
    amended_reflection,
    amended_reflection_split,
    branch_sqrt,
    eta_reflection,
    eta_wave_vectors,
    imaginary_axis_reflections,
    single_interface,
    stack_coefficients,
    wave_vectors,
)


def test_normal_incidence_amplitudes():
    n = 1.5
    r_te, t_te = single_interface(1.0, n, 1.0, n, Polarization.TE)
    r_tm, t_tm = single_interface(1.0, n, 1.0, n, Polarization.TM)
    assert r_te == pytest.approx((1 - n) / (1 + n))
    assert t_te == pytest.approx(2 / (1 + n))
    assert r_tm == pytest.approx((n - 1) / (n + 1))
    # single-interface flux balance with this amplitude convention
    assert abs(r_tm) ** 2 + n * abs(t_tm) ** 2 == pytest.approx(1.0)


def test_degenerate_incidence_raises():
    with pytest.raises(DegenerateIncidenceError):
        single_interface(1.0, 2.0, 0.0, 0.0, Polarization.TE)


def test_branch_sqrt_selects_the_physical_sheet():
    assert branch_sqrt(-4.0) == pytest.approx(2j)
    assert branch_sqrt(4.0, reference=-1.0) == pytest.approx(-2.0)
    assert branch_sqrt(complex(-1, -1e-3)).imag > 0


@pytest.mark.parametrize("pol", list(Polarization))
def test_flux_identity_on_random_propagating_inputs(pol: Polarization, rng: np.random.Generator):
    worst = 0.0
    for _ in range(1000):
        stack = Stack(*rng.uniform(1.0, 4.0, 2), rng.uniform(0.0, 3.0))
        omega = rng.uniform(0.1, 5.0)
        k_par = omega * rng.uniform(0.0, 0.99)
        kz = math.sqrt(omega * omega - k_par * k_par)
        wv = wave_vectors(stack, k_par, kz)
        R = stack_coefficients(stack, wv, pol, "right").R
        T = stack_coefficients(stack, wv, pol, "left").T
        worst = max(worst, abs((wv.kz / wv.kzs).real * abs(T) ** 2 + abs(R) ** 2 - 1))
    assert worst < 1e-12


@pytest.mark.parametrize("pol", list(Polarization))
def test_cut_discontinuity_identity(pol: Polarization, rng: np.random.Generator):
    for _ in range(100):
        n_s = rng.uniform(1.1, 3.0)
        stack = Stack(rng.uniform(n_s, 4.0), n_s, rng.uniform(0.0, 2.0))
        k_par = rng.uniform(0.2, 3.0)
        gamma_s = k_par * math.sqrt(1 - 1 / n_s**2)
        kz = 1j * gamma_s * rng.uniform(0.01, 0.99)
        upper = wave_vectors(stack, k_par, kz)
        lower = wave_vectors(stack, k_par, kz, kzs_sign=-1)
        jump = stack_coefficients(stack, upper, pol, "right").R - stack_coefficients(stack, lower, pol, "right").R
        T = stack_coefficients(stack, upper, pol, "left").T
        expected = upper.kz / upper.kzs * abs(T) ** 2
        assert jump == pytest.approx(expected, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("pol", list(Polarization))
def test_halfspace_stack_reduces_to_a_single_interface(pol: Polarization):
    stack = Stack(1.7, 1.7, 0.8)
    wv = wave_vectors(stack, 0.6, 0.9)
    r_vl, _ = single_interface(1.0, 1.7, wv.kz, wv.kzl, pol)
    assert amended_reflection(stack, wv, pol) == pytest.approx(r_vl, rel=1e-14)


@pytest.mark.parametrize("pol", list(Polarization))
def test_split_reflection_sums_to_full(layered_stack: Stack, pol: Polarization):
    wv = wave_vectors(layered_stack, 1.2, 0.4j)
    interface, correction = amended_reflection_split(layered_stack, wv, pol)
    assert interface + correction == pytest.approx(amended_reflection(layered_stack, wv, pol), rel=1e-13)


@pytest.mark.parametrize(("x", "y"), [(0.3, 0.1), (1.0, 0.5), (4.0, 0.95)])
def test_imaginary_axis_reflections_match_the_general_coefficients(x: float, y: float):
    n_l, n_s, b = 2.0, 1.5, 0.3
    stack = Stack(n_l, n_s, b)
    wv = wave_vectors(stack, x * math.sqrt(1 - y * y), 1j * x)
    te, tm = imaginary_axis_reflections(n_l, n_s, b, x, y)
    assert te == pytest.approx(amended_reflection(stack, wv, Polarization.TE).real, rel=1e-12)
    assert tm == pytest.approx(amended_reflection(stack, wv, Polarization.TM).real, rel=1e-12)

    interface = imaginary_axis_reflections(n_l, n_s, b, x, y, "interface")
    correction = imaginary_axis_reflections(n_l, n_s, b, x, y, "correction")
    assert interface[0] + correction[0] == pytest.approx(te, rel=1e-13)
    assert interface[1] + correction[1] == pytest.approx(tm, rel=1e-13)


def test_eta_branches(layered_stack: Stack):
    inside = eta_wave_vectors(layered_stack, 1.0, 1.4, "evanescent")
    assert inside.kzl.imag == 0 and inside.kzl.real > 0
    assert inside.kzs.real == 0 and inside.kzs.imag > 0

    travelling = eta_wave_vectors(layered_stack, 2.0, 0.5, "travelling")
    assert travelling.kz == pytest.approx(1.0)
    assert travelling.k_par == pytest.approx(2.0 * math.sqrt(0.75))

    with pytest.raises(InvalidParameterError):
        eta_wave_vectors(layered_stack, 1.0, 1.5, "travelling")
    with pytest.raises(InvalidParameterError):
        eta_reflection(layered_stack, 1.0, 0.5, "sideways", Polarization.TE)


def test_complex_eta_continues_from_the_window_interior(layered_stack: Stack):
    eta = 1.4
    on_axis = eta_reflection(layered_stack, 1.0, eta, "evanescent", Polarization.TE)
    above = eta_reflection(layered_stack, 1.0, complex(eta, 1e-9), "evanescent", Polarization.TE)
    below = eta_reflection(layered_stack, 1.0, complex(eta, -1e-9), "evanescent", Polarization.TE)
    assert above == pytest.approx(on_axis, abs=1e-7)
    assert below == pytest.approx(on_axis, abs=1e-7)
