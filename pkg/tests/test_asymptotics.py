from __future__ import annotations

import math

import pytest

from casimir.asymptotics import (
    Regime,
    electrostatic_coefficients,
    excited_nonretarded_resonant,
    excited_retarded_envelope,
    excited_retarded_halfspace,
    excited_retarded_resonant,
    excited_retarded_slab,
    halfspace_coefficients,
    halfspace_coefficients_quadrature,
    halfspace_retarded,
    printed_thin_layer_coefficients,
    resonance_condition,
    slab_coefficients,
    thick_layer_electrostatic,
    thin_layer_coefficients,
    thin_layer_electrostatic,
    thin_layer_retarded,
)
from casimir.core import Stack, Transition
from casimir.errors import InvalidParameterError, SlabLimitError
from casimir.greens import electrostatic_shift, electrostatic_shift_series
from casimir.numerics import QuadratureConfig
from oracles import halfspace_coefficients_simpson


@pytest.mark.parametrize("n", [1.2, 1.5, 2.0, 3.0, 5.0, 20.0])
def test_halfspace_coefficients_match_simpson(n: float):
    assert halfspace_coefficients(n) == pytest.approx(halfspace_coefficients_simpson(n), rel=1e-8)


def test_halfspace_coefficients_limits():
    assert halfspace_coefficients(1.0) == (0.0, 0.0)
    near_one = halfspace_coefficients(1.0 + 1e-4)
    assert near_one == pytest.approx(halfspace_coefficients_quadrature(1.0 + 1e-4))
    assert halfspace_coefficients(1e3) == pytest.approx((4 / 3, 4 / 3), rel=1e-2)
    assert halfspace_coefficients(99.9) == pytest.approx(halfspace_coefficients(100.1), rel=1e-3)
    with pytest.raises(InvalidParameterError):
        halfspace_coefficients(0.5)


def test_halfspace_retarded_is_attractive_for_the_ground_state():
    estimate = halfspace_retarded(1.5, Transition(1.0, 1.0, 1.0), 50.0)
    assert estimate.value < 0
    assert estimate.regime is Regime.HALFSPACE_RETARDED
    assert estimate.as_dict()["regime"] == "halfspace-retarded"


def test_slab_coefficients():
    assert slab_coefficients(2.0) == pytest.approx((3.075, 1.8))


def test_thin_layer_coefficients_reach_the_slab_limit():
    exact = slab_coefficients(2.0)
    assert thin_layer_coefficients(2.0, 1.0 + 1e-4) == pytest.approx(exact, rel=1e-3)
    # the integral form is continuous into the slab branch
    assert thin_layer_coefficients(2.0, 1.002) == pytest.approx(exact, rel=2e-2)


def test_thin_layer_coefficients_vanish_without_contrast():
    assert thin_layer_coefficients(1.7, 1.7) == pytest.approx((0.0, 0.0), abs=1e-14)
    stack = Stack(1.7, 1.7, 0.5)
    transition = Transition(1.0, 1.0, 1.0)
    assert thin_layer_retarded(stack, transition, 50.0).value == pytest.approx(
        halfspace_retarded(1.7, transition, 50.0).value, rel=1e-12
    )


def test_printed_thin_layer_form_is_singular_for_a_free_slab():
    with pytest.raises(SlabLimitError):
        printed_thin_layer_coefficients(2.0, 1.0)
    a_par, a_perp = printed_thin_layer_coefficients(2.0, 1.5)
    assert math.isfinite(a_par) and math.isfinite(a_perp)
    # the estimators still reach the free slab
    assert thin_layer_coefficients(2.0, 1.0) == pytest.approx(slab_coefficients(2.0))


def test_electrostatic_coefficients_closed_form():
    a1, a2 = electrostatic_coefficients(2.0, 1.5)
    contrast = 16 - 1.5**4
    assert a1 == pytest.approx(3 / 4 * contrast / 3.25**2)
    assert a2 == pytest.approx(-6 / 16 * contrast * (2.25 + 16) / 3.25**3)
    assert electrostatic_coefficients(1.5, 1.5) == (0.0, -0.0)


def test_thin_layer_electrostatic_error_is_third_order(tight_cfg: QuadratureConfig):
    Z = 1.0

    def residual(ratio: float) -> float:
        stack = Stack(2.0, 1.5, ratio * Z)
        exact = electrostatic_shift(stack, 1.0, 1.0, Z, tight_cfg).value
        return abs(thin_layer_electrostatic(stack, 1.0, 1.0, Z).value - exact)

    assert 6.0 < residual(1 / 20) / residual(1 / 40) < 10.0


def test_thick_layer_electrostatic_is_the_image_series():
    stack = Stack(2.0, 1.5, 2.0)
    estimate = thick_layer_electrostatic(stack, 1.0, 0.0, 0.1)
    assert estimate.value == pytest.approx(electrostatic_shift_series(stack, 1.0, 0.0, 0.1).value)
    assert estimate.regime is Regime.THICK_ELECTROSTATIC


def test_excited_nonretarded_resonant_doubles_the_static_shift(cfg: QuadratureConfig):
    stack = Stack(2.0, 1.5, 0.3)
    transitions = [Transition(-1.0, 1.0, 0.5), Transition(2.0, 5.0, 5.0)]
    estimate = excited_nonretarded_resonant(stack, transitions, 0.2, cfg)
    assert estimate.value == pytest.approx(2 * electrostatic_shift(stack, 1.0, 0.5, 0.2, cfg).value, rel=1e-10)


def test_retarded_resonant_form_reduces_to_halfspace_and_slab():
    transitions = [Transition(-1.3, 1.0, 0.0)]
    Z = 17.0
    same = excited_retarded_resonant(Stack(1.8, 1.8, 0.4), transitions, Z).value
    assert same == pytest.approx(excited_retarded_halfspace(1.8, transitions, Z), rel=1e-12)
    free = excited_retarded_resonant(Stack(1.8, 1.0, 0.4), transitions, Z).value
    assert free == pytest.approx(excited_retarded_slab(1.8, transitions, 0.4, Z), rel=1e-12)


@pytest.mark.parametrize("kappa", [1, 2, 3])
def test_anti_resonant_layer_is_invisible_in_the_far_zone(kappa: int):
    energy, n_l, n_s = 1.3, 2.0, 1.5
    L = math.pi * kappa / (energy * n_l)
    transitions = [Transition(-energy, 1.0, 0.0)]
    for Z in (11.0, 23.5):
        layered = excited_retarded_resonant(Stack(n_l, n_s, L), transitions, Z).value
        assert layered == pytest.approx(excited_retarded_halfspace(n_s, transitions, Z), rel=1e-9, abs=1e-15)


def test_envelope_reproduces_the_oscillating_shift():
    stack = Stack(2.0, 1.5, 0.37)
    transition = Transition(-1.0, 2.0, 0.0)
    envelope = excited_retarded_envelope(stack, transition)
    for Z in (10.0, 13.3, 40.0):
        value = excited_retarded_resonant(stack, [transition], Z).value
        assert envelope(Z) == pytest.approx(value, rel=1e-10, abs=1e-15)
        assert abs(value) <= envelope.magnitude(Z) * (1 + 1e-12)


def test_ground_transitions_do_not_resonate():
    assert excited_retarded_halfspace(1.5, [Transition(1.0, 1.0, 0.0)], 10.0) == 0.0


def test_resonance_condition_lengths():
    entries = resonance_condition(Stack(2.0, 1.5, 0.1), -1.0, 2)
    assert [entry.kappa for entry in entries] == [0, 1, 2]
    for entry in entries:
        assert entry.L_res == pytest.approx(math.pi * (entry.kappa + 0.5) / 2.0)
        assert entry.L_antires == pytest.approx(math.pi * entry.kappa / 2.0)
    with pytest.raises(InvalidParameterError):
        resonance_condition(Stack(2.0, 1.5, 0.1), 0.0, 2)


def test_resonance_roles_interchange_over_a_denser_substrate():
    assert not any(entry.interchanged for entry in resonance_condition(Stack(2.0, 1.5, 0.1), 1.0, 3))
    swapped = resonance_condition(Stack(1.5, 2.0, 0.1), 1.0, 3)
    assert all(entry.interchanged for entry in swapped)
    assert swapped[1].L_res == pytest.approx(math.pi * 1.5 / 1.5)
    assert not resonance_condition(Stack(1.5, 1.5, 0.1), 1.0, 0)[0].interchanged
