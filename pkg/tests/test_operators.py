import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firstquant.errors import UnsupportedOrderError
from firstquant.grid import PhysicsConfig, basis_state, make_state, plane_wave, uniform_state
from firstquant.operators import (
    BoundaryCondition,
    apply_shift,
    boundary_matrix,
    build_kinetic_matrix,
    build_p2_matrix,
    expectation_A,
    expectation_A_sym,
    expectation_E,
    shift_matrix,
)

from conftest import random_complex_state, random_real_state


def unit_scale(L):
    """Config with m = c = 1 and m c L_m = 1."""
    return PhysicsConfig.from_compton_ratio(1.0, L)


def test_adder_wraps_last_point():
    out = apply_shift(basis_state(3, 7), 1, "forward")
    np.testing.assert_array_equal(out.amplitudes, basis_state(3, 0).amplitudes)


def test_shift_leaves_uniform_unchanged():
    u = uniform_state(3)
    for p in range(5):
        np.testing.assert_array_equal(apply_shift(u, p).amplitudes, u.amplitudes)


def test_shift_plane_wave_phase():
    pw = plane_wave(3, 1)
    shifted = apply_shift(pw, 1, "forward")
    phase = np.exp(-2j * np.pi / 8)
    np.testing.assert_allclose(shifted.amplitudes, phase * pw.amplitudes, atol=1e-15)
    direct = np.vdot(pw.amplitudes, shift_matrix(8) @ pw.amplitudes)
    assert direct == pytest.approx(phase, abs=1e-15)


def test_expectation_A_examples():
    assert expectation_A(uniform_state(3), 1) == pytest.approx(1.0, abs=1e-15)
    assert expectation_A_sym(uniform_state(3), 1) == pytest.approx(2.0)
    pw = plane_wave(3, 1)
    direct = np.vdot(pw.amplitudes, (shift_matrix(8) + shift_matrix(8).T) @ pw.amplitudes).real
    assert expectation_A_sym(pw, 1) == pytest.approx(math.sqrt(2), abs=1e-14)
    assert expectation_A_sym(pw, 1) == pytest.approx(direct, abs=1e-14)
    assert expectation_A(basis_state(3, 3), 1) == 0


@pytest.mark.parametrize("L", [2, 3, 4])
@pytest.mark.parametrize("l", [1, 2, 3, 5, 8])
def test_expectation_A_matches_matrix(rng, L, l):
    s = random_complex_state(rng, L)
    n = 2**L
    adag_l = np.linalg.matrix_power(shift_matrix(n).T, l)
    assert expectation_A(s, l) == pytest.approx(np.vdot(s.amplitudes, adag_l @ s.amplitudes), abs=1e-14)


def test_expectation_E_uniform():
    u = uniform_state(3)
    assert expectation_E(u, "E0") == pytest.approx(0.25)
    assert expectation_E(u, "E1paper") == pytest.approx(0.25)
    assert expectation_E(u, "E1full") == pytest.approx(0.5)
    # dense definition A E0 + E0 A^dag on the uniform state
    m = boundary_matrix(8, "E1full")
    assert np.vdot(u.amplitudes, m @ u.amplitudes).real == pytest.approx(0.5)


def test_expectation_E_basis_zero():
    b = basis_state(3, 0)
    assert expectation_E(b, "E0") == 0
    assert expectation_E(b, "E0sq") == 1


def test_full_boundary_operators_carry_diagonal():
    n = 8
    e1 = boundary_matrix(n, "E1full") - boundary_matrix(n, "E1paper")
    e2 = boundary_matrix(n, "E2full") - boundary_matrix(n, "E2paper")
    expected1 = np.zeros((n, n)); expected1[0, 0] = 2
    expected2 = np.zeros((n, n)); expected2[n - 1, n - 1] = 2
    np.testing.assert_array_equal(e1, expected1)
    np.testing.assert_array_equal(e2, expected2)


@pytest.mark.parametrize("which", ["E0", "E1full", "E2full", "E0sq", "E1paper", "E2paper"])
@pytest.mark.parametrize("L", [2, 3, 5])
def test_expectation_E_matches_matrix(rng, which, L):
    s = random_complex_state(rng, L)
    m = boundary_matrix(2**L, which)
    assert expectation_E(s, which) == pytest.approx(np.vdot(s.amplitudes, m @ s.amplitudes).real, abs=1e-14)


def test_p2_pbc_stencil():
    p2 = build_p2_matrix(unit_scale(2), "pbc").matrix
    expected = np.array([[2, -1, 0, -1], [-1, 2, -1, 0], [0, -1, 2, -1], [-1, 0, -1, 2]], float)
    np.testing.assert_allclose(p2, expected, atol=1e-15)


def test_p2_dbc_stencil_and_ground():
    p2 = build_p2_matrix(unit_scale(2), "dbc")
    expected = np.array([[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]], float)
    np.testing.assert_allclose(p2.matrix, expected, atol=1e-15)
    assert p2.eigvalsh()[0] == pytest.approx(0.3819660112501051, abs=1e-12)


@pytest.mark.parametrize("L", [2, 3, 6])
def test_p2_pbc_has_zero_mode(L):
    vals = build_p2_matrix(unit_scale(L), "pbc").eigvalsh()
    assert abs(vals[0]) < 1e-12


@pytest.mark.parametrize("L", range(2, 8))
@pytest.mark.parametrize("bc", ["pbc", "dbc"])
def test_p2_spectrum_closed_form(L, bc):
    cfg = PhysicsConfig.from_compton_ratio(0.37, L, mass=1.3, light_speed=0.8)
    n = 2**L
    s = cfg.momentum_scale**2
    if bc == "pbc":
        expected = s * (2 - 2 * np.cos(2 * np.pi * np.arange(n) / n))
    else:
        expected = s * (2 - 2 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
    vals = build_p2_matrix(cfg, bc).eigvalsh()
    np.testing.assert_allclose(vals, np.sort(expected), atol=1e-10)
    assert vals[0] >= -1e-12
    if bc == "dbc":
        assert vals[0] > 0


def test_kinetic_order1_is_p2_over_2m():
    cfg = PhysicsConfig(mass=1.7, light_speed=2.3, hbar=0.05, qubits=3)
    for bc in BoundaryCondition:
        k = build_kinetic_matrix(cfg, bc, 1).matrix
        p2 = build_p2_matrix(cfg, bc).matrix
        np.testing.assert_allclose(k, p2 / (2 * cfg.mass), rtol=1e-13, atol=1e-15)


def test_kinetic_order2_annihilates_uniform():
    cfg = PhysicsConfig.from_compton_ratio(0.3, 3)
    assert build_kinetic_matrix(cfg, "pbc", 2).expectation(uniform_state(3)) == pytest.approx(0, abs=1e-16)


def test_kinetic_order2_dbc_ground():
    cfg = PhysicsConfig.from_compton_ratio(0.2, 3)
    vals = build_kinetic_matrix(cfg, "dbc", 2).eigvalsh()
    x = 0.04 * (2 - 2 * np.cos(np.pi / 9))
    assert vals[0] == pytest.approx(x / 2 - x * x / 8, rel=1e-12)


def test_kinetic_order3_includes_p6():
    cfg = PhysicsConfig.from_compton_ratio(0.2, 3)
    x = 0.04 * (2 - 2 * np.cos(np.pi / 9))
    assert build_kinetic_matrix(cfg, "dbc", 3).eigvalsh()[0] == pytest.approx(
        x / 2 - x**2 / 8 + x**3 / 16, rel=1e-12
    )


@pytest.mark.parametrize("order", [0, 4])
def test_kinetic_rejects_unsupported_order(order):
    with pytest.raises(UnsupportedOrderError):
        build_kinetic_matrix(unit_scale(2), "pbc", order)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6), st.integers(0, 70), st.integers(0, 2**32 - 1))
def test_shift_unitarity(L, power, seed):
    s = random_complex_state(np.random.default_rng(seed), L)
    back = apply_shift(apply_shift(s, power, "forward"), power, "backward")
    assert np.max(np.abs(back.amplitudes - s.amplitudes)) <= 1e-15


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_squared_dbc_difference_decomposition(L, seed):
    s = random_complex_state(np.random.default_rng(seed), L)
    n = 2**L
    a1 = shift_matrix(n) + shift_matrix(n).T
    one = np.eye(n)
    e0 = boundary_matrix(n, "E0")
    c = s.amplitudes
    exact = np.vdot(c, np.linalg.matrix_power(a1 - 2 * one - e0, 2) @ c).real
    pbc_part = np.vdot(c, np.linalg.matrix_power(a1 - 2 * one, 2) @ c).real
    full = pbc_part + 4 * expectation_E(s, "E0") - expectation_E(s, "E1full") - expectation_E(s, "E2full") + expectation_E(s, "E0sq")
    literal = pbc_part + 4 * expectation_E(s, "E0") - expectation_E(s, "E1paper") - expectation_E(s, "E2paper") + expectation_E(s, "E0sq")
    edge = s.probabilities[0] + s.probabilities[-1]
    assert abs(full - exact) <= 1e-12
    assert abs((literal - exact) - 2 * edge) <= 1e-12


@pytest.mark.parametrize("L", [2, 3, 4])
def test_lattice_operators_hermitian(L):
    cfg = PhysicsConfig.from_compton_ratio(0.25, L)
    for bc in BoundaryCondition:
        for order in (1, 2, 3):
            m = build_kinetic_matrix(cfg, bc, order).matrix
            assert np.max(np.abs(m - m.T)) <= 1e-14
