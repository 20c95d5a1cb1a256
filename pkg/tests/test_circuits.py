import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firstquant.circuits import (
    Estimate,
    ShotPlan,
    combine,
    estimate_E,
    hadamard_test,
    overlap_probability,
    reference_states_for,
)
from firstquant.errors import ComplexAmplitudesRejected
from firstquant.grid import basis_state, make_state, plane_wave, uniform_state
from firstquant.operators import boundary_matrix, expectation_A_sym, expectation_E

from conftest import random_complex_state, random_real_state


def indices(refs):
    return {r.label: r.indices for r in refs}


def test_shot_plan_validation():
    with pytest.raises(ValueError):
        ShotPlan("shots", 0, 1)
    with pytest.raises(ValueError):
        ShotPlan("shots", 10, 2**64)
    assert ShotPlan.exact().is_exact


def test_derived_plans_differ_and_repeat():
    plan = ShotPlan.shots(100, seed=7)
    assert plan.derive(0, 1).rng_seed == plan.derive(0, 1).rng_seed
    assert plan.derive(0, 1).rng_seed != plan.derive(0, 2).rng_seed
    assert ShotPlan.exact().derive(3) == ShotPlan.exact()


def test_hadamard_exact_examples():
    assert hadamard_test(uniform_state(3), 1, ShotPlan.exact()).value == pytest.approx(1.0)
    pw = hadamard_test(plane_wave(3, 1), 1, ShotPlan.exact())
    assert pw.value == pytest.approx(math.cos(2 * math.pi / 8), abs=1e-15)
    assert pw.std_error == 0


def test_hadamard_imag_hook():
    pw = hadamard_test(plane_wave(3, 1), 1, ShotPlan.exact(), part="imag")
    assert pw.value == pytest.approx(math.sin(2 * math.pi / 8), abs=1e-15)
    with pytest.raises(ValueError):
        hadamard_test(plane_wave(3, 1), 1, ShotPlan.exact(), part="phase")


def test_hadamard_shots_basis_state():
    # true value 0: the control outcome is a fair coin
    est = hadamard_test(basis_state(3, 0), 1, ShotPlan.shots(10**6, seed=3))
    assert est.std_error == pytest.approx(1e-3, rel=1e-3)
    assert abs(est.value) < 5 * est.std_error
    assert est.shots == 10**6 and est.seed == 3


def test_hadamard_shots_coverage():
    misses = 0
    for seed in range(200):
        est = hadamard_test(basis_state(3, 0), 1, ShotPlan.shots(10**6, seed=seed))
        misses += abs(est.value) >= 5 * est.std_error
    assert misses <= 2


def test_hadamard_standard_error_scaling_on_balanced_state(rng):
    state = random_real_state(rng, 4)
    shots = np.array([10**3, 10**4, 10**5, 10**6, 10**7])
    errors = [hadamard_test(state, 1, ShotPlan.shots(n, seed=11)).std_error for n in shots]
    slope = np.polyfit(np.log(shots), np.log(errors), 1)[0]
    assert 0.45 <= -slope <= 0.55


def test_reference_rows():
    assert indices(reference_states_for("E0", 3)) == {"f": (0,), "g": (7,), "s": (0, 7)}
    assert indices(reference_states_for("E1", 3)) == {"f": (1,), "g": (7,), "s": (1, 7)}
    assert indices(reference_states_for("E2", 3)) == {"f": (0,), "g": (6,), "s": (0, 6)}
    assert set(indices(reference_states_for("E0sq", 3))) == {"f", "g"}
    s = reference_states_for("E0", 3)[2].state.amplitudes
    np.testing.assert_allclose(s[[0, 7]], 1 / math.sqrt(2))


def test_overlap_examples():
    u = uniform_state(3)
    f, g, s = reference_states_for("E0", 3)
    assert overlap_probability(u, f, ShotPlan.exact()).value == pytest.approx(0.125)
    assert overlap_probability(u, s, ShotPlan.exact()).value == pytest.approx(0.25)
    assert overlap_probability(basis_state(3, 3), f, ShotPlan.exact()).value == 0


def test_estimate_E_examples():
    u = uniform_state(3)
    exact = ShotPlan.exact()
    assert estimate_E(u, "E0", exact).value == pytest.approx(0.25)
    c = u.amplitudes
    assert estimate_E(u, "E0", exact).value == pytest.approx(np.vdot(c, boundary_matrix(8, "E0") @ c).real)
    assert estimate_E(basis_state(3, 0), "E0sq", exact).value == pytest.approx(1.0)
    assert estimate_E(u, "E1", exact, "full").value == pytest.approx(0.5)
    assert estimate_E(u, "E1", exact, "paper_literal").value == pytest.approx(0.25)


@pytest.mark.parametrize("L", [2, 3, 4, 5])
def test_exact_protocols_match_direct(rng, L):
    for _ in range(20):
        s = random_real_state(rng, L)
        for l in (1, 2, 3):
            assert hadamard_test(s, l, ShotPlan.exact()).value == pytest.approx(
                0.5 * expectation_A_sym(s, l), abs=1e-12
            )
        for which, direct in [("E0", "E0"), ("E0sq", "E0sq")]:
            assert estimate_E(s, which, ShotPlan.exact()).value == pytest.approx(expectation_E(s, direct), abs=1e-12)
        for which in ("E1", "E2"):
            for variant, suffix in (("full", "full"), ("paper_literal", "paper")):
                assert estimate_E(s, which, ShotPlan.exact(), variant).value == pytest.approx(
                    expectation_E(s, which + suffix), abs=1e-12
                )


def test_complex_state_gate():
    s = random_complex_state(np.random.default_rng(1), 3)
    with pytest.raises(ComplexAmplitudesRejected):
        estimate_E(s, "E0", ShotPlan.exact())
    # with the override the overlap combination is still the Hermitian expectation
    assert estimate_E(s, "E0", ShotPlan.exact(), allow_complex=True).value == pytest.approx(
        expectation_E(s, "E0"), abs=1e-14
    )


def test_global_phase_real_state_passes_gate():
    s = make_state(np.exp(0.7j) * np.arange(1, 9))
    assert estimate_E(s, "E0", ShotPlan.exact()).value == pytest.approx(2 * 1 * 8 / 204)


def test_shots_estimate_E_reuses_edge_measurement():
    s = random_real_state(np.random.default_rng(5), 3)
    plan = ShotPlan.shots(5000, seed=9)
    e0sq = estimate_E(s, "E0sq", plan)
    f0 = overlap_probability(s, reference_states_for("E0sq", 3)[0], plan)
    e1_full = estimate_E(s, "E1", plan, "full")
    e1_lit = estimate_E(s, "E1", plan, "paper_literal")
    assert e1_full.value - e1_lit.value == pytest.approx(2 * f0.value, abs=1e-15)
    assert e0sq.std_error > 0


def test_combine_quadrature():
    out = combine([(2.0, Estimate(1.0, 0.3)), (-1.0, Estimate(0.5, 0.4))], offset=1.0)
    assert out.value == pytest.approx(2.5)
    assert out.std_error == pytest.approx(math.sqrt(0.36 + 0.16))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 5), st.floats(0, 2 * math.pi), st.integers(0, 2**32 - 1))
def test_circuit_outputs_phase_invariant(L, phi, seed):
    s = random_real_state(np.random.default_rng(seed), L)
    t = make_state(s.amplitudes * np.exp(1j * phi))
    plan = ShotPlan.shots(1000, seed=seed)
    for l in (1, 2):
        assert hadamard_test(s, l, ShotPlan.exact()).value == pytest.approx(
            hadamard_test(t, l, ShotPlan.exact()).value, abs=1e-14
        )
        # identical draws up to a single count from round-off in the outcome probability
        assert abs(hadamard_test(s, l, plan).value - hadamard_test(t, l, plan).value) <= 2 / 1000 + 1e-15
    for which in ("E0", "E1", "E2", "E0sq"):
        assert estimate_E(s, which, ShotPlan.exact()).value == pytest.approx(
            estimate_E(t, which, ShotPlan.exact()).value, abs=1e-14
        )
