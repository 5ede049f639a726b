import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from edss.bell import BellDiagonalState, canonicalize, from_spectrum, measures, to_density_matrix
from edss.carrier import CZ
from edss.core import relative_entropy
from edss.optimizer import (
    OptimizationError,
    UnitaryParams,
    _Evaluator,
    conjecture_slack,
    dephased_state,
    dephasing_upper_bound,
    objective,
    optimize,
    sample_probe_states,
)
from edss.protocol import gap_bound, run
from edss.suites import canonical_grid

OPTIMUM = BellDiagonalState(0.5, 0.25, 0.25)
coeffs = st.lists(st.floats(-np.pi, np.pi), min_size=16, max_size=16)


@given(coeffs)
def test_generated_unitaries(c):
    p = UnitaryParams(tuple(c))
    u = p.unitary()
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-10)
    np.testing.assert_allclose(u, expm(1j * p.generator()), atol=1e-10)


def test_params_length():
    with pytest.raises(ValueError):
        UnitaryParams((0.0,) * 15)


def test_controlled_phase_encoding():
    np.testing.assert_allclose(UnitaryParams.controlled_phase().unitary(), CZ, atol=1e-15)
    np.testing.assert_allclose(UnitaryParams.identity().unitary(), np.eye(4), atol=1e-15)


def test_objective_goldens():
    lam_c, lam_a = objective(OPTIMUM, UnitaryParams.controlled_phase(), 0.5)
    assert abs(lam_c) < 1e-12 and lam_a == pytest.approx(-1 / 16, abs=1e-14)
    lam_c, lam_a = objective(OPTIMUM, UnitaryParams.identity(), 0.5)
    assert lam_c >= -1e-15 and lam_a >= -1e-15


@given(coeffs, st.floats(0, 1))
def test_fast_evaluator_matches_dense(c, s):
    state = canonicalize(from_spectrum([0.4, 0.3, 0.2, 0.1]))
    x = np.array(c + [s])
    np.testing.assert_allclose(_Evaluator(state)(x), objective(state, UnitaryParams(tuple(c)), s), atol=1e-12)


def test_fast_evaluator_swaps_roles_for_negative_states():
    state = BellDiagonalState(0.5, 0.25, -0.25)
    x = np.array(UnitaryParams.controlled_phase().generator_coeffs + (0.5,))
    kept, ent = _Evaluator(state)(x)
    assert kept == pytest.approx(0.0, abs=1e-12) and ent == pytest.approx(-1 / 16, abs=1e-14)


@given(coeffs, st.floats(0, 1))
def test_random_interactions_and_the_gap(c, s):
    lam_c, lam_a = objective(OPTIMUM, UnitaryParams(tuple(c)), s)
    # the gap bound can fail for general interactions; only a loose envelope is asserted
    assert abs(lam_a - lam_c) <= 2 * gap_bound(OPTIMUM, s)


def test_slack_goldens():
    assert conjecture_slack(OPTIMUM) == 0.0
    state = canonicalize(from_spectrum([0.40, 0.30, 0.16, 0.14]))
    assert conjecture_slack(state) == pytest.approx(0.25 * (1 - 0.875) * 0.08, abs=1e-15)


def test_optimum_is_not_beaten():
    result = optimize(OPTIMUM, restarts=3, budget=600)
    assert result.best_lambda_c_ab >= -1e-9
    assert result.best_lambda_a_bc >= -1 / 16 - 1e-6
    assert not result.violation
    assert result.cz_baseline == pytest.approx(-1 / 16)


def test_optimize_is_deterministic():
    a = optimize(OPTIMUM, restarts=2, budget=200, seed=3)
    b = optimize(OPTIMUM, restarts=2, budget=200, seed=3)
    assert a.to_dict() == b.to_dict()


def test_optimize_negative_state():
    result = optimize(BellDiagonalState(0.5, 0.25, -0.25), restarts=2, budget=300)
    assert result.cz_baseline == pytest.approx(-1 / 16)
    assert result.best_lambda_c_ab >= -1e-9


def test_optimize_rejects_useless_resources():
    with pytest.raises(ValueError, match="s11"):
        optimize(BellDiagonalState(0.5, 0.5, 0.0))
    with pytest.raises(ValueError, match="canonical"):
        optimize(BellDiagonalState(0.25, 0.5, 0.25))


def test_optimization_error_carries_diagnostics():
    err = OptimizationError("none", {"best_infeasible": -0.1})
    assert err.diagnostics["best_infeasible"] == -0.1


def test_result_json():
    d = optimize(OPTIMUM, restarts=1, budget=50).to_dict()
    assert len(d["best_params"]) == 16
    json.dumps(d)


def test_probe_states():
    states = sample_probe_states(5)
    assert len(states) == 5 and all(s.is_separable and s.n_negative == 0 and s.s11 > 0 for s in states)
    assert states == sample_probe_states(5)


def test_dephasing_bound_goldens():
    assert dephasing_upper_bound(OPTIMUM) == pytest.approx(0.061278124459133, abs=1e-12)
    assert run(OPTIMUM).ent_lower_bound <= dephasing_upper_bound(OPTIMUM)
    assert dephasing_upper_bound(BellDiagonalState(0.5, 0.5, 0.0)) == pytest.approx(0.311278124459133, abs=1e-12)
    assert dephasing_upper_bound(BellDiagonalState(0, 0, 0)) == 0.0


def test_dephased_states_are_useless():
    for state in canonical_grid(0.1) + canonical_grid(0.1, negative=True):
        sigma = dephased_state(state)
        assert sigma.s11 == 0 or abs(sigma.s01) + abs(sigma.s10) == 0
        assert canonicalize(sigma).s11 == 0


def test_discord_is_the_distance_to_the_dephased_state():
    for state in canonical_grid(0.1):
        rho = to_density_matrix(state)
        sigma = to_density_matrix(dephased_state(state))
        assert relative_entropy(rho, sigma) == pytest.approx(measures(state).i_class, abs=1e-9)
