import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from edss.bell import (
    BellDiagonalState,
    MeasureReport,
    binary_entropy,
    canonicalize,
    from_spectrum,
    is_canonical,
    local_equivalents,
    measures,
    spectrum_closed_form,
    to_density_matrix,
)
from edss.core import hermitian_spectrum

simplex = st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3).map(
    lambda v: np.array(v) / sum(v)
)


@st.composite
def states(draw):
    lam = draw(simplex)
    order = draw(st.permutations(range(4)))
    return from_spectrum(lam[list(order)])


@given(states())
def test_closed_form_spectrum_matches_dense(state):
    dense = hermitian_spectrum(to_density_matrix(state)).eigenvalues
    np.testing.assert_allclose(spectrum_closed_form(state), dense, atol=1e-12)


@given(simplex)
def test_from_spectrum_roundtrip(lam):
    state = from_spectrum(lam)
    np.testing.assert_allclose(state.lambdas, np.sort(lam)[::-1], atol=1e-12)


@given(states(), st.sampled_from(["s01", "s10", "s11"]))
def test_canonicalize_preserves_spectrum(state, slot):
    c = canonicalize(state, negative=slot)
    assert is_canonical(c)
    np.testing.assert_allclose(c.lambdas, state.lambdas, atol=1e-12)
    if state.s01 * state.s10 * state.s11 < 0:
        assert getattr(c, slot) < 0 and c.n_negative == 1
    else:
        assert c.n_negative == 0


def test_canonical_sign_rule_follows_the_pair_sum():
    # one negative coefficient exactly when lambda_1 + lambda_4 < 1/2
    assert from_spectrum([0.4, 0.3, 0.25, 0.05]).s11 < 0
    assert from_spectrum([0.4, 0.3, 0.2, 0.1]).s11 == pytest.approx(0.0)
    assert from_spectrum([0.4, 0.3, 0.15, 0.15]).s11 > 0


def test_local_equivalents_share_the_spectrum():
    state = BellDiagonalState(0.5, 0.25, -0.25)
    images = local_equivalents(state)
    assert len(images) == 24
    for img in images:
        np.testing.assert_allclose(img.lambdas, state.lambdas, atol=1e-15)


def test_invalid_states_name_the_pattern():
    with pytest.raises(ValueError, match=r"\(a, b\) = \(-1, -1\)"):
        BellDiagonalState(0.9, 0.9, -0.9)
    with pytest.raises(ValueError, match="outside"):
        BellDiagonalState(1.5, 0, 0)
    with pytest.raises(ValueError):
        from_spectrum([0.5, 0.5, 0.5, -0.5])


def test_separability_is_lambda_one_at_most_half():
    assert BellDiagonalState(0.5, 0.25, 0.25).is_separable
    assert not BellDiagonalState(1, 1, 1).is_separable


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0
    assert binary_entropy(0.6) == pytest.approx(0.970950594454668, abs=1e-14)


def test_measures_golden_values():
    # direct evaluation of 1 + sum l log l + H(l1 + l2)
    m = measures(BellDiagonalState(0.5, 0.25, 0.25))
    np.testing.assert_allclose(m.lambda_sorted, [0.5, 0.25, 0.125, 0.125])
    assert m.i_class == pytest.approx(0.061278124459133, abs=1e-12)
    assert m.i_locc == 0.0
    assert m.i_edss_naive == pytest.approx(1 - binary_entropy(0.625), abs=1e-15)
    assert measures(BellDiagonalState(0.5, 0.5, 0.0)).i_class == pytest.approx(0.311278124459133, abs=1e-12)


def test_zero_discord_states():
    for a in (0.0, 0.3, 1.0):
        assert measures(BellDiagonalState(a, 0, 0)).i_class == pytest.approx(0.0, abs=1e-14)


def test_maximally_entangled_measures():
    m = measures(BellDiagonalState(1, 1, 1))
    assert m.i_locc == 1.0 and m.i_class == pytest.approx(1.0)


def test_serialization_roundtrip():
    state = BellDiagonalState(0.5, 0.25, -0.25)
    assert BellDiagonalState.from_dict(state.to_dict()) == state
    m = measures(state)
    d = m.to_dict()
    assert set(d) == {"i_locc", "i_class", "i_edss_naive", "lambda"}
    assert MeasureReport.from_dict(d) == m


def test_density_matrix_is_state():
    rho = to_density_matrix(BellDiagonalState(0.5, 0.25, 0.25))
    assert rho.labels == ("A", "B") and rho.is_state()
    assert math.isclose(rho.trace(), 1.0)
