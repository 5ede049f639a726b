import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from edss.bell import BellDiagonalState, canonicalize, from_spectrum
from edss.carrier import build_rho_abc, carrier_graph_state, stabilizer_terms
from edss.core import hermitian_spectrum, partial_transpose, pauli_sum
from edss.graph import (
    G3,
    Graph,
    GraphDiagonalState,
    bits,
    eigen_coefficients,
    graph_basis,
    graph_basis_vector,
    positivity_check,
    pt_coefficients,
    pt_min_coefficient,
    stabilizer,
    stabilizer_product,
    to_density_matrix,
    to_index,
)


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph(2, [(0, 2)])
    assert Graph(3, [(1, 0), (0, 1)]).edges == frozenset({(0, 1)})
    assert G3.neighbours(1) == [0, 2]
    assert G3.without(0).edges == frozenset({(0, 1)})
    assert G3.without(1).edges == frozenset()


def test_bits_roundtrip():
    for x in range(8):
        assert to_index(bits(x, 3)) == x
    assert bits(4, 3) == (1, 0, 0)
    with pytest.raises(ValueError):
        bits(8, 3)


def test_stabilizers_of_the_chain():
    assert stabilizer(G3, 0).letters == "XZI"
    assert stabilizer(G3, 1).letters == "ZXZ"
    assert stabilizer(G3, 2).letters == "IZX"


@pytest.mark.parametrize("y", range(8))
def test_graph_basis_vectors_are_stabilizer_eigenvectors(y):
    v = graph_basis_vector(G3, y)
    for i, b in enumerate(bits(y, 3)):
        np.testing.assert_allclose(stabilizer(G3, i).matrix() @ v, (-1) ** b * v, atol=1e-15)


def test_graph_basis_is_unitary():
    u = graph_basis(G3)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(8), atol=1e-14)


simplex = st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3)


@st.composite
def carrier_states(draw):
    """Canonical resource (either sign pattern) and a carrier parameter."""
    v = np.array(draw(simplex))
    state = canonicalize(from_spectrum(np.sort(v / v.sum())[::-1]))
    return state, draw(st.floats(0, 1))


@given(carrier_states())
def test_carrier_is_graph_diagonal(args):
    state, s = args
    g = carrier_graph_state(state, s)
    np.testing.assert_allclose(to_density_matrix(g, ("C", "A", "B")).data, build_rho_abc(state, s).data, atol=1e-14)
    np.testing.assert_allclose(
        pauli_sum(stabilizer_terms(state, s)).data / 8, build_rho_abc(state, s).data, atol=1e-14
    )


@given(carrier_states())
def test_eigen_coefficients_match_dense(args):
    g = carrier_graph_state(*args)
    dense = hermitian_spectrum(to_density_matrix(g)).eigenvalues
    np.testing.assert_allclose(np.sort(eigen_coefficients(g))[::-1] / 8, dense, atol=1e-13)
    ok, _ = positivity_check(g)
    assert ok


@given(carrier_states(), st.integers(1, 6))
def test_pt_coefficients_match_dense(args, z):
    g = carrier_graph_state(*args)
    cut = [lab for lab, b in zip("CAB", bits(z, 3)) if b]
    dense = hermitian_spectrum(partial_transpose(to_density_matrix(g, ("C", "A", "B")), cut)).eigenvalues
    np.testing.assert_allclose(np.sort(pt_coefficients(g, z))[::-1] / 8, dense, atol=1e-13)
    assert pt_min_coefficient(g, z) / 8 == pytest.approx(dense[-1], abs=1e-13)


def test_graph_state_needs_unit_identity_coefficient():
    with pytest.raises(ValueError):
        GraphDiagonalState(G3, np.full(8, 0.5))
    with pytest.raises(ValueError):
        GraphDiagonalState(G3, np.ones(4))


def test_positivity_check_finds_the_worst_vector():
    coeffs = np.zeros(8)
    coeffs[0] = 1
    coeffs[to_index((1, 0, 0))] = 1.5
    ok, y = positivity_check(GraphDiagonalState(G3, coeffs))
    assert not ok and bits(y, 3)[0] == 1


def test_stabilizer_product_phase():
    # K_C K_A = (X Z I)(Z X Z) = (XZ)(ZX)Z, a Hermitian word with a sign
    w = stabilizer_product(G3, (1, 1, 0))
    assert w.is_hermitian
    np.testing.assert_allclose(w.matrix(), stabilizer(G3, 0).matrix() @ stabilizer(G3, 1).matrix())
