"""Construction of the three-qubit state after Alice's interaction.

``rho_ABC = U (rho_C (x) rho_AB) U^dag`` in the global order (C, A, B), where
``rho_C = (1 + s X)/2`` and ``U`` acts on (C, A). With the default
controlled-phase interaction the result is diagonal in the graph basis of the
chain C - A - B, with coefficients ``s_x = s^{x_C} t_{x_A x_B}`` where
``t_01 = s01``, ``t_10 = s10`` and ``t_11 = s11``.
"""

from __future__ import annotations

import numpy as np

from . import bell
from .bell import BellDiagonalState
from .core import QUBITS, DensityMatrix, PauliWord, tensor_product
from .graph import G3, GraphDiagonalState, stabilizer_product, to_index

CZ = np.diag([1, 1, 1, -1]).astype(complex)


def ancilla_state(s: float) -> DensityMatrix:
    _check_s(s)
    return DensityMatrix(np.array([[1, s], [s, 1]], dtype=complex) / 2, ("C",))


def _check_s(s: float) -> None:
    if not 0 <= s <= 1:
        raise ValueError(f"carrier parameter s = {s} outside [0, 1]")


def build_rho_abc(state: BellDiagonalState, s: float, unitary: np.ndarray | None = None) -> DensityMatrix:
    """Dense ``U (rho_C (x) rho_AB) U^dag`` on labels (C, A, B).

    ``unitary`` is a 4x4 matrix on qubits (C, A); defaults to controlled-phase.
    """
    u = CZ if unitary is None else np.asarray(unitary, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"interaction must be 4x4 on (C, A), got shape {u.shape}")
    rho = tensor_product(ancilla_state(s), bell.to_density_matrix(state))
    w = np.kron(u, np.eye(2))
    return DensityMatrix(w @ rho.data @ w.conj().T, QUBITS)


def carrier_graph_state(state: BellDiagonalState, s: float) -> GraphDiagonalState:
    """The controlled-phase output as a graph-diagonal state on the C - A - B chain."""
    _check_s(s)
    t = {(0, 0): 1.0, (0, 1): state.s01, (1, 0): state.s10, (1, 1): state.s11}
    coeffs = np.zeros(8)
    for xc in (0, 1):
        for (xa, xb), v in t.items():
            coeffs[to_index((xc, xa, xb))] = (s if xc else 1.0) * v
    return GraphDiagonalState(G3, coeffs)


def stabilizer_terms(state: BellDiagonalState, s: float) -> list[tuple[float, PauliWord]]:
    """``8 rho_ABC`` as (coefficient, word) pairs with every word carrying phase +1."""
    g = carrier_graph_state(state, s)
    out = []
    for x, c in enumerate(g.coeffs):
        word = stabilizer_product(G3, x)
        sign = word.phase.real
        out.append((float(c * sign), PauliWord(word.x_mask, word.z_mask)))
    return out
