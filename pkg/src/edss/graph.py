"""Graph states and graph-diagonal mixed states.

Bitstrings over the vertices are encoded as integers with vertex 0 in the most
significant bit, so the integer index of a bitstring matches the row index of
the corresponding computational basis state under the package's Kronecker
convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DensityMatrix, PauliWord, default_labels

POSITIVITY_TOL = 1e-12


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n_vertices: int, edges=()):
        norm = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (0 <= i < n_vertices and 0 <= j < n_vertices):
                raise ValueError(f"edge ({i}, {j}) out of range for {n_vertices} vertices")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "n_vertices", int(n_vertices))
        object.__setattr__(self, "edges", frozenset(norm))

    def neighbours(self, i: int) -> list[int]:
        return sorted({j for e in self.edges if i in e for j in e if j != i})

    def without(self, vertex: int) -> "Graph":
        """Induced subgraph on the remaining vertices, relabelled in order."""
        keep = [v for v in range(self.n_vertices) if v != vertex]
        pos = {v: k for k, v in enumerate(keep)}
        return Graph(
            len(keep),
            [(pos[i], pos[j]) for i, j in self.edges if vertex not in (i, j)],
        )


# linear chain C - A - B in the global qubit order
G3 = Graph(3, [(0, 1), (1, 2)])


def bits(x: int | Sequence[int], n: int) -> tuple[int, ...]:
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < 2**n:
            raise ValueError(f"bitstring index {x} out of range for {n} bits")
        return tuple((int(x) >> (n - 1 - i)) & 1 for i in range(n))
    out = tuple(int(b) for b in x)
    if len(out) != n or any(b not in (0, 1) for b in out):
        raise ValueError(f"expected {n} bits, got {x!r}")
    return out


def to_index(x: Sequence[int]) -> int:
    out = 0
    for b in x:
        out = (out << 1) | int(b)
    return out


def _parity_matrix(n: int) -> np.ndarray:
    """``(-1)^{x.y}`` for all pairs of n-bit strings."""
    idx = np.arange(2**n)
    dots = np.array([[bin(x & y).count("1") & 1 for y in idx] for x in idx])
    return 1 - 2 * dots


def stabilizer(graph: Graph, i: int) -> PauliWord:
    """``K_i = X_i prod_{j ~ i} Z_j``."""
    if not 0 <= i < graph.n_vertices:
        raise ValueError(f"vertex {i} out of range for {graph.n_vertices} vertices")
    x = [0] * graph.n_vertices
    z = [0] * graph.n_vertices
    x[i] = 1
    for j in graph.neighbours(i):
        z[j] = 1
    return PauliWord(tuple(x), tuple(z))


def stabilizer_product(graph: Graph, x: int | Sequence[int]) -> PauliWord:
    """``K_x``: product of the ``K_i`` with ``x_i = 1`` (they commute, so order is irrelevant)."""
    word = PauliWord.identity(graph.n_vertices)
    for i, b in enumerate(bits(x, graph.n_vertices)):
        if b:
            word = word * stabilizer(graph, i)
    return word


def graph_basis_vector(graph: Graph, x: int | Sequence[int]) -> np.ndarray:
    """``Z_x |psi^G>``, where ``|psi^G>`` is ``|+>^N`` followed by CZ on every edge."""
    n = graph.n_vertices
    xb = bits(x, n)
    v = np.empty(2**n, dtype=complex)
    for idx in range(2**n):
        c = bits(idx, n)
        sign = sum(c[i] * c[j] for i, j in graph.edges) + sum(ci * xi for ci, xi in zip(c, xb))
        v[idx] = -1 if sign & 1 else 1
    return v / np.sqrt(2**n)


def graph_basis(graph: Graph) -> np.ndarray:
    """Unitary whose column ``y`` is ``|psi_y^G>``."""
    return np.column_stack([graph_basis_vector(graph, y) for y in range(2**graph.n_vertices)])


@dataclass(frozen=True)
class GraphDiagonalState:
    """``rho = 2^-N sum_x s_x K_x`` with ``s_0 = 1``; ``coeffs[x]`` holds ``s_x``."""

    graph: Graph
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True)
        if c.shape != (2**self.graph.n_vertices,):
            raise ValueError(f"need {2 ** self.graph.n_vertices} coefficients, got shape {c.shape}")
        if abs(c[0] - 1) > 1e-12:
            raise ValueError(f"s_0 must equal 1, got {c[0]}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    def to_json(self) -> list[float]:
        return [float(v) for v in self.coeffs]


def eigen_coefficients(state: GraphDiagonalState) -> np.ndarray:
    """``sum_x s_x (-1)^{x.y}`` for every ``y``: ``2^N`` times the eigenvalue on ``|psi_y>``."""
    return _parity_matrix(state.n_vertices) @ state.coeffs


def positivity_check(state: GraphDiagonalState, tol: float = POSITIVITY_TOL) -> tuple[bool, int]:
    """Whether every eigen-coefficient is non-negative, and the index ``y`` of the worst one."""
    e = eigen_coefficients(state)
    y = int(np.argmin(e))
    return bool(e[y] >= -tol), y


def pt_sign_flips(graph: Graph, z: int | Sequence[int]) -> np.ndarray:
    """``(-1)^{sum_{(i,j) in E} x_i x_j (z_i xor z_j)}`` for every ``x``."""
    n = graph.n_vertices
    zb = bits(z, n)
    out = np.empty(2**n)
    for x in range(2**n):
        xb = bits(x, n)
        e = sum(xb[i] * xb[j] * (zb[i] ^ zb[j]) for i, j in graph.edges)
        out[x] = -1 if e & 1 else 1
    return out


def pt_coefficients(state: GraphDiagonalState, z: int | Sequence[int]) -> np.ndarray:
    """Eigen-coefficients of the partial transpose across bipartition ``z``.

    The partial transpose keeps the graph basis and only flips coefficient
    signs, so entry ``y`` is ``2^N`` times the eigenvalue on ``|psi_y>``.
    """
    flipped = state.coeffs * pt_sign_flips(state.graph, z)
    return _parity_matrix(state.n_vertices) @ flipped


def pt_min_coefficient(state: GraphDiagonalState, z: int | Sequence[int]) -> float:
    """``2^N`` times the smallest partial-transpose eigenvalue across bipartition ``z``."""
    return float(np.min(pt_coefficients(state, z)))


def to_density_matrix(state: GraphDiagonalState, labels: Sequence[str] | None = None) -> DensityMatrix:
    n = state.n_vertices
    labels = default_labels(n) if labels is None else tuple(labels)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for x, s in enumerate(state.coeffs):
        if s != 0:
            out += s * stabilizer_product(state.graph, x).matrix()
    return DensityMatrix(out / 2**n, labels)
