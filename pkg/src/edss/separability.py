"""Entanglement certification for the three-qubit carrier states.

Two directions are covered:

* an NPT cut ``R | rest`` is turned into a two-qubit NPT state by a local
  projection on the two qubits opposite ``R`` (:func:`localize`);
* a PPT cut is certified separable by an explicit sum of commuting Pauli
  groups, each of which has a product eigenbasis across the cut
  (:func:`separable_decomposition`, :func:`verify_term_separable`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import carrier
from .bell import BellDiagonalState, is_canonical
from .core import (
    QUBITS,
    DensityMatrix,
    PauliWord,
    hermitian_spectrum,
    partial_transpose,
    pauli_sum,
    permute,
)
from .graph import G3, Graph, bits, graph_basis, graph_basis_vector

PPT_TOL = 1e-12
PSD_TOL = 1e-10
SCHMIDT_TOL = 1e-8
DEGENERACY_TOL = 1e-9
GRAPH_OVERLAP_TOL = 1e-8


class LocalizationError(ValueError):
    pass


class DecompositionError(ValueError):
    pass


def min_pt_eigenvalue(rho: DensityMatrix, subset) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue of the partial transpose over ``subset`` and its eigenvector."""
    spec = hermitian_spectrum(partial_transpose(rho, subset), vectors=True)
    return spec.min, spec.eigenvectors[:, -1]


# ---------------------------------------------------------------------------
# localization


@dataclass(frozen=True)
class LocalizationResult:
    projected_state: DensityMatrix
    success_probability: float
    pt_min_eigenvalue: float
    input_pt_min: float
    cut: str
    method: str
    degeneracy: int
    projector: np.ndarray = field(repr=False)
    graph_index: tuple[int, ...] | None = None


def _graph_projector(rho_pt: np.ndarray, cut_index: int, graph: Graph) -> tuple[np.ndarray, tuple[int, ...], int]:
    spec = hermitian_spectrum(rho_pt, vectors=True)
    lam = spec.min
    d = int(np.sum(spec.eigenvalues <= lam + DEGENERACY_TOL))
    eig_space = spec.eigenvectors[:, -d:]
    basis = graph_basis(graph)
    weights = np.sum(np.abs(eig_space.conj().T @ basis) ** 2, axis=0)
    y = int(np.argmax(weights))
    if weights[y] < 1 - GRAPH_OVERLAP_TOL:
        raise LocalizationError(
            f"negative eigenvector is not a graph-basis vector (best overlap {weights[y]:.6f})"
        )
    yb = bits(y, graph.n_vertices)
    rest = [v for v in range(graph.n_vertices) if v != cut_index]
    sub = graph.without(cut_index)
    phi = graph_basis_vector(sub, [yb[v] for v in rest])
    nbrs = set(graph.neighbours(cut_index))
    z_e = np.array([1.0 + 0j])
    for v in rest:
        z_e = np.kron(z_e, np.diag([1, -1]) if v in nbrs else np.eye(2))
    z_e = np.diag(z_e) if z_e.ndim == 1 else z_e
    proj = np.vstack([phi.conj(), phi.conj() @ z_e])
    return proj, yb, d


def _schmidt_projector(vector: np.ndarray, cut_index: int, n: int) -> np.ndarray:
    rest = [q for q in range(n) if q != cut_index]
    v = vector.reshape([2] * n).transpose([cut_index] + rest).reshape(2, 2 ** (n - 1))
    _, _, vh = np.linalg.svd(v)
    # v = sum_k s_k |u_k>|w_k> with |w_k> = vh[k]; P = sum_k |k><w_k|
    return vh[:2].conj()


def localize(rho_abc: DensityMatrix, cut: str, method: str = "graph", graph: Graph = G3) -> LocalizationResult:
    """Project the two qubits opposite ``cut`` onto a qubit so the NPT cut survives.

    ``method="graph"`` uses the graph-basis projection
    ``|0><psi_x'| + |1><psi_x'| Z_E`` built from the graph-basis vector that
    spans the negative eigenspace; ``"schmidt"`` projects onto the Schmidt
    basis of the negative eigenvector; ``"auto"`` tries the graph route first.
    """
    if method not in ("graph", "schmidt", "auto"):
        raise ValueError(f"unknown localization method {method!r}")
    if rho_abc.labels != QUBITS[: rho_abc.n_qubits] or rho_abc.n_qubits != graph.n_vertices:
        raise ValueError(f"expected a state on {QUBITS}, got labels {rho_abc.labels}")
    r = rho_abc.index(cut)
    rho_pt = partial_transpose(rho_abc, [cut])
    lam, vec = min_pt_eigenvalue(rho_abc, [cut])
    if lam >= -PPT_TOL:
        raise LocalizationError(f"nothing to localize: cut {cut} is PPT (min eigenvalue {lam:.3e})")

    graph_index = None
    degeneracy = int(np.sum(hermitian_spectrum(rho_pt).eigenvalues <= lam + DEGENERACY_TOL))
    used = method
    if method in ("graph", "auto"):
        try:
            proj, graph_index, degeneracy = _graph_projector(rho_pt.data, r, graph)
            used = "graph"
        except LocalizationError:
            if method == "graph":
                raise
            used = "schmidt"
    if used == "schmidt":
        proj = _schmidt_projector(vec, r, rho_abc.n_qubits)

    rest = [lab for lab in rho_abc.labels if lab != cut]
    ordered = permute(rho_abc, [cut] + rest)
    k = np.kron(np.eye(2), proj)
    out = k @ ordered.data @ k.conj().T
    out = (out + out.conj().T) / 2
    p = float(np.trace(out).real)
    suc = DensityMatrix(out / p, (cut, "".join(rest)))
    pt_min = hermitian_spectrum(partial_transpose(suc, [cut])).min
    return LocalizationResult(
        projected_state=suc,
        success_probability=p,
        pt_min_eigenvalue=pt_min,
        input_pt_min=lam,
        cut=cut,
        method=used,
        degeneracy=degeneracy,
        projector=proj,
        graph_index=graph_index,
    )


# ---------------------------------------------------------------------------
# separable decompositions

Term = tuple[str, tuple[tuple[float, PauliWord], ...]]


def _w(**ops: str) -> PauliWord:
    return PauliWord.from_ops(ops, QUBITS)


_ID = PauliWord.identity(3)


@dataclass(frozen=True)
class SeparableDecomposition:
    """``8 rho_ABC`` written as a sum of groups of commuting Pauli words."""

    terms: tuple[Term, ...]
    target: DensityMatrix
    cut: str
    method: str

    def term_matrix(self, k: int) -> DensityMatrix:
        return pauli_sum(self.terms[k][1], self.target.labels)

    def reconstruction(self) -> DensityMatrix:
        total = np.zeros_like(self.target.data)
        for _, words in self.terms:
            total = total + pauli_sum(words, self.target.labels).data
        return DensityMatrix(total, self.target.labels)

    def residual(self) -> float:
        """Largest entry-wise deviation of the term sum from ``8 rho_ABC``."""
        return float(np.max(np.abs(self.reconstruction().data - 8 * self.target.data)))

    def certificates(self) -> list["TermCertificate"]:
        return [verify_term_separable(words, self.cut, self.target.labels) for _, words in self.terms]

    def check(self, tol: float = 1e-12) -> bool:
        return self.residual() <= tol and all(c.ok for c in self.certificates())

    def to_json(self) -> list[list[dict]]:
        return [
            [{"coeff": float(c), "pauli": w.label(self.target.labels)} for c, w in words]
            for _, words in self.terms
        ]


def _closed_form_cut_value(state: BellDiagonalState, s: float, cut: str) -> float:
    s01, s10, s11 = state.coefficients
    if cut == "C":
        return 1 - s10 - s * (1 + s10) - abs(s01 - s11 - s * s01 - s * s11)
    return 1 - s01 - s10 - s11 - s * (1 - s01 + s10 + s11)


def _carrier_cut_lines(state: BellDiagonalState, s: float) -> tuple[Term, ...]:
    s01, s10, s11 = state.coefficients
    c = s01 - s11 - s * s01 - s * s11
    zx = _w(A="Z", B="X")
    return (
        ("identity", ((_closed_form_cut_value(state, s, "C"), _ID),)),
        ("Z_C", ((s11, zx), (s10, _w(C="Z", A="X", B="Z")), (s11, _w(C="Z", A="Y", B="Y")), (s10, _ID))),
        ("X_C", ((s * s01, zx), (s, _w(C="X", A="Z")), (s * s01, _w(C="X", B="X")), (s, _ID))),
        ("Y_C", ((s * s11, zx), (s * s10, _w(C="Y", A="Y", B="Z")), (-s * s11, _w(C="Y", A="X", B="Y")), (s * s10, _ID))),
        ("rest", ((c, zx), (abs(c), _ID))),
    )


def _alice_cut_lines(state: BellDiagonalState, s: float) -> tuple[Term, ...]:
    s01, s10, s11 = state.coefficients
    return (
        ("identity", ((_closed_form_cut_value(state, s, "A"), _ID),)),
        ("Z_A", ((s * s01, _w(B="X", C="X")), (s, _w(A="Z", C="X")), (s01, _w(A="Z", B="X")), (s + s01 - s * s01, _ID))),
        ("X_A", ((s10, _w(A="X", B="Z", C="Z")), (-s * s11, _w(A="X", B="Y", C="Y")), (s10 + s * s11, _ID))),
        ("Y_A", ((s * s10, _w(A="Y", B="Z", C="Y")), (s11, _w(A="Y", B="Y", C="Z")), (s * s10 + s11, _ID))),
    )


def grouped_lines(terms: Sequence[tuple[float, PauliWord]], cut_index: int) -> tuple[Term, ...]:
    """Group a stabilizer expansion by the Pauli letter on the cut qubit.

    Each group of two commuting words ``c1 w1 + c2 w2`` absorbs a share
    ``tau`` of the single word ``F`` that acts trivially on the cut
    (``w1 w2 = sigma F``). Choosing ``tau = sigma sgn(c1 c2) min(|c1|, |c2|)``
    makes the group positive with identity weight ``max(|c1|, |c2|)``, the
    least possible; the unabsorbed part of ``F`` gets its own line.
    """
    groups: dict[str, list[tuple[float, PauliWord]]] = {}
    free: list[tuple[float, PauliWord]] = []
    identity = 0.0
    for c, w in terms:
        if w == PauliWord.identity(w.n_qubits):
            identity += c
            continue
        letter = w.letter(cut_index)
        (free if letter == "I" else groups.setdefault(letter, [])).append((c, w))
    if len(free) != 1:
        raise DecompositionError(f"expected one word trivial on the cut, found {len(free)}")
    f_coeff, f_word = free[0]
    ident = PauliWord.identity(f_word.n_qubits)
    lines: list[Term] = []
    used = 0.0
    shared = 0.0
    for letter in sorted(groups):
        ws = groups[letter]
        if len(ws) == 1:
            (c1, w1), = ws
            lines.append((f"{letter}", ((c1, w1), (abs(c1), ident))))
            used += abs(c1)
            continue
        if len(ws) != 2:
            raise DecompositionError(f"group {letter} has {len(ws)} words; only pairs are supported")
        (c1, w1), (c2, w2) = ws
        prod = w1 * w2
        if (prod.x_mask, prod.z_mask) != (f_word.x_mask, f_word.z_mask):
            raise DecompositionError(f"group {letter} does not close on the free word {f_word.letters}")
        sigma = prod.phase.real
        tau = sigma * np.sign(c1 * c2) * min(abs(c1), abs(c2))
        k = max(abs(c1), abs(c2))
        lines.append((f"{letter}", ((tau, f_word), (c1, w1), (c2, w2), (k, ident))))
        used += k
        shared += tau
    r = f_coeff - shared
    lines.append(("rest", ((r, f_word), (abs(r), ident))))
    used += abs(r)
    return (("identity", ((identity - used, ident),)),) + tuple(lines)


def separable_decomposition(state: BellDiagonalState, s: float, cut: str) -> SeparableDecomposition:
    """Explicit separable decomposition of ``8 rho_ABC`` across ``cut | rest``.

    For non-negative coefficients the two hand-derived expansions are used
    verbatim: five lines for the carrier cut C, four for Alice's cut A. When
    one coefficient is negative the cuts exchange roles and the grouped
    construction of :func:`grouped_lines` is used instead.

    Raises
    ------
    DecompositionError
        If the requested cut is NPT, where no decomposition is claimed.
    """
    if cut not in ("C", "A"):
        raise ValueError(f"cut must be 'C' or 'A', got {cut!r}")
    if not is_canonical(state):
        raise ValueError(f"state {state.coefficients} is not canonical; canonicalize it first")
    target = carrier.build_rho_abc(state, s)
    lam, _ = min_pt_eigenvalue(target, [cut])
    if lam < -PPT_TOL:
        raise DecompositionError(
            f"decomposition not claimed for an NPT cut: {cut} has min PT eigenvalue {lam:.6g}"
        )
    if state.n_negative == 0:
        lines = _carrier_cut_lines(state, s) if cut == "C" else _alice_cut_lines(state, s)
        method = "explicit"
    else:
        lines = grouped_lines(carrier.stabilizer_terms(state, s), QUBITS.index(cut))
        method = "grouped"
    return SeparableDecomposition(terms=lines, target=target, cut=cut, method=method)


# ---------------------------------------------------------------------------
# per-term certificates


@dataclass(frozen=True)
class TermCertificate:
    ok: bool
    reason: str
    eigenvalues: np.ndarray
    product_basis: np.ndarray | None = field(default=None, repr=False)
    witness: dict | None = None


def _words_from_matrix(m: DensityMatrix) -> list[tuple[float, PauliWord]]:
    n = m.n_qubits
    out = []
    for letters in itertools.product("IXYZ", repeat=n):
        w = PauliWord.from_string("".join(letters))
        c = np.trace(w.matrix() @ m.data) / 2**n
        if abs(c) > 1e-14:
            out.append((float(c.real), w))
    return out


def _restrict(word: PauliWord, drop: int) -> PauliWord:
    keep = [q for q in range(word.n_qubits) if q != drop]
    return PauliWord(
        tuple(word.x_mask[q] for q in keep), tuple(word.z_mask[q] for q in keep), word.phase
    )


_SINGLE = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "Y": np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2),
    "Z": np.eye(2, dtype=complex),
}


def verify_term_separable(
    term: Sequence[tuple[float, PauliWord]] | DensityMatrix,
    cut: str,
    labels: Sequence[str] = QUBITS,
) -> TermCertificate:
    """Check one decomposition term and build its product eigenbasis.

    The term must be positive semidefinite, its Pauli words must commute
    pairwise, and it must act on the cut qubit through a single Pauli letter.
    The certificate is an eigenbasis of product vectors across
    ``cut | rest`` that reconstructs the term.
    """
    labels = tuple(labels)
    if isinstance(term, DensityMatrix):
        labels = term.labels
        words = _words_from_matrix(term)
    else:
        words = [(float(c), w) for c, w in term if abs(c) > 0]
    n = len(labels)
    r = labels.index(cut)
    matrix = pauli_sum(words, labels).data if words else np.zeros((2**n, 2**n), dtype=complex)

    for (c1, w1), (c2, w2) in itertools.combinations(words, 2):
        if not w1.commutes(w2):
            return TermCertificate(
                False, "non-commuting words", hermitian_spectrum(matrix).eigenvalues,
                witness={"words": [w1.label(labels), w2.label(labels)]},
            )

    letters = {w.letter(r) for _, w in words} - {"I"}
    if len(letters) > 1:
        return TermCertificate(
            False, "more than one Pauli letter on the cut qubit",
            hermitian_spectrum(matrix).eigenvalues, witness={"letters": sorted(letters)},
        )
    letter = letters.pop() if letters else "Z"
    local = _SINGLE[letter]

    perm = [r] + [q for q in range(n) if q != r]
    blocks, values = [], []
    for k, sign in enumerate((1, -1)):
        rest_op = np.zeros((2 ** (n - 1),) * 2, dtype=complex)
        for c, w in words:
            factor = sign if w.letter(r) != "I" else 1
            rest_op += c * factor * _restrict(w, r).matrix()
        spec = hermitian_spectrum(rest_op, vectors=True)
        # columns |local_k> (x) |v_j>, in (cut, rest...) order
        blocks.append(np.einsum("i,jm->ijm", local[:, k], spec.eigenvectors))
        values.append(spec.eigenvalues)
    ordered = np.concatenate(blocks, axis=2)  # (2, 2^(n-1), 2^n)
    values = np.concatenate(values)
    basis = (
        ordered.reshape([2] * n + [2**n])
        .transpose(list(np.argsort(perm)) + [n])
        .reshape(2**n, 2**n)
    )

    if values.min() < -PSD_TOL:
        j = int(np.argmin(values))
        return TermCertificate(
            False, "not positive semidefinite", np.sort(values)[::-1], basis,
            witness={"eigenvalue": float(values[j]), "vector": basis[:, j].tolist()},
        )
    # Schmidt coefficients recomputed from the reassembled vectors, across the cut
    across = (
        basis.reshape([2] * n + [2**n]).transpose(perm + [n]).reshape(2, 2 ** (n - 1), 2**n)
    )
    schmidt = np.linalg.svd(across.transpose(2, 0, 1), compute_uv=False)
    j = int(np.argmax(schmidt[:, 1]))
    if schmidt[j, 1] >= SCHMIDT_TOL:
        return TermCertificate(
            False, "eigenvector entangled across the cut", np.sort(values)[::-1], basis,
            witness={"schmidt": schmidt[j].tolist()},
        )
    recon = (basis * values) @ basis.conj().T
    err = float(np.max(np.abs(recon - matrix)))
    if err > PSD_TOL:
        return TermCertificate(
            False, "product basis does not reconstruct the term", np.sort(values)[::-1], basis,
            witness={"error": err},
        )
    return TermCertificate(True, "ok", np.sort(values)[::-1], basis)
