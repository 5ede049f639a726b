"""Dense linear algebra and Pauli-word primitives for systems of up to three qubits.

Every dense matrix carries an ordered tuple of qubit labels. The global order
used throughout the package is ``("C", "A", "B")``: the carrier qubit first,
then Alice's and Bob's halves of the resource state. Kronecker products put
the first label in the most significant position.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

QUBITS: tuple[str, ...] = ("C", "A", "B")

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# (x, z) bit pair -> single-qubit factor, with Y = iXZ
_FACTORS = {(0, 0): _I2, (1, 0): _X, (0, 1): _Z, (1, 1): _Y}
_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {v: k for k, v in _LETTERS.items()}

_PHASES = (1, 1j, -1, -1j)


def _phase_power(phase: complex) -> int:
    for k, p in enumerate(_PHASES):
        if abs(complex(phase) - p) < 1e-12:
            return k
    raise ValueError(f"phase must be one of +1, -1, +i, -i; got {phase!r}")


@dataclass(frozen=True)
class DensityMatrix:
    """A dense operator on a register of labelled qubits.

    The container is used both for normalized states and for the unnormalized
    positive terms of a separable decomposition, so it does not enforce unit
    trace. Use :meth:`is_state` to check the state invariants.
    """

    data: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        arr = np.array(self.data, dtype=complex, copy=True)
        labels = tuple(self.labels)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] != 2 ** len(labels):
            raise ValueError(
                f"matrix of dimension {arr.shape[0]} does not match {len(labels)} qubit labels"
            )
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels in {labels}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T), initial=0.0) <= tol)

    def is_state(self, tol: float = HERMITIAN_TOL) -> bool:
        """Hermitian, unit trace and positive semidefinite within tolerance."""
        if not self.is_hermitian(tol):
            return False
        if abs(np.trace(self.data) - 1) > TRACE_TOL:
            return False
        return bool(np.linalg.eigvalsh(self.data)[0] >= -tol)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown qubit label {label!r}; have {self.labels}") from None

    def scaled(self, factor: float) -> "DensityMatrix":
        return DensityMatrix(self.data * factor, self.labels)

    def __add__(self, other: "DensityMatrix") -> "DensityMatrix":
        if other.labels != self.labels:
            raise ValueError(f"label mismatch: {self.labels} vs {other.labels}")
        return DensityMatrix(self.data + other.data, self.labels)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted in descending order, with eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None

    @property
    def min(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def max(self) -> float:
        return float(self.eigenvalues[0])


@dataclass(frozen=True)
class PauliWord:
    """A phased tensor product of single-qubit Paulis in symplectic form.

    ``x_mask[q]`` and ``z_mask[q]`` are the X and Z bits on qubit ``q``; both bits
    set means ``Y = iXZ``. The matrix is ``phase * kron(P_0, P_1, ...)``.
    """

    x_mask: tuple[int, ...]
    z_mask: tuple[int, ...]
    phase: complex = 1

    def __post_init__(self):
        x = tuple(int(b) & 1 for b in self.x_mask)
        z = tuple(int(b) & 1 for b in self.z_mask)
        if len(x) != len(z) or not x:
            raise ValueError("x_mask and z_mask must be non-empty and of equal length")
        object.__setattr__(self, "x_mask", x)
        object.__setattr__(self, "z_mask", z)
        object.__setattr__(self, "phase", _PHASES[_phase_power(self.phase)])

    @classmethod
    def from_string(cls, letters: str, phase: complex = 1) -> "PauliWord":
        """``"IZX"`` -> I on qubit 0, Z on qubit 1, X on qubit 2."""
        bits = [_BITS[ch] for ch in letters.upper()]
        return cls(tuple(b[0] for b in bits), tuple(b[1] for b in bits), phase)

    @classmethod
    def from_ops(
        cls,
        ops: Mapping[str, str],
        labels: Sequence[str] = QUBITS,
        phase: complex = 1,
    ) -> "PauliWord":
        """Build a word from a ``{label: letter}`` mapping, e.g. ``{"A": "Z", "B": "X"}``."""
        letters = ["I"] * len(labels)
        for label, letter in ops.items():
            if label not in labels:
                raise ValueError(f"unknown qubit label {label!r}; have {tuple(labels)}")
            letters[list(labels).index(label)] = letter
        return cls.from_string("".join(letters), phase)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliWord":
        return cls((0,) * n_qubits, (0,) * n_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self.x_mask)

    @property
    def letters(self) -> str:
        return "".join(_LETTERS[b] for b in zip(self.x_mask, self.z_mask))

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (1, -1)

    def letter(self, qubit: int) -> str:
        return _LETTERS[(self.x_mask[qubit], self.z_mask[qubit])]

    def label(self, labels: Sequence[str] = QUBITS) -> str:
        """Dotted label such as ``"ZC.XA.ZB"``; identity factors are dropped."""
        parts = [f"{ch}{lab}" for ch, lab in zip(self.letters, labels) if ch != "I"]
        body = ".".join(parts) if parts else "I"
        prefix = {1: "", -1: "-", 1j: "i", -1j: "-i"}[self.phase]
        return prefix + body

    def symplectic_product(self, other: "PauliWord") -> int:
        self._check_size(other)
        total = sum(
            a * d + b * c
            for a, b, c, d in zip(self.x_mask, self.z_mask, other.x_mask, other.z_mask)
        )
        return total % 2

    def commutes(self, other: "PauliWord") -> bool:
        return self.symplectic_product(other) == 0

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        self._check_size(other)
        power = _phase_power(self.phase) + _phase_power(other.phase)
        xs, zs = [], []
        for a, b, c, d in zip(self.x_mask, self.z_mask, other.x_mask, other.z_mask):
            x, z = a ^ c, b ^ d
            # i^{ab} X^a Z^b * i^{cd} X^c Z^d = i^{ab+cd+2bc} X^{a+c} Z^{b+d}
            power += a * b + c * d + 2 * b * c - x * z
            xs.append(x)
            zs.append(z)
        return PauliWord(tuple(xs), tuple(zs), _PHASES[power % 4])

    def __neg__(self) -> "PauliWord":
        return PauliWord(self.x_mask, self.z_mask, -self.phase)

    def matrix(self) -> np.ndarray:
        return self.phase * _unsigned_matrix(self.x_mask, self.z_mask)

    def _check_size(self, other: "PauliWord") -> None:
        if other.n_qubits != self.n_qubits:
            raise ValueError(f"size mismatch: {self.n_qubits} vs {other.n_qubits} qubits")


@functools.lru_cache(maxsize=4096)
def _unsigned_matrix(x_mask: tuple[int, ...], z_mask: tuple[int, ...]) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for bits in zip(x_mask, z_mask):
        out = np.kron(out, _FACTORS[bits])
    out.setflags(write=False)
    return out


def default_labels(n_qubits: int) -> tuple[str, ...]:
    if n_qubits == 3:
        return QUBITS
    if n_qubits == 2:
        return ("A", "B")
    return tuple(f"q{i}" for i in range(n_qubits))


def pauli_matrix(word: PauliWord, labels: Sequence[str] | None = None) -> DensityMatrix:
    """Dense realization of a Pauli word on the given labels."""
    labels = default_labels(word.n_qubits) if labels is None else tuple(labels)
    if len(labels) != word.n_qubits:
        raise ValueError(f"{word.n_qubits}-qubit word needs {word.n_qubits} labels, got {labels}")
    return DensityMatrix(word.matrix(), labels)


def pauli_sum(terms: Iterable[tuple[float, PauliWord]], labels: Sequence[str] = QUBITS) -> DensityMatrix:
    """``sum_k c_k P_k`` as a dense matrix."""
    labels = tuple(labels)
    out = np.zeros((2 ** len(labels),) * 2, dtype=complex)
    for coeff, word in terms:
        out += coeff * word.matrix()
    return DensityMatrix(out, labels)


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.kron(a.data, b.data), a.labels + b.labels)


def permute(rho: DensityMatrix, labels: Sequence[str]) -> DensityMatrix:
    """Reorder the qubits of ``rho`` so that they appear in the order ``labels``."""
    labels = tuple(labels)
    if sorted(labels) != sorted(rho.labels):
        raise ValueError(f"{labels} is not a reordering of {rho.labels}")
    n = rho.n_qubits
    order = [rho.index(lab) for lab in labels]
    t = rho.data.reshape([2] * (2 * n)).transpose(order + [n + q for q in order])
    return DensityMatrix(t.reshape(rho.dim, rho.dim), labels)


def _resolve(rho: DensityMatrix, subset: Iterable[str]) -> list[int]:
    if isinstance(subset, str):
        subset = [subset]
    return sorted({rho.index(label) for label in subset})


def partial_transpose(rho: DensityMatrix, subset: Iterable[str]) -> DensityMatrix:
    """Transpose the row and column indices of the qubits in ``subset`` only."""
    qubits = _resolve(rho, subset)
    n = rho.n_qubits
    axes = list(range(2 * n))
    for q in qubits:
        axes[q], axes[n + q] = axes[n + q], axes[q]
    t = rho.data.reshape([2] * (2 * n)).transpose(axes)
    return DensityMatrix(t.reshape(rho.dim, rho.dim), rho.labels)


def partial_trace(rho: DensityMatrix, subset: Iterable[str]) -> DensityMatrix:
    """Trace out the qubits in ``subset``; the remaining labels keep their order."""
    traced = _resolve(rho, subset)
    keep = [q for q in range(rho.n_qubits) if q not in traced]
    n = rho.n_qubits
    t = rho.data.reshape([2] * (2 * n))
    # trace highest index first so that remaining axis numbers stay valid
    for q in sorted(traced, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=m + q)
    d = 2 ** len(keep)
    return DensityMatrix(t.reshape(d, d), tuple(rho.labels[q] for q in keep))


def hermitian_spectrum(
    rho: DensityMatrix | np.ndarray, vectors: bool = False, tol: float = HERMITIAN_TOL
) -> Spectrum:
    """Real spectrum of a Hermitian matrix, sorted descending.

    Raises
    ------
    ValueError
        If the input deviates from Hermiticity by more than ``tol`` entry-wise.
    """
    m = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dev = np.max(np.abs(m - m.conj().T), initial=0.0)
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max |M - M^dag| = {dev:.3e})")
    h = (m + m.conj().T) / 2
    if vectors:
        w, v = np.linalg.eigh(h)
        return Spectrum(w[::-1].copy(), v[:, ::-1].copy())
    return Spectrum(np.linalg.eigvalsh(h)[::-1].copy())


def _xlog2x(p: np.ndarray) -> float:
    p = np.clip(np.real(p), 0.0, None)
    nz = p[p > 0]
    return float(np.sum(nz * np.log2(nz)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return -_xlog2x(hermitian_spectrum(rho).eigenvalues)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix, support_tol: float = 1e-12) -> float:
    """``S(rho || sigma) = Tr(rho log2 rho - rho log2 sigma)`` in bits.

    Returns ``math.inf`` when the support of ``rho`` is not contained in the
    support of ``sigma``.
    """
    if rho.labels != sigma.labels:
        raise ValueError(f"label mismatch: {rho.labels} vs {sigma.labels}")
    spec_sigma = hermitian_spectrum(sigma, vectors=True)
    mu = spec_sigma.eigenvalues
    v = spec_sigma.eigenvectors
    weights = np.real(np.einsum("ij,jk,ki->i", v.conj().T, rho.data, v))
    cross = 0.0
    for w, m in zip(weights, mu):
        if m <= support_tol:
            if w > support_tol:
                return math.inf
            continue
        cross += w * math.log2(m)
    value = _xlog2x(hermitian_spectrum(rho).eigenvalues) - cross
    # rounding can push an exact zero slightly negative
    return max(value, 0.0) if value > -1e-12 else value


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_state(labels: Sequence[str], rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random density matrix from a Ginibre ensemble (full rank by default)."""
    labels = tuple(labels)
    d = 2 ** len(labels)
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, labels)


def pure_state(vector: np.ndarray, labels: Sequence[str]) -> DensityMatrix:
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()), tuple(labels))


def schmidt_coefficients(vector: np.ndarray, n_first: int, n_total: int) -> np.ndarray:
    """Schmidt coefficients of a pure vector across (first ``n_first`` qubits | rest)."""
    v = np.asarray(vector, dtype=complex).reshape(2**n_first, 2 ** (n_total - n_first))
    return np.linalg.svd(v, compute_uv=False)
