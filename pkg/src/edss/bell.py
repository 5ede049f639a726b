"""Bell-diagonal two-qubit resource states.

A state is described by three correlation coefficients ``(s01, s10, s11)`` and
realized in the graph basis of the two-vertex chain A-B::

    rho_AB = (1/4) (1 + s10 X_A Z_B + s01 Z_A X_B + s11 Y_A Y_B)

A Hadamard on B turns this into the literal Bell-diagonal form. The four
eigenvalues are ``(1 + a*s01 + b*s10 + a*b*s11)/4`` for signs ``a, b = +-1``;
for non-negative coefficients ordered by magnitude the all-plus combination is
the largest eigenvalue and ``(-,-)`` the smallest.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import DensityMatrix, PauliWord, pauli_sum

POSITIVITY_TOL = 1e-12
SEPARABLE_TOL = 1e-12
ENTROPY_CLAMP = 1e-14

# sign patterns (a, b) in the order lambda_{++}, lambda_{+-}, lambda_{-+}, lambda_{--}
SIGN_PATTERNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

SLOTS = ("s01", "s10", "s11")

XZ = PauliWord.from_string("XZ")
ZX = PauliWord.from_string("ZX")
YY = PauliWord.from_string("YY")


def binary_entropy(x: float) -> float:
    """``H(x) = -x log2 x - (1-x) log2 (1-x)``, with ``H(0) = H(1) = 0``."""
    x = min(max(float(x), 0.0), 1.0)
    if x <= ENTROPY_CLAMP or x >= 1 - ENTROPY_CLAMP:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _xlog2x(x: float) -> float:
    x = min(max(float(x), 0.0), 1.0)
    return 0.0 if x <= ENTROPY_CLAMP else x * math.log2(x)


def eigen_table(s01: float, s10: float, s11: float) -> dict[tuple[int, int], float]:
    """Closed-form eigenvalue for each sign pattern ``(a, b)``."""
    return {(a, b): (1 + a * s01 + b * s10 + a * b * s11) / 4 for a, b in SIGN_PATTERNS}


@dataclass(frozen=True)
class BellDiagonalState:
    s01: float
    s10: float
    s11: float

    def __post_init__(self):
        for name in SLOTS:
            value = float(getattr(self, name))
            if not -1 - POSITIVITY_TOL <= value <= 1 + POSITIVITY_TOL:
                raise ValueError(f"{name} = {value} outside [-1, 1]")
            object.__setattr__(self, name, value)
        for (a, b), lam in eigen_table(self.s01, self.s10, self.s11).items():
            if lam < -POSITIVITY_TOL:
                raise ValueError(
                    f"not positive: eigenvalue for signs (a, b) = ({a:+d}, {b:+d}) is {lam:.3e}"
                )

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return (self.s01, self.s10, self.s11)

    @property
    def magnitudes(self) -> "BellDiagonalState":
        return BellDiagonalState(abs(self.s01), abs(self.s10), abs(self.s11))

    @property
    def lambdas(self) -> np.ndarray:
        return spectrum_closed_form(self)

    @property
    def is_separable(self) -> bool:
        return self.lambdas[0] <= 0.5 + SEPARABLE_TOL

    @property
    def n_negative(self) -> int:
        return sum(c < 0 for c in self.coefficients)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BellDiagonalState":
        return cls(d["s01"], d["s10"], d["s11"])


@dataclass(frozen=True)
class MeasureReport:
    i_locc: float
    i_class: float
    i_edss_naive: float
    lambda_sorted: tuple[float, float, float, float]

    def to_dict(self) -> dict:
        return {
            "i_locc": self.i_locc,
            "i_class": self.i_class,
            "i_edss_naive": self.i_edss_naive,
            "lambda": list(self.lambda_sorted),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureReport":
        return cls(d["i_locc"], d["i_class"], d["i_edss_naive"], tuple(d["lambda"]))


def spectrum_closed_form(state: BellDiagonalState) -> np.ndarray:
    """The four eigenvalues sorted descending.

    Raises
    ------
    ValueError
        Naming the sign pattern ``(a, b)`` whose eigenvalue is negative.
    """
    table = eigen_table(*state.coefficients)
    for (a, b), lam in table.items():
        if lam < -POSITIVITY_TOL:
            raise ValueError(f"not positive: eigenvalue for signs (a, b) = ({a:+d}, {b:+d}) is {lam:.3e}")
    return np.sort(np.fromiter(table.values(), dtype=float))[::-1]


def from_spectrum(lambdas) -> BellDiagonalState:
    """Inverse map from eigenvalues assigned to the patterns ``(++, +-, -+, --)``.

    Passing a descending spectrum yields the state whose largest eigenvalue sits
    on ``(++)``; its ``s11`` is negative exactly when ``l1 + l4 < 1/2``.
    """
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (4,):
        raise ValueError(f"expected four eigenvalues, got shape {lam.shape}")
    if np.any(lam < -POSITIVITY_TOL) or abs(lam.sum() - 1) > POSITIVITY_TOL:
        raise ValueError(f"not a point of the probability simplex: {lam.tolist()}")
    l1, l2, l3, l4 = lam
    return BellDiagonalState(l1 + l2 - l3 - l4, l1 - l2 + l3 - l4, l1 - l2 - l3 + l4)


def canonicalize(state: BellDiagonalState, negative: str = "s11") -> BellDiagonalState:
    """Local-equivalent form with ``|s01| >= |s10| >= |s11|``.

    Only coefficient permutations and simultaneous sign flips of two
    coefficients are used, so the spectrum is unchanged. If the coefficient
    product is non-negative the result has no negative entries; otherwise
    exactly one entry is negative, placed in the slot named by ``negative``.
    """
    if negative not in SLOTS:
        raise ValueError(f"negative must be one of {SLOTS}, got {negative!r}")
    mags = sorted((abs(c) for c in state.coefficients), reverse=True)
    product = state.s01 * state.s10 * state.s11
    if product >= 0:
        return BellDiagonalState(*mags)
    idx = SLOTS.index(negative)
    mags[idx] = -mags[idx]
    return BellDiagonalState(*mags)


def is_canonical(state: BellDiagonalState, tol: float = 1e-12) -> bool:
    m = [abs(c) for c in state.coefficients]
    if not (m[0] >= m[1] - tol and m[1] >= m[2] - tol):
        return False
    return state.n_negative <= 1


def local_equivalents(state: BellDiagonalState) -> list[BellDiagonalState]:
    """All 24 images under coefficient permutations and paired sign flips."""
    flips = [(1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1)]
    out = []
    for perm in itertools.permutations(state.coefficients):
        for f in flips:
            out.append(BellDiagonalState(*(c * s for c, s in zip(perm, f))))
    return out


def measures(state: BellDiagonalState) -> MeasureReport:
    lam = spectrum_closed_form(state)
    l1, l2, l3, l4 = (float(v) for v in lam)
    i_locc = 1 - binary_entropy(max(0.5, l1))
    i_class = 1 + sum(_xlog2x(v) for v in lam) + binary_entropy(l1 + l2)
    i_edss = 1 - binary_entropy(l1 + l4)
    return MeasureReport(
        i_locc=max(i_locc, 0.0),
        i_class=max(i_class, 0.0),
        i_edss_naive=i_edss,
        lambda_sorted=(l1, l2, l3, l4),
    )


def pauli_terms(state: BellDiagonalState) -> list[tuple[float, PauliWord]]:
    """``4 rho_AB`` as a list of (coefficient, word) pairs on labels (A, B)."""
    return [
        (1.0, PauliWord.identity(2)),
        (state.s10, XZ),
        (state.s01, ZX),
        (state.s11, YY),
    ]


def to_density_matrix(state: BellDiagonalState) -> DensityMatrix:
    return pauli_sum(pauli_terms(state), labels=("A", "B")).scaled(0.25)
