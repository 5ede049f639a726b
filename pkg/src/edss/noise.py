"""Pauli noise on the transmitted qubit and the resulting tolerance thresholds.

A threshold is the largest noise strength ``q`` at which the relevant cut is
still NPT. It is located by bisection between 0 and the strength at which the
channel fully randomizes; every probe is recorded so the monotonicity of the
predicate can be checked afterwards.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .bell import BellDiagonalState
from .core import DensityMatrix, PauliWord, hermitian_spectrum, partial_transpose
from .protocol import Branch, build_rho_abc, run
from .separability import LocalizationError, localize

BISECTION_STEPS = 30
NPT_TOL = 1e-12
TRACE_TOL = 1e-12

CSV_HEADER = ("s01", "s10", "s11", "kind", "q_star_edss", "q_star_direct", "q_star_suc")


class NoiseKind(str, enum.Enum):
    DEPOLARIZING = "depolarizing"
    PHASE_FLIP = "phase_flip"

    @property
    def max_strength(self) -> float:
        """Strength at which the channel fully randomizes.

        A phase flip with ``q > 1/2`` equals one with ``1 - q`` followed by a
        deterministic ``Z``, so only ``[0, 1/2]`` is searched for it.
        """
        return 1.0 if self is NoiseKind.DEPOLARIZING else 0.5


@dataclass(frozen=True)
class NoiseChannel:
    """A single-qubit Pauli channel ``rho -> sum_k w_k P_k rho P_k``."""

    kind: NoiseKind
    q: float
    kraus: tuple[tuple[float, PauliWord], ...]

    def __post_init__(self):
        if not 0 <= self.q <= 1:
            raise ValueError(f"noise strength q = {self.q} outside [0, 1]")
        if not self.is_trace_preserving():
            raise ValueError("weights do not sum to a trace-preserving channel")

    @classmethod
    def make(cls, kind: NoiseKind | str, q: float) -> "NoiseChannel":
        kind = NoiseKind(kind)
        i, x, y, z = (PauliWord.from_string(c) for c in "IXYZ")
        if kind is NoiseKind.DEPOLARIZING:
            kraus = ((1 - 3 * q / 4, i), (q / 4, x), (q / 4, y), (q / 4, z))
        else:
            kraus = ((1 - q, i), (q, z))
        return cls(kind, float(q), kraus)

    def is_trace_preserving(self, tol: float = TRACE_TOL) -> bool:
        total = sum(w * (p.matrix().conj().T @ p.matrix()) for w, p in self.kraus)
        return bool(np.max(np.abs(total - np.eye(2))) <= tol)


def apply(channel: NoiseChannel, rho: DensityMatrix, qubit: str) -> DensityMatrix:
    """Apply the channel to the qubit labelled ``qubit`` only."""
    q = rho.index(qubit)
    out = np.zeros_like(rho.data)
    for w, word in channel.kraus:
        if w == 0:
            continue
        full = np.array([[1.0 + 0j]])
        for k in range(rho.n_qubits):
            full = np.kron(full, word.matrix() if k == q else np.eye(2))
        out += w * full @ rho.data @ full.conj().T
    return DensityMatrix(out, rho.labels)


@dataclass(frozen=True)
class Threshold:
    q_star: float
    trace: tuple[tuple[float, bool], ...]

    @property
    def monotone(self) -> bool:
        """No probe that failed lies below a probe that succeeded."""
        ok = [q for q, good in self.trace if good]
        bad = [q for q, good in self.trace if not good]
        return not ok or not bad or max(ok) < min(bad)


def bisect_threshold(
    tolerated: Callable[[float], bool], upper: float = 1.0, steps: int = BISECTION_STEPS
) -> Threshold:
    """Largest ``q`` in ``[0, upper]`` with ``tolerated(q)``, assuming it is monotone."""
    trace = [(0.0, tolerated(0.0)), (upper, tolerated(upper))]
    if not trace[0][1]:
        return Threshold(0.0, tuple(trace))
    if trace[1][1]:
        return Threshold(upper, tuple(trace))
    lo, hi = 0.0, upper
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        good = tolerated(mid)
        trace.append((mid, good))
        lo, hi = (mid, hi) if good else (lo, mid)
    return Threshold(0.5 * (lo + hi), tuple(trace))


def _is_npt(rho: DensityMatrix, cut: Sequence[str]) -> bool:
    return hermitian_spectrum(partial_transpose(rho, cut)).min < -NPT_TOL


def edss_tolerated(state: BellDiagonalState, kind: NoiseKind | str, q: float) -> bool:
    """Whether the protocol still heralds an NPT pair with noise ``q`` on the sent qubit."""
    outcome = run(state)
    sent = outcome.sent_state
    if outcome.branch is Branch.SEND_C:
        sent_qubit, cut = "C", "A"
    else:
        sent_qubit, cut = "A", "C"
    rho = apply(NoiseChannel.make(kind, q), build_rho_abc(sent, outcome.s), sent_qubit)
    if not _is_npt(rho, [cut]):
        return False
    try:
        return localize(rho, cut, method="auto").pt_min_eigenvalue < -NPT_TOL
    except LocalizationError:
        return False


def edss_threshold_trace(state: BellDiagonalState, kind: NoiseKind | str) -> Threshold:
    if state.s11 == 0:
        raise ValueError("s11 = 0: the resource cannot distribute entanglement, no threshold exists")
    kind = NoiseKind(kind)
    return bisect_threshold(lambda q: edss_tolerated(state, kind, q), kind.max_strength)


def edss_threshold(state: BellDiagonalState, kind: NoiseKind | str) -> float:
    """Noise threshold of the protocol, noise acting on the transmitted qubit.

    For depolarizing noise on a resource with ``lambda_1 = 1/2`` this is
    ``2s/(2s + 1)``.
    """
    return edss_threshold_trace(state, kind).q_star


BELL_PAIR = DensityMatrix(
    np.outer(*(2 * [np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)])), ("A", "B")
)


def direct_threshold_trace(kind: NoiseKind | str) -> Threshold:
    kind = NoiseKind(kind)
    return bisect_threshold(
        lambda q: _is_npt(apply(NoiseChannel.make(kind, q), BELL_PAIR, "B"), ["A"]), kind.max_strength
    )


def direct_threshold(kind: NoiseKind | str) -> float:
    """Threshold for sending half of a maximally entangled pair directly."""
    return direct_threshold_trace(kind).q_star


def rho_suc_threshold_trace(state: BellDiagonalState, kind: NoiseKind | str) -> Threshold:
    outcome = run(state)
    if outcome.localized is None:
        raise ValueError(f"state {state.coefficients} produces no localized entanglement")
    kind = NoiseKind(kind)
    suc = outcome.localized.projected_state
    first = suc.labels[0]
    return bisect_threshold(
        lambda q: _is_npt(apply(NoiseChannel.make(kind, q), suc, first), [first]), kind.max_strength
    )


def rho_suc_threshold(state: BellDiagonalState, kind: NoiseKind | str) -> float:
    """Threshold for sending one half of the already localized two-qubit state."""
    return rho_suc_threshold_trace(state, kind).q_star


@dataclass(frozen=True)
class NoiseComparison:
    state: BellDiagonalState
    kind: NoiseKind
    edss: float
    direct: float
    suc: float

    @property
    def direct_beats_edss(self) -> bool:
        return self.direct >= self.edss

    @property
    def edss_beats_suc(self) -> bool:
        return self.edss >= self.suc

    def row(self) -> tuple:
        return (*self.state.coefficients, self.kind.value, self.edss, self.direct, self.suc)


def compare(state: BellDiagonalState, kind: NoiseKind | str = NoiseKind.DEPOLARIZING) -> NoiseComparison:
    kind = NoiseKind(kind)
    return NoiseComparison(
        state=state,
        kind=kind,
        edss=edss_threshold(state, kind),
        direct=direct_threshold(kind),
        suc=rho_suc_threshold(state, kind),
    )


def to_csv(rows: Iterable[NoiseComparison], fmt: Callable[[float], str] = repr) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in r.row()])
    return buf.getvalue()
