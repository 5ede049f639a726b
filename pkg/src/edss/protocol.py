"""The distribution protocol with a controlled-phase interaction.

Alice holds qubits C and A of the resource, Bob holds B. Alice prepares
``rho_C = (1 + s X)/2``, applies a controlled phase between C and A, and sends
one qubit to Bob. With non-negative coefficients she sends C and the carrier
cut ``C|AB`` stays PPT while ``A|BC`` becomes NPT. With one negative
coefficient the two cuts exchange roles and she sends A instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import bell
from .bell import BellDiagonalState, binary_entropy, is_canonical
from .carrier import CZ, build_rho_abc, carrier_graph_state, stabilizer_terms
from .core import DensityMatrix, hermitian_spectrum, partial_transpose
from .separability import LocalizationResult, localize, min_pt_eigenvalue

__all__ = [
    "Branch",
    "CZ",
    "ProtocolOutcome",
    "build_rho_abc",
    "carrier_graph_state",
    "choose_s",
    "closed_form_pt",
    "gap_bound",
    "gap_bound_check",
    "half_fidelity_resource",
    "is_degenerate",
    "pt_spectra",
    "pt_spectra_coincide",
    "run",
    "stabilizer_terms",
]

NPT_TOL = 1e-12
SPECTRUM_TOL = 1e-9


class Branch(str, enum.Enum):
    SEND_C = "SendC"
    SEND_A = "SendA"


def _positive_cut_values(s01: float, s10: float, s11: float, s: float) -> tuple[float, float]:
    lam_c = (1 - s10 - s * (1 + s10) - abs(s01 - s11 - s * s01 - s * s11)) / 8
    lam_a = (1 - s01 - s10 - s11 - s * (1 - s01 + s10 + s11)) / 8
    return lam_c, lam_a


def closed_form_pt(state: BellDiagonalState, s: float) -> tuple[float, float]:
    """Smallest partial-transpose eigenvalues ``(lambda_C|AB, lambda_A|BC)``.

    For non-negative coefficients these are the closed forms of the carrier and
    Alice cuts. A single negative coefficient exchanges the two cuts: the state
    is then a partial transpose over A and C of its magnitude state, up to a
    local Pauli, so the two expressions swap. Where the negative sign sits does
    not matter.
    """
    if not is_canonical(state):
        raise ValueError(f"state {state.coefficients} is not canonical; canonicalize it first")
    lam_c, lam_a = _positive_cut_values(*state.magnitudes.coefficients, s)
    if state.n_negative == 0:
        return lam_c, lam_a
    return lam_a, lam_c


def _ratios(state: BellDiagonalState) -> tuple[float, float, np.ndarray]:
    lam = state.magnitudes.lambdas
    l1, l2, l3, l4 = lam
    r21 = l2 / l1
    r43 = l4 / l3 if l3 > 0 else math.inf
    return r43, r21, lam


def is_degenerate(state: BellDiagonalState) -> bool:
    """True when ``lambda_3 = 0`` so that ``lambda_4 / lambda_3`` is undefined."""
    return bool(state.magnitudes.lambdas[2] <= 0)


def choose_s(state: BellDiagonalState) -> float:
    """``min(lambda_4/lambda_3, lambda_2/lambda_1)`` of the magnitude state.

    This is the largest ``s`` keeping the carrier cut PPT. When
    ``lambda_3 = lambda_4 = 0`` only ``lambda_2/lambda_1`` is used, the limit of
    the carrier-cut eigenvalue as ``lambda_4/lambda_3`` drops out; see
    :func:`is_degenerate`.
    """
    r43, r21, _ = _ratios(state)
    return float(min(max(min(r43, r21), 0.0), 1.0))


def success_probability(state: BellDiagonalState, s: float) -> float:
    """Heralding probability ``(1 + s(2 lambda_1 + 2 lambda_2 - 1))/2`` of the localization."""
    l1, l2, _, _ = state.magnitudes.lambdas
    return float(0.5 * (1 + s * (2 * l1 + 2 * l2 - 1)))


def lower_bound(p: float, fidelity: float) -> float:
    """``p (1 - H(F))`` for ``F > 1/2``, else 0."""
    if fidelity <= 0.5:
        return 0.0
    return max(p * (1 - binary_entropy(fidelity)), 0.0)


def gap_bound(state: BellDiagonalState, s: float) -> float:
    """``(1 + s)|s11| / 4``: how far the two cut minima can drift apart."""
    return 0.25 * (1 + s) * abs(state.s11)


def half_fidelity_resource(s: float) -> BellDiagonalState:
    """Canonical resource with ``lambda_1 = 1/2`` for which :func:`choose_s` returns ``s``."""
    if not 0 < s <= 1:
        raise ValueError(f"s = {s} outside (0, 1]")
    if s >= 1 / 3:
        lam = (0.5, s / 2, (1 - s) / 4, (1 - s) / 4)
    else:
        r = 1 / (2 * (2 + s))
        lam = (0.5, r, r, s * r)
    return bell.canonicalize(bell.from_spectrum(lam))


@dataclass(frozen=True)
class ProtocolOutcome:
    input: BellDiagonalState
    s: float
    branch: Branch
    lambda_c_ab: float
    lambda_a_bc: float
    success_probability: float
    ent_lower_bound: float
    gap_bound: float
    localized: LocalizationResult | None = None
    degenerate: bool = False
    sent_state: BellDiagonalState | None = None

    @property
    def localized_pt_min(self) -> float | None:
        return None if self.localized is None else self.localized.pt_min_eigenvalue

    def to_dict(self) -> dict:
        return {
            "s01": self.input.s01,
            "s10": self.input.s10,
            "s11": self.input.s11,
            "s": self.s,
            "branch": self.branch.value,
            "lambda_c_ab": self.lambda_c_ab,
            "lambda_a_bc": self.lambda_a_bc,
            "p": self.success_probability,
            "ent_lower_bound": self.ent_lower_bound,
            "gap_bound": self.gap_bound,
            "localized_pt_min": self.localized_pt_min,
        }


def place_negative(state: BellDiagonalState, s: float) -> BellDiagonalState:
    """Move the negative sign of a one-negative state to its conventional slot.

    The sign goes on ``s11`` when ``|s01 - s11 - s s01 - s s11| > 0`` for the
    magnitudes, and on ``s01`` otherwise. Moving it is a local equivalence.
    """
    m = state.magnitudes
    c = m.s01 - m.s11 - s * m.s01 - s * m.s11
    slot = "s11" if abs(c) > NPT_TOL else "s01"
    return bell.canonicalize(state, negative=slot)


def run(state: BellDiagonalState, localization: str = "auto") -> ProtocolOutcome:
    """Execute the protocol on a canonical resource state.

    Raises
    ------
    ValueError
        If the state is not canonical.
    """
    if not is_canonical(state):
        raise ValueError(
            f"state {state.coefficients} is not canonical; call bell.canonicalize first"
        )
    s = choose_s(state)
    degenerate = is_degenerate(state)
    if state.n_negative == 0:
        branch, sent, ent_cut = Branch.SEND_C, state, "A"
    else:
        branch, sent, ent_cut = Branch.SEND_A, place_negative(state, s), "C"
    lam_c, lam_a = closed_form_pt(sent, s)
    lam_ent = lam_a if branch is Branch.SEND_C else lam_c

    localized = None
    p = success_probability(sent, s)
    bound = 0.0
    if lam_ent < -NPT_TOL:
        rho = build_rho_abc(sent, s)
        localized = localize(rho, ent_cut, method=localization)
        p = localized.success_probability
        fidelity = hermitian_spectrum(localized.projected_state).max
        bound = lower_bound(p, fidelity)
    return ProtocolOutcome(
        input=state,
        s=s,
        branch=branch,
        lambda_c_ab=lam_c,
        lambda_a_bc=lam_a,
        success_probability=p,
        ent_lower_bound=bound,
        gap_bound=gap_bound(state, s),
        localized=localized,
        degenerate=degenerate,
        sent_state=sent,
    )


def dense_pt_minima(rho_abc: DensityMatrix) -> tuple[float, float]:
    """Dense ``(lambda_C|AB, lambda_A|BC)`` of a three-qubit state."""
    return min_pt_eigenvalue(rho_abc, ["C"])[0], min_pt_eigenvalue(rho_abc, ["A"])[0]


def pt_spectra(state: BellDiagonalState, unitary: np.ndarray | None, s: float) -> dict[str, np.ndarray]:
    rho = build_rho_abc(state, s, unitary)
    return {
        cut: hermitian_spectrum(partial_transpose(rho, list(cut))).eigenvalues
        for cut in ("A", "AB", "C")
    }


def pt_spectra_coincide(
    state: BellDiagonalState, unitary: np.ndarray | None, s: float, tol: float = SPECTRUM_TOL
) -> bool:
    """Whether the partial transposes over A, AB and C share one spectrum.

    They do for every interaction when ``s11 = 0``: the carrier cut being PPT
    then forces Alice's cut to be PPT as well.

    Raises
    ------
    ValueError
        If ``s11 != 0``.
    """
    if state.s11 != 0:
        raise ValueError(f"spectra only coincide in general for s11 = 0, got s11 = {state.s11}")
    spectra = pt_spectra(state, unitary, s)
    ref = spectra["C"]
    return all(np.max(np.abs(v - ref)) <= tol for v in spectra.values())


def gap_bound_check(
    state: BellDiagonalState, unitary: np.ndarray | None, s: float
) -> tuple[float, float]:
    """Dense ``|lambda_A|BC - lambda_C|AB|`` and its bound ``(1 + s)|s11|/4``."""
    lam_c, lam_a = dense_pt_minima(build_rho_abc(state, s, unitary))
    return abs(lam_a - lam_c), gap_bound(state, s)
