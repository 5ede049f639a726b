"""Entanglement distribution through a separable carrier qubit."""

from .bell import BellDiagonalState, canonicalize, measures
from .core import DensityMatrix, PauliWord
from .protocol import Branch, ProtocolOutcome, choose_s, closed_form_pt, run

__all__ = [
    "BellDiagonalState",
    "Branch",
    "DensityMatrix",
    "PauliWord",
    "ProtocolOutcome",
    "canonicalize",
    "choose_s",
    "closed_form_pt",
    "measures",
    "run",
]
