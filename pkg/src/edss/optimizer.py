"""Search over general interactions for a better protocol than the controlled phase.

The interaction is ``U = exp(iH)`` on qubits (C, A), with ``H`` a real
combination of the 16 two-qubit Pauli words. Together with the carrier
parameter ``s`` this gives a 17-dimensional search space. The objective is the
smallest partial-transpose eigenvalue of the cut that should become NPT,
penalized by how far the transmitted qubit's cut falls below zero.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import bell
from .bell import BellDiagonalState, is_canonical, measures
from .carrier import build_rho_abc
from .core import DensityMatrix, PauliWord, hermitian_spectrum
from .protocol import choose_s, run
from .separability import min_pt_eigenvalue

FEASIBILITY_TOL = 1e-9
VIOLATION_TOL = 1e-6
PENALTY_WEIGHT = 1e3
PENALTY_GROWTH = 10.0
RESTORE_STEPS = 40
COEFF_BOUND = math.pi

PAULI_LABELS = tuple("".join(p) for p in itertools.product("IXYZ", repeat=2))
_BASIS = np.array([PauliWord.from_string(w).matrix().reshape(-1) for w in PAULI_LABELS])
_I2 = np.eye(2)


class OptimizationError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class UnitaryParams:
    """Coefficients of ``H`` on the Pauli words ``II, IX, ..., ZZ`` of (C, A)."""

    generator_coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.generator_coeffs)
        if len(c) != 16:
            raise ValueError(f"need 16 generator coefficients, got {len(c)}")
        object.__setattr__(self, "generator_coeffs", c)

    @classmethod
    def identity(cls) -> "UnitaryParams":
        return cls((0.0,) * 16)

    @classmethod
    def controlled_phase(cls) -> "UnitaryParams":
        """``exp(i pi |11><11|)`` with ``|11><11| = (II - ZI - IZ + ZZ)/4``."""
        c = dict.fromkeys(PAULI_LABELS, 0.0)
        c.update(II=math.pi / 4, ZI=-math.pi / 4, IZ=-math.pi / 4, ZZ=math.pi / 4)
        return cls(tuple(c[w] for w in PAULI_LABELS))

    def generator(self) -> np.ndarray:
        return (np.asarray(self.generator_coeffs) @ _BASIS).reshape(4, 4)

    def unitary(self) -> np.ndarray:
        return expi(self.generator())


def expi(h: np.ndarray) -> np.ndarray:
    """``exp(iH)`` for Hermitian ``H`` through its eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def objective(state: BellDiagonalState, params: UnitaryParams, s: float) -> tuple[float, float]:
    """Dense ``(lambda_C|AB, lambda_A|BC)`` after the interaction ``params``."""
    rho = build_rho_abc(state, s, params.unitary())
    return min_pt_eigenvalue(rho, ["C"])[0], min_pt_eigenvalue(rho, ["A"])[0]


class _Evaluator:
    """Vectorized evaluation of both cut minima, shared by all search steps."""

    def __init__(self, state: BellDiagonalState):
        rab = bell.to_density_matrix(state).data
        # rho_C (x) rho_AB = (K0 + s K1)/2
        self.k0 = np.kron(_I2, rab)
        self.k1 = np.kron(np.array([[0, 1], [1, 0]]), rab)
        self.swap = state.n_negative > 0
        self.w = np.zeros((8, 8), dtype=complex)
        self.pts = np.empty((2, 8, 8), dtype=complex)

    def __call__(self, x: np.ndarray) -> tuple[float, float]:
        s = min(max(float(x[16]), 0.0), 1.0)
        u = expi((x[:16] @ _BASIS).reshape(4, 4))
        w = self.w
        w[::2, ::2] = u
        w[1::2, 1::2] = u
        r = (w @ (0.5 * (self.k0 + s * self.k1)) @ w.conj().T).reshape((2,) * 6)
        self.pts[0] = r.transpose(3, 1, 2, 0, 4, 5).reshape(8, 8)
        self.pts[1] = r.transpose(0, 4, 2, 3, 1, 5).reshape(8, 8)
        ev = np.linalg.eigvalsh(self.pts)
        lam_c, lam_a = float(ev[0, 0]), float(ev[1, 0])
        # (kept PPT, made NPT)
        return (lam_a, lam_c) if self.swap else (lam_c, lam_a)


@dataclass(frozen=True)
class RestartResult:
    index: int
    value: float
    x: tuple[float, ...] | None
    evaluations: int
    best_infeasible: float


@dataclass(frozen=True)
class OptimizationResult:
    """Best feasible point found; for a one-negative resource the two cut fields swap roles."""

    state: BellDiagonalState
    best_lambda_a_bc: float
    best_lambda_c_ab: float
    best_s: float
    best_params: UnitaryParams
    cz_baseline: float
    slack: float
    evaluations: int
    restarts: int
    best_restart: int

    @property
    def improvement(self) -> float:
        """How much more negative the search made the NPT cut than the controlled phase."""
        return self.cz_baseline - self.best_lambda_a_bc

    @property
    def violation(self) -> bool:
        return self.improvement > self.slack + VIOLATION_TOL

    def to_dict(self) -> dict:
        return {
            "s01": self.state.s01,
            "s10": self.state.s10,
            "s11": self.state.s11,
            "best_lambda_a_bc": self.best_lambda_a_bc,
            "best_lambda_c_ab": self.best_lambda_c_ab,
            "best_s": self.best_s,
            "best_params": list(self.best_params.generator_coeffs),
            "cz_baseline": self.cz_baseline,
            "slack": float(self.slack),
            "improvement": float(self.improvement),
            "violation": bool(self.violation),
            "evaluations": self.evaluations,
            "restarts": self.restarts,
            "best_restart": self.best_restart,
        }


def conjecture_slack(state: BellDiagonalState) -> float:
    """``(1 - lambda_4/lambda_3) |s11| / 4``; a vanishing ``lambda_3`` counts as ratio 0."""
    _, _, l3, l4 = state.magnitudes.lambdas
    ratio = l4 / l3 if l3 > 0 else 0.0
    return 0.25 * (1 - ratio) * abs(state.s11)


def _start(state: BellDiagonalState, seed: int, k: int) -> np.ndarray:
    if k == 0:
        return np.array(UnitaryParams.controlled_phase().generator_coeffs + (choose_s(state),))
    rng = np.random.default_rng([seed, k])
    return np.concatenate([rng.uniform(-COEFF_BOUND, COEFF_BOUND, 16), rng.uniform(0, 1, 1)])


def _restart(args) -> RestartResult:
    state, k, budget, seed, weight = args
    evaluate = _Evaluator(state)
    best = {"value": math.inf, "x": None, "infeasible": math.inf, "x_inf": None}
    count = 0

    def penalized(x, w):
        nonlocal count
        count += 1
        kept, ent = evaluate(x)
        if kept >= -FEASIBILITY_TOL:
            if ent < best["value"]:
                best["value"], best["x"] = ent, np.array(x)
        elif ent < best["infeasible"]:
            best["infeasible"], best["x_inf"] = ent, np.array(x)
        return ent + w * max(0.0, -kept)

    bounds = [(-COEFF_BOUND, COEFF_BOUND)] * 16 + [(0.0, 1.0)]
    opts = {"xatol": 1e-12, "fatol": 1e-15}
    x = _start(state, seed, k)
    first = budget // 2
    res = minimize(penalized, x, args=(weight,), method="Nelder-Mead", bounds=bounds,
                   options={"maxfev": first, **opts})
    remaining = budget - count
    if remaining > 0:
        minimize(penalized, res.x, args=(weight * PENALTY_GROWTH,), method="Nelder-Mead",
                 bounds=bounds, options={"maxfev": remaining, **opts})

    if best["x"] is None and best["x_inf"] is not None:
        # pull s down along the best infeasible point until the kept cut is PPT
        x = best["x_inf"].copy()
        lo, hi = 0.0, float(x[16])
        for _ in range(RESTORE_STEPS):
            mid = 0.5 * (lo + hi)
            x[16] = mid
            lo, hi = (mid, hi) if evaluate(x)[0] >= -FEASIBILITY_TOL else (lo, mid)
        x[16] = lo
        kept, ent = evaluate(x)
        if kept >= -FEASIBILITY_TOL:
            best["value"], best["x"] = ent, x
    return RestartResult(
        index=k,
        value=best["value"],
        x=None if best["x"] is None else tuple(float(v) for v in best["x"]),
        evaluations=count,
        best_infeasible=best["infeasible"],
    )


def worker_count(restarts: int) -> int:
    """Parallel restarts, capped by the ``EDSS_THREADS`` environment variable (default 1)."""
    try:
        cap = int(os.environ.get("EDSS_THREADS", "1"))
    except ValueError:
        cap = 1
    return max(1, min(cap, restarts))


def optimize(
    state: BellDiagonalState,
    restarts: int = 32,
    budget: int = 5000,
    seed: int = 0,
    weight: float = PENALTY_WEIGHT,
) -> OptimizationResult:
    """Multi-start penalized Nelder-Mead over (generator, s).

    Restart 0 starts from the controlled phase at the protocol's ``s``; restart
    ``k > 0`` starts from a point drawn by ``numpy.random.default_rng([seed, k])``.
    Each restart spends half its budget with penalty weight ``weight`` and the
    rest with ten times that. Only points whose kept cut is PPT within
    ``FEASIBILITY_TOL`` are ever reported.

    Raises
    ------
    ValueError
        If the state is not canonical or has ``s11 = 0``.
    OptimizationError
        If no restart reaches a feasible point.
    """
    if not is_canonical(state):
        raise ValueError(f"state {state.coefficients} is not canonical; canonicalize it first")
    if state.s11 == 0:
        raise ValueError("s11 = 0: no interaction distributes entanglement from this resource")
    if restarts < 1 or budget < 2:
        raise ValueError("need at least one restart and a budget of two evaluations")
    jobs = [(state, k, budget, seed, weight) for k in range(restarts)]
    workers = worker_count(restarts)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_restart, jobs))
    else:
        results = [_restart(j) for j in jobs]

    evaluations = sum(r.evaluations for r in results)
    feasible = [r for r in results if r.x is not None]
    if not feasible:
        raise OptimizationError(
            "budget exhausted before any feasible point",
            {"evaluations": evaluations, "best_infeasible": min(r.best_infeasible for r in results)},
        )
    winner = min(feasible, key=lambda r: (r.value, r.index))
    x = np.array(winner.x)
    kept, ent = _Evaluator(state)(x)
    outcome = run(state)
    baseline = outcome.lambda_a_bc if state.n_negative == 0 else outcome.lambda_c_ab
    return OptimizationResult(
        state=state,
        best_lambda_a_bc=ent,
        best_lambda_c_ab=kept,
        best_s=float(x[16]),
        best_params=UnitaryParams(tuple(x[:16])),
        cz_baseline=baseline,
        slack=conjecture_slack(state),
        evaluations=evaluations,
        restarts=restarts,
        best_restart=winner.index,
    )


def sample_probe_states(n: int, seed: int = 0, min_s11: float = 1e-3) -> list[BellDiagonalState]:
    """``n`` separable canonical resources with all coefficients positive.

    Spectra are drawn uniformly from the probability simplex and kept when
    ``lambda_1 <= 1/2``, the canonical form has no negative coefficient and
    ``s11 >= min_s11``. Entangled resources are excluded: they can hand their
    own entanglement to Bob, so beating the controlled phase there says nothing
    about distribution through separable states.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        lam = np.sort(rng.dirichlet(np.ones(4)))[::-1]
        state = bell.canonicalize(bell.from_spectrum(lam))
        if state.is_separable and state.n_negative == 0 and state.s11 >= min_s11:
            out.append(state)
    return out


def dephased_state(state: BellDiagonalState) -> BellDiagonalState:
    """Dephase B so that only the dominant correlation survives.

    Averaging ``rho`` with ``P rho P`` for the single-qubit Pauli on B that
    commutes with the largest-magnitude correlation word removes the other
    two, which leaves a state with two equal top eigenvalues.
    """
    m = [abs(c) for c in state.coefficients]
    keep = int(np.argmax(m))
    coeffs = [c if i == keep else 0.0 for i, c in enumerate(state.coefficients)]
    return BellDiagonalState(*coeffs)


def dephasing_upper_bound(state: BellDiagonalState, tol: float = 1e-12) -> float:
    """Discord ``I_class`` of the resource, an upper bound on what any interaction distributes.

    Raises
    ------
    ArithmeticError
        If the dephased state's two largest eigenvalues differ by more than ``tol``.
    """
    sigma = dephased_state(state)
    rho = bell.to_density_matrix(state)
    word = {0: "IX", 1: "IZ", 2: "IY"}[int(np.argmax([abs(c) for c in state.coefficients]))]
    p = PauliWord.from_string(word).matrix()
    direct = DensityMatrix((rho.data + p @ rho.data @ p) / 2, rho.labels)
    if np.max(np.abs(direct.data - bell.to_density_matrix(sigma).data)) > tol:
        raise ArithmeticError("dephasing map does not reproduce the single-correlation state")
    chi = hermitian_spectrum(direct).eigenvalues
    if abs(chi[0] - chi[1]) > tol:
        raise ArithmeticError(f"dephased eigenvalues {chi[:2]} are not degenerate")
    return measures(state).i_class
