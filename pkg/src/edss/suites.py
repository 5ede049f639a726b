"""Grid and random-sample verification suites shared by the command line and tests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import noise
from .bell import BellDiagonalState
from .carrier import build_rho_abc
from .core import random_unitary
from .protocol import (
    Branch,
    choose_s,
    closed_form_pt,
    dense_pt_minima,
    gap_bound_check,
    half_fidelity_resource,
    pt_spectra_coincide,
    run,
)
from .separability import DecompositionError, localize, separable_decomposition

CLOSED_FORM_TOL = 1e-10
PPT_TOL = 1e-12
GAP_TOL = 1e-9
LOCALIZATION_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-12
THRESHOLD_TOL = 1e-4


def value_grid(step: float) -> np.ndarray:
    n = int(round(1 / step))
    if not np.isclose(n * step, 1.0):
        raise ValueError(f"step {step} does not divide [0, 1]")
    return np.round(np.linspace(0.0, 1.0, n + 1), 12)


def canonical_grid(step: float = 0.05, negative: bool = False) -> list[BellDiagonalState]:
    """Valid states with ``s01 >= s10 >= s11 >= 0`` on a grid.

    With ``negative=True`` the same magnitudes are returned with ``s11``
    negated, for every point with ``s11 > 0`` that is still a state.
    """
    out = []
    for a, b, c in itertools.combinations_with_replacement(value_grid(step)[::-1], 3):
        if negative and c == 0:
            continue
        try:
            out.append(BellDiagonalState(a, b, -c if negative else c))
        except ValueError:
            continue
    return out


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: int = 0
    witness: dict | None = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checked > 0

    def fail(self, witness: dict) -> None:
        self.failures += 1
        if self.witness is None:
            self.witness = witness

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "witness": self.witness,
            **self.notes,
        }


def closed_form_suite(step: float = 0.05, s_step: float = 0.1) -> SuiteResult:
    """Closed-form cut minima against dense partial transposes, both signs of s11."""
    res = SuiteResult("closed-form cut minima")
    worst = 0.0
    states = canonical_grid(step) + canonical_grid(step, negative=True)
    for state in states:
        for s in value_grid(s_step):
            dense = dense_pt_minima(build_rho_abc(state, s))
            closed = closed_form_pt(state, s)
            err = max(abs(d - c) for d, c in zip(dense, closed))
            worst = max(worst, err)
            res.checked += 1
            if err > CLOSED_FORM_TOL:
                res.fail({"state": state.coefficients, "s": s, "dense": dense, "closed": closed})
    res.notes["max_error"] = worst
    return res


def positive_coverage_suite(step: float = 0.05, separable_only: bool = True) -> SuiteResult:
    """Every resource with all coefficients positive yields PPT carrier and NPT Alice cut."""
    res = SuiteResult("distribution from positive resources")
    for state in canonical_grid(step):
        if min(state.coefficients) <= 0:
            continue
        if separable_only and not state.is_separable:
            continue
        out = run(state)
        res.checked += 1
        if not (out.branch is Branch.SEND_C and out.lambda_c_ab >= -PPT_TOL and out.lambda_a_bc < 0):
            res.fail(out.to_dict())
    return res


def negative_branch_suite(step: float = 0.05) -> SuiteResult:
    """Every resource with one negative coefficient succeeds by sending A."""
    res = SuiteResult("negative branch")
    for state in canonical_grid(step, negative=True):
        l1, _, _, l4 = state.lambdas
        if l1 + l4 >= 0.5:
            continue
        out = run(state)
        rho = build_rho_abc(out.sent_state, out.s)
        dense_c, dense_a = dense_pt_minima(rho)
        res.checked += 1
        ok = (
            out.branch is Branch.SEND_A
            and dense_a >= -PPT_TOL
            and dense_c < 0
            and out.localized is not None
            and out.localized.pt_min_eigenvalue < 0
        )
        if not ok:
            res.fail({**out.to_dict(), "dense": (dense_c, dense_a)})
    return res


def impossibility_suite(samples: int = 1000, seed: int = 0) -> SuiteResult:
    """With ``s11 = 0`` the partial transposes over A, AB and C share one spectrum."""
    res = SuiteResult("no distribution without s11")
    rng = np.random.default_rng(seed)
    npt_alice_ppt_carrier = 0
    while res.checked < samples:
        s01, s10 = rng.uniform(-1, 1, 2)
        try:
            state = BellDiagonalState(s01, s10, 0.0)
        except ValueError:
            continue
        u = random_unitary(4, rng)
        s = float(rng.uniform(0, 1))
        res.checked += 1
        if not pt_spectra_coincide(state, u, s):
            res.fail({"state": state.coefficients, "s": s, "unitary": u.tolist()})
        lam_c, lam_a = dense_pt_minima(build_rho_abc(state, s, u))
        if lam_a < -PPT_TOL and lam_c >= -PPT_TOL:
            npt_alice_ppt_carrier += 1
            res.fail({"state": state.coefficients, "s": s, "lambda_c_ab": lam_c, "lambda_a_bc": lam_a})
    res.notes["npt_alice_with_ppt_carrier"] = npt_alice_ppt_carrier
    return res


def localization_suite(step: float = 0.05) -> SuiteResult:
    """Localized partial-transpose minimum equals the three-qubit one divided by p."""
    res = SuiteResult("localization")
    worst = 0.0
    for state in canonical_grid(step) + canonical_grid(step, negative=True):
        out = run(state)
        if out.localized is None:
            continue
        loc = out.localized
        err = abs(loc.pt_min_eigenvalue - loc.input_pt_min / loc.success_probability)
        worst = max(worst, err)
        res.checked += 1
        if err > LOCALIZATION_TOL or loc.pt_min_eigenvalue >= 0:
            res.fail({**out.to_dict(), "error": err})
    res.notes["max_error"] = worst
    return res


def decomposition_suite(step: float = 0.05, s_step: float = 0.1, cuts=("C", "A")) -> SuiteResult:
    """Separable decompositions for every PPT cut on the grid, checked term by term."""
    res = SuiteResult("separable decompositions")
    worst = 0.0
    for state in canonical_grid(step) + canonical_grid(step, negative=True):
        for s in value_grid(s_step):
            lam = dict(zip(("C", "A"), closed_form_pt(state, s)))
            for cut in cuts:
                if lam[cut] < -PPT_TOL:
                    continue
                try:
                    dec = separable_decomposition(state, s, cut)
                except DecompositionError as exc:
                    res.checked += 1
                    res.fail({"state": state.coefficients, "s": s, "cut": cut, "error": str(exc)})
                    continue
                resid = dec.residual()
                worst = max(worst, resid)
                bad = [c for c in dec.certificates() if not c.ok]
                res.checked += 1
                if resid > RECONSTRUCTION_TOL or bad:
                    res.fail({
                        "state": state.coefficients, "s": s, "cut": cut, "residual": resid,
                        "reason": bad[0].reason if bad else None,
                    })
    res.notes["max_residual"] = worst
    return res


def random_triple(rng: np.random.Generator) -> tuple[BellDiagonalState, np.ndarray, float]:
    """A resource with spectrum uniform on the simplex, a Haar unitary and a uniform ``s``."""
    from .bell import from_spectrum

    lam = np.sort(rng.dirichlet(np.ones(4)))[::-1]
    return from_spectrum(lam), random_unitary(4, rng), float(rng.uniform(0, 1))


def gap_bound_suite(samples: int = 1000, seed: int = 0) -> SuiteResult:
    """``|lambda_A|BC - lambda_C|AB| <= (1 + s)|s11|/4`` for random interactions."""
    res = SuiteResult("gap bound")
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(samples):
        state, u, s = random_triple(rng)
        gap, bound = gap_bound_check(state, u, s)
        worst = max(worst, gap - bound)
        res.checked += 1
        if gap > bound + GAP_TOL:
            res.fail({"state": state.coefficients, "s": s, "unitary": u.tolist(), "gap": gap, "bound": bound})
    res.notes["max_excess"] = worst
    return res


def noise_suite(s_values=(0.1, 0.25, 0.5, 0.9)) -> SuiteResult:
    """Bisected thresholds against their closed forms."""
    res = SuiteResult("noise thresholds")
    checks: list[tuple[str, Callable[[], noise.Threshold], float]] = [
        ("direct depolarizing", lambda: noise.direct_threshold_trace("depolarizing"), 2 / 3),
        ("direct phase flip", lambda: noise.direct_threshold_trace("phase_flip"), 0.5),
    ]
    for s in s_values:
        state = half_fidelity_resource(s)
        checks.append((f"depolarizing s={s}", lambda st=state: noise.edss_threshold_trace(st, "depolarizing"),
                       2 * s / (2 * s + 1)))
        checks.append((f"phase flip s={s}", lambda st=state: noise.edss_threshold_trace(st, "phase_flip"), 0.5))
    for label, fn, expected in checks:
        t = fn()
        res.checked += 1
        if abs(t.q_star - expected) > THRESHOLD_TOL or not t.monotone:
            res.fail({"check": label, "q_star": t.q_star, "expected": expected, "monotone": t.monotone})
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "closed-form cut minima": closed_form_suite,
    "no distribution without s11": impossibility_suite,
    "distribution from positive resources": positive_coverage_suite,
    "negative branch": negative_branch_suite,
    "localization": localization_suite,
    "separable decompositions": decomposition_suite,
    "gap bound": gap_bound_suite,
    "noise thresholds": noise_suite,
}


def run_all(step: float = 0.05, s_step: float = 0.1, samples: int = 1000, seed: int = 0) -> list[SuiteResult]:
    return [
        closed_form_suite(step, s_step),
        impossibility_suite(samples, seed),
        positive_coverage_suite(step),
        negative_branch_suite(step),
        localization_suite(step),
        decomposition_suite(step, s_step),
        gap_bound_suite(samples, seed),
        noise_suite(),
    ]
