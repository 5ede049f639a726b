"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import time

import numpy as np
import pytest

from edss.bell import BellDiagonalState, binary_entropy, canonicalize, from_spectrum, measures
from edss.carrier import CZ
from edss.noise import direct_threshold_trace, edss_threshold_trace
from edss.optimizer import optimize, sample_probe_states
from edss.protocol import Branch, choose_s, gap_bound_check, half_fidelity_resource, run
from edss.suites import (
    canonical_grid,
    closed_form_suite,
    decomposition_suite,
    impossibility_suite,
    localization_suite,
    negative_branch_suite,
    positive_coverage_suite,
    random_triple,
)

OPTIMUM = BellDiagonalState(0.5, 0.25, 0.25)
SATURATING = canonicalize(from_spectrum([0.48, 0.30, 0.15, 0.07]))


@pytest.fixture
def report(capsys):
    def _report(number, passed, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return _report


def test_c01_golden_optimum(report):
    t = time.perf_counter()
    out = run(OPTIMUM)
    elapsed = time.perf_counter() - t
    ok = (
        out.s == 0.5
        and abs(out.lambda_c_ab) < 1e-12
        and abs(out.lambda_a_bc + 1 / 16) <= 1e-12
        and abs(out.success_probability - 5 / 8) <= 1e-12
        and elapsed < 1.0
    )
    assert report(1, ok, f"s={out.s} lambda_c_ab={out.lambda_c_ab:.3g} lambda_a_bc={out.lambda_a_bc!r} "
                         f"p={out.success_probability!r} runtime={elapsed:.3f}s")


def test_c02_closed_form_against_dense(report):
    res = closed_form_suite(step=0.05, s_step=0.1)
    assert report(2, res.passed, f"points={res.checked} failures={res.failures} "
                                 f"max_error={res.notes['max_error']:.2e} witness={res.witness}")


def test_c03_coverage_of_separable_positive_resources(report):
    res = positive_coverage_suite(step=0.05, separable_only=True)
    neg = negative_branch_suite(step=0.05)
    ok = res.passed and neg.passed
    assert report(3, ok, f"positive states={res.checked} exceptions={res.failures}; "
                         f"one-negative states={neg.checked} exceptions={neg.failures}")


def test_c04_no_distribution_without_s11(report):
    res = impossibility_suite(samples=1000, seed=0)
    assert report(4, res.passed, f"triples={res.checked} failures={res.failures} "
                                 f"npt_alice_with_ppt_carrier={res.notes['npt_alice_with_ppt_carrier']}")


def test_c05_separable_decompositions_certified(report):
    res = decomposition_suite(step=0.05, s_step=0.1, cuts=("C", "A"))
    assert report(5, res.passed, f"ppt cuts={res.checked} failures={res.failures} "
                                 f"max_residual={res.notes['max_residual']:.2e} witness={res.witness}")


def test_c06_localization(report):
    loc = run(OPTIMUM).localized
    golden = abs(loc.pt_min_eigenvalue + 0.1) <= 1e-10 and abs(loc.pt_min_eigenvalue - (-1 / 16) / (5 / 8)) <= 1e-10
    res = localization_suite(step=0.05)
    assert report(6, golden and res.passed, f"optimum pt_min={loc.pt_min_eigenvalue!r}; "
                                            f"npt states={res.checked} failures={res.failures} "
                                            f"max_error={res.notes['max_error']:.2e}")


def test_c07_saturation_of_the_gap_bound():
    assert choose_s(SATURATING) == pytest.approx(7 / 15, abs=1e-15)
    l1, l2, l3, l4 = SATURATING.lambdas
    assert l4 / l3 < l2 / l1
    gap, bound = gap_bound_check(SATURATING, CZ, choose_s(SATURATING))
    assert abs(gap - bound) <= 1e-6


def test_c07_gap_bound_holds_for_the_controlled_phase():
    rng = np.random.default_rng(0)
    for _ in range(2000):
        state, _, s = random_triple(rng)
        gap, bound = gap_bound_check(state, CZ, s)
        assert gap <= bound + 1e-9


@pytest.mark.xfail(strict=True, reason="the gap bound fails for some general interactions; "
                                       "a violating triple is reported")
def test_c07_gap_bound_random_interactions(report):
    rng = np.random.default_rng(0)
    violations, worst, witness = 0, -np.inf, None
    for _ in range(10_000):
        state, u, s = random_triple(rng)
        gap, bound = gap_bound_check(state, u, s)
        if gap - bound > worst:
            worst, witness = gap - bound, (state.coefficients, s, gap, bound)
        violations += gap > bound + 1e-9
    gap, bound = gap_bound_check(SATURATING, CZ, choose_s(SATURATING))
    saturated = abs(gap - bound) <= 1e-6
    ok = violations == 0 and saturated
    assert report(7, ok, f"triples=10000 violations={violations} max_excess={worst:.3e} "
                         f"worst=(state, s, gap, bound)={witness}; saturation gap={gap:.9f} bound={bound:.9f}")


def test_c08_noise_thresholds(report):
    rows = [("direct depolarizing", direct_threshold_trace("depolarizing"), 2 / 3),
            ("direct phase flip", direct_threshold_trace("phase_flip"), 0.5)]
    for s in (0.1, 0.25, 0.5, 0.9):
        state = half_fidelity_resource(s)
        rows.append((f"edss depolarizing s={s}", edss_threshold_trace(state, "depolarizing"), 2 * s / (2 * s + 1)))
        rows.append((f"edss phase flip s={s}", edss_threshold_trace(state, "phase_flip"), 0.5))
    bad = [(name, t.q_star, want) for name, t, want in rows if abs(t.q_star - want) > 1e-4 or not t.monotone]
    detail = " ".join(f"{name}:{t.q_star:.6f}" for name, t, _ in rows)
    assert report(8, not bad, f"{detail} mismatches={bad}")


def test_c09_bounds_ordering(report):
    worst, bad = -np.inf, []
    states = canonical_grid(0.05) + canonical_grid(0.05, negative=True)
    for state in states:
        lower, upper = run(state).ent_lower_bound, measures(state).i_class
        worst = max(worst, lower - upper)
        if lower > upper + 1e-12:
            bad.append(state.coefficients)
    lower = 5 / 8 * (1 - binary_entropy(0.6))
    upper = measures(OPTIMUM).i_class
    golden = (
        abs(run(OPTIMUM).ent_lower_bound - lower) <= 1e-12
        and abs(lower - 0.0182) < 5e-5
        and abs(upper - 0.0613) < 5e-5
        and lower <= upper
    )
    assert report(9, golden and not bad, f"grid states={len(states)} violations={len(bad)} "
                                         f"max(lower-upper)={worst:.2e}; optimum {lower:.6f} <= {upper:.6f}")


@pytest.mark.slow
def test_c10_controlled_phase_is_not_beaten(report):
    states = sample_probe_states(50, seed=0)
    worst = -np.inf
    for k, state in enumerate(states):
        result = optimize(state, restarts=32, budget=5000, seed=0)
        worst = max(worst, result.improvement - result.slack)
        if result.improvement > result.slack + 1e-6:
            report(10, False, "!!! CONTROLLED-PHASE BASELINE BEATEN BEYOND THE SLACK !!! "
                              f"state #{k} {state.coefficients}: {result.to_dict()}")
            pytest.fail(f"violation at state #{k}")
    assert report(10, True, f"states=50 restarts=32 budget=5000 max(improvement-slack)={worst:.3e}")
