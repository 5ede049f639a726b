import numpy as np
import pytest

from edss.bell import BellDiagonalState
from edss.core import DensityMatrix, PauliWord, hermitian_spectrum, partial_trace, partial_transpose, random_state
from edss.noise import (
    BELL_PAIR,
    CSV_HEADER,
    NoiseChannel,
    NoiseKind,
    apply,
    bisect_threshold,
    compare,
    direct_threshold,
    direct_threshold_trace,
    edss_threshold,
    edss_threshold_trace,
    rho_suc_threshold,
    to_csv,
)
from edss.protocol import half_fidelity_resource

OPTIMUM = BellDiagonalState(0.5, 0.25, 0.25)


@pytest.mark.parametrize("kind", list(NoiseKind))
@pytest.mark.parametrize("q", [0.0, 0.3, 0.5, 1.0])
def test_channels_preserve_trace(kind, q):
    assert NoiseChannel.make(kind, q).is_trace_preserving()


def test_channel_rejects_bad_strength():
    with pytest.raises(ValueError):
        NoiseChannel.make("depolarizing", 1.5)
    with pytest.raises(ValueError):
        NoiseChannel(NoiseKind.DEPOLARIZING, 0.1, ((0.5, PauliWord.from_string("I")),))


def test_depolarizing_formula(rng):
    rho = random_state(("A",), rng)
    q = 0.37
    x, y, z = (PauliWord.from_string(c).matrix() for c in "XYZ")
    expected = (1 - 3 * q / 4) * rho.data + q / 4 * (x @ rho.data @ x + y @ rho.data @ y + z @ rho.data @ z)
    np.testing.assert_allclose(apply(NoiseChannel.make("depolarizing", q), rho, "A").data, expected, atol=1e-15)


def test_zero_noise_is_identity(rng):
    rho = random_state(("C", "A", "B"), rng)
    for kind in NoiseKind:
        np.testing.assert_allclose(apply(NoiseChannel.make(kind, 0.0), rho, "A").data, rho.data, atol=1e-15)


def test_full_depolarization_of_one_qubit(rng):
    a, b = random_state(("A",), rng), random_state(("B",), rng)
    rho = DensityMatrix(np.kron(a.data, b.data), ("A", "B"))
    out = apply(NoiseChannel.make("depolarizing", 1.0), rho, "A")
    np.testing.assert_allclose(partial_trace(out, ["B"]).data, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(partial_trace(out, ["A"]).data, b.data, atol=1e-15)


def test_half_phase_flip_disentangles_a_bell_pair():
    out = apply(NoiseChannel.make("phase_flip", 0.5), BELL_PAIR, "B")
    assert hermitian_spectrum(partial_transpose(out, ["A"])).min == pytest.approx(0.0, abs=1e-15)


def test_apply_bad_label():
    with pytest.raises(ValueError):
        apply(NoiseChannel.make("phase_flip", 0.1), BELL_PAIR, "C")


def test_bisection_on_a_step():
    t = bisect_threshold(lambda q: q < 0.3)
    assert t.q_star == pytest.approx(0.3, abs=1e-8) and t.monotone
    assert bisect_threshold(lambda q: False).q_star == 0.0
    assert bisect_threshold(lambda q: True).q_star == 1.0


def test_non_monotone_trace_is_flagged():
    from edss.noise import Threshold

    assert not Threshold(0.5, ((0.0, True), (0.3, False), (0.5, True), (1.0, False))).monotone
    assert Threshold(0.5, ((0.0, True), (0.5, True), (1.0, False))).monotone


def test_direct_thresholds():
    assert direct_threshold("depolarizing") == pytest.approx(2 / 3, abs=1e-6)
    assert direct_threshold("phase_flip") == pytest.approx(0.5, abs=1e-6)
    assert direct_threshold_trace("depolarizing").trace[0] == (0.0, True)


def test_edss_threshold_at_the_optimum():
    t = edss_threshold_trace(OPTIMUM, "depolarizing")
    assert t.q_star == pytest.approx(0.5, abs=1e-6) and t.monotone
    assert edss_threshold(OPTIMUM, "phase_flip") == pytest.approx(0.5, abs=1e-6)


def test_edss_threshold_shrinks_with_s():
    assert edss_threshold(half_fidelity_resource(0.02), "depolarizing") == pytest.approx(0.04 / 1.04, abs=1e-6)


def test_edss_threshold_needs_s11():
    with pytest.raises(ValueError, match="s11"):
        edss_threshold(BellDiagonalState(0.5, 0.5, 0.0), "depolarizing")


def test_negative_branch_threshold():
    # sending A for the mirrored resource tolerates what sending the localized pair did
    t = edss_threshold(BellDiagonalState(0.5, 0.25, -0.25), "depolarizing")
    assert 0 < t < 2 / 3


def test_compare_at_the_optimum():
    c = compare(OPTIMUM)
    assert c.direct_beats_edss and c.edss_beats_suc
    assert c.suc == pytest.approx(2 / 7, abs=1e-6)


def test_beyond_the_direct_threshold_everything_fails():
    q = 0.7
    from edss.noise import edss_tolerated, _is_npt

    assert not edss_tolerated(OPTIMUM, "depolarizing", q)
    assert not _is_npt(apply(NoiseChannel.make("depolarizing", q), BELL_PAIR, "B"), ["A"])


def test_rho_suc_threshold_needs_entanglement():
    with pytest.raises(ValueError):
        rho_suc_threshold(BellDiagonalState(0.5, 0.5, 0.0), "depolarizing")


def test_csv_rows():
    text = to_csv([compare(OPTIMUM)])
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1].startswith("0.5,0.25,0.25,depolarizing,")
