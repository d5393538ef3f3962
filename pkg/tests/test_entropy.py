import math

import numpy as np
import pytest

from rampho.entropy import (
    EPSILON,
    PRISTINE_SNR_DB,
    SweepResult,
    SweepRow,
    aggregate_trace,
    compute_crossovers,
    find_crossovers,
    frame_entropy,
    softmax,
)
from rampho.errors import (
    AllFramesExcludedError,
    DegenerateFrameError,
    InsufficientDataError,
)
from rampho.logits import LogitsMatrix, default_manifest


def entropy_oracle(probs, blank_index):
    """Brute-force reference in extended precision: renormalize the
    non-blank mass, then sum -q*log2(q + eps) term by term."""
    probs = np.asarray(probs, dtype=np.longdouble)
    active = [p for i, p in enumerate(probs) if i != blank_index]
    total = np.longdouble(0)
    for p in active:
        total += p
    h = np.longdouble(0)
    for p in active:
        q = p / total
        h -= q * np.log2(q + np.longdouble(EPSILON))
    return float(max(h, np.longdouble(0)))


class TestSoftmax:
    def test_uniform(self):
        out = softmax(np.zeros(32))
        np.testing.assert_allclose(out, 1 / 32, rtol=1e-15)

    def test_sums_to_one_and_is_stable_for_huge_logits(self):
        rng = np.random.default_rng(0)
        row = rng.normal(scale=1000.0, size=1000)
        out = softmax(row)
        assert np.all(np.isfinite(out))
        assert np.sum(out) == pytest.approx(1.0, abs=1e-12)
        assert np.argmax(out) == np.argmax(row)

    def test_shift_invariance(self):
        rng = np.random.default_rng(1)
        row = rng.normal(size=64)
        np.testing.assert_allclose(softmax(row), softmax(row + 123.456), atol=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            softmax(np.array([0.0, np.inf]))


class TestFrameEntropy:
    def test_uniform_31(self):
        probs = np.full(32, 1 / 32)
        assert frame_entropy(probs, 0) == pytest.approx(math.log2(31), rel=1e-9)

    def test_one_hot_is_zero(self):
        probs = np.zeros(32)
        probs[5] = 1.0
        assert frame_entropy(probs, 0) == 0.0

    def test_two_equal_actives_give_one_bit_at_any_blank_mass(self):
        for blank in (0.0, 0.25, 0.9, 0.999):
            active = (1.0 - blank) / 2.0
            probs = np.array([blank, active, active])
            assert frame_entropy(probs, 0) == pytest.approx(1.0, abs=1e-9)

    def test_matches_oracle_on_random_distributions(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            size = int(rng.integers(2, 40))
            probs = rng.uniform(1e-8, 1.0, size)
            probs /= probs.sum()
            blank = int(rng.integers(0, size))
            got = frame_entropy(probs, blank)
            want = entropy_oracle(probs, blank)
            assert got == pytest.approx(want, abs=1e-9)

    def test_blank_mass_does_not_change_entropy(self):
        rng = np.random.default_rng(3)
        active = rng.uniform(0.01, 1.0, 31)
        values = []
        for blank in (1e-5, 0.3, 0.99):
            probs = np.concatenate([[blank], active / active.sum() * (1 - blank)])
            values.append(frame_entropy(probs, 0))
        assert max(values) - min(values) < 1e-9

    def test_permutation_invariance(self):
        rng = np.random.default_rng(4)
        probs = rng.uniform(0.01, 1.0, 32)
        probs /= probs.sum()
        shuffled = probs.copy()
        shuffled[1:] = rng.permutation(probs[1:])
        assert frame_entropy(probs, 0) == pytest.approx(
            frame_entropy(shuffled, 0), abs=1e-12
        )

    def test_degenerate_active_mass(self):
        probs = np.zeros(32)
        probs[0] = 1.0
        with pytest.raises(DegenerateFrameError):
            frame_entropy(probs, 0)

    def test_logit_shift_end_to_end(self):
        rng = np.random.default_rng(5)
        row = rng.normal(size=32)
        h0 = frame_entropy(softmax(row), 0)
        h1 = frame_entropy(softmax(row + 57.0), 0)
        assert h1 == pytest.approx(h0, abs=1e-9)


def matrix_from_logits(rows):
    return LogitsMatrix(np.asarray(rows, dtype=np.float32), default_manifest())


class TestAggregateTrace:
    def test_uniform_rows(self):
        trace = aggregate_trace(matrix_from_logits(np.zeros((20, 32))))
        assert trace.mean_bits == pytest.approx(math.log2(31), rel=1e-6)
        assert trace.median_bits == trace.mean_bits
        assert trace.normalized_mean == pytest.approx(1.0, rel=1e-6)
        assert trace.included_frames == 20
        assert trace.excluded_frames == 0

    def test_bimodal_mean_and_lower_median(self):
        peaked = np.zeros(32)
        peaked[5] = 100.0
        rows = [np.zeros(32)] * 10 + [peaked] * 10
        trace = aggregate_trace(matrix_from_logits(rows))
        # 10 frames at log2(31), 10 at ~0; even count takes the lower middle
        assert trace.mean_bits == pytest.approx(math.log2(31) / 2, rel=1e-6)
        assert trace.median_bits == pytest.approx(0.0, abs=1e-6)

    def test_blank_dominant_frame_is_excluded_but_reported(self):
        blankish = np.zeros(32)
        blankish[0] = 11.0  # blank prob ~0.9995, active mass still computable
        trace = aggregate_trace(matrix_from_logits([np.zeros(32), blankish]))
        assert trace.included_frames == 1
        assert trace.excluded_frames == 1
        assert np.isfinite(trace.frame_entropy_bits[1])
        assert trace.frame_blank_prob[1] > 0.999

    def test_degenerate_frame_is_nan(self):
        degenerate = np.zeros(32)
        degenerate[0] = 800.0  # exp(-800) underflows: no active mass at all
        trace = aggregate_trace(matrix_from_logits([np.zeros(32), degenerate]))
        assert np.isnan(trace.frame_entropy_bits[1])
        assert trace.excluded_frames == 1

    def test_all_frames_excluded(self):
        blankish = np.zeros(32)
        blankish[0] = 40.0
        with pytest.raises(AllFramesExcludedError):
            aggregate_trace(matrix_from_logits([blankish] * 4))

    @pytest.mark.parametrize("threshold", [0.0, -0.1, 1.0001])
    def test_threshold_validation(self, threshold):
        with pytest.raises(ValueError):
            aggregate_trace(matrix_from_logits(np.zeros((2, 32))), threshold)

    def test_matches_frame_entropy(self):
        rng = np.random.default_rng(6)
        rows = rng.normal(size=(40, 32))
        trace = aggregate_trace(matrix_from_logits(rows))
        for row, h in zip(rows, trace.frame_entropy_bits):
            assert h == pytest.approx(
                frame_entropy(softmax(row.astype(np.float32)), 0), abs=1e-6
            )


def sweep_result(curves, utterances=("u1",)):
    """Rows from {condition: [(snr, normalized_mean), ...]}."""
    scale = math.log2(31)
    rows = [
        SweepRow(cond, snr, utt, nm * scale, nm * scale, nm, 100, 5, -26.0, -26.0 - snr)
        for cond, pts in curves.items()
        for snr, nm in pts
        for utt in utterances
    ]
    return SweepResult(tuple(rows))


class TestSweepResult:
    def test_duplicate_rows_rejected(self):
        row = SweepRow("ENG", 0.0, "u1", 1.0, 1.0, 0.2, 10, 0, -26.0, -26.0)
        with pytest.raises(ValueError):
            SweepResult((row, row))

    def test_curve_averages_utterances(self):
        rows = (
            SweepRow("ENG", 0.0, "u1", 1.0, 1.0, 0.2, 10, 0, -26.0, -26.0),
            SweepRow("ENG", 0.0, "u2", 1.0, 1.0, 0.4, 10, 0, -26.0, -26.0),
        )
        assert SweepResult(rows).curve("ENG") == [(0.0, pytest.approx(0.3))]

    def test_curve_pristine_toggle(self):
        result = sweep_result({"ENG": [(0.0, 0.5), (PRISTINE_SNR_DB, 0.05)]})
        assert len(result.curve("ENG")) == 2
        assert result.curve("ENG", include_pristine=False) == [(0.0, 0.5)]


GRID = (0.0, 5.0, 10.0, 15.0, 20.0)


def line(lo, hi):
    return [(s, lo + (hi - lo) * s / 20.0) for s in GRID]


class TestCrossovers:
    def test_symmetric_lines_cross_at_ten(self):
        result = sweep_result({"ENG": line(0.8, 0.2), "CS": line(0.2, 0.8)})
        assert find_crossovers(result, ("ENG", "CS")) == 10.0

    def test_identical_curves_have_no_crossover(self):
        result = sweep_result({"ENG": line(0.8, 0.2), "CS": line(0.8, 0.2)})
        assert find_crossovers(result, ("ENG", "CS")) is None

    def test_touch_without_sign_change(self):
        a = [(0.0, 0.5), (10.0, 0.3), (20.0, 0.5)]
        b = [(0.0, 0.4), (10.0, 0.3), (20.0, 0.4)]
        result = sweep_result({"ENG": a, "CS": b})
        assert find_crossovers(result, ("ENG", "CS")) is None

    def test_plateau_crossing_reports_first_flat_point(self):
        a = [(0.0, 0.5), (5.0, 0.3), (10.0, 0.3), (15.0, 0.2)]
        b = [(0.0, 0.4), (5.0, 0.3), (10.0, 0.3), (15.0, 0.3)]
        result = sweep_result({"ENG": a, "CS": b})
        assert find_crossovers(result, ("ENG", "CS")) == 5.0

    def test_interpolated_fraction(self):
        a = [(0.0, 0.6), (5.0, 0.1)]
        b = [(0.0, 0.2), (5.0, 0.3)]
        # diff: +0.4 then -0.2, zero at t = 2/3 of the way
        result = sweep_result({"ENG": a, "CS": b})
        got = find_crossovers(result, ("ENG", "CS"))
        assert got == pytest.approx(5.0 * 2 / 3, rel=1e-12)

    def test_pristine_anchor_never_participates(self):
        a = line(0.8, 0.2) + [(PRISTINE_SNR_DB, 0.01)]
        b = line(0.2, 0.8) + [(PRISTINE_SNR_DB, 0.02)]
        result = sweep_result({"ENG": a, "CS": b})
        assert find_crossovers(result, ("ENG", "CS")) == 10.0

    def test_insufficient_common_grid(self):
        result = sweep_result({"ENG": [(0.0, 0.5)], "CS": [(0.0, 0.4)]})
        with pytest.raises(InsufficientDataError):
            find_crossovers(result, ("ENG", "CS"))

    def test_compute_crossovers_covers_all_pairs(self):
        result = sweep_result(
            {"ENG": line(0.8, 0.2), "CS": line(0.2, 0.8), "SSN": line(0.8, 0.2)}
        )
        points = compute_crossovers(result)
        assert set(points) == {("ENG", "CS"), ("ENG", "SSN"), ("CS", "SSN")}
        assert points[("ENG", "CS")] == 10.0
        assert points[("ENG", "SSN")] is None
        assert points[("CS", "SSN")] == 10.0

    def test_runtime_under_a_millisecond(self):
        import time

        result = sweep_result({"ENG": line(0.8, 0.2), "CS": line(0.2, 0.8)})
        find_crossovers(result, ("ENG", "CS"))  # warm imports and caches
        t0 = time.perf_counter()
        find_crossovers(result, ("ENG", "CS"))
        assert time.perf_counter() - t0 < 1e-3
