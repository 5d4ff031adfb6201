import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twophoton import (
    CANONICAL, ContractViolation, EmptyResultError, PairSourceSpec, TagStream,
    apply_local, circular_basis, correlation, estimate_statistics,
    generate_streams, joint_distribution, linear_basis, make_singlet,
    match_coincidences, paper_qwp, read_tag_stream, write_tag_stream,
)
from twophoton.coincidence import CoincidenceResult, format_tag_stream, parse_tag_stream
from twophoton.measure import sample_counts

IDEAL = PairSourceSpec(pair_rate=5000.0)


def result_from_counts(counts):
    counts = np.array(counts)
    return CoincidenceResult(counts, counts.sum(axis=1), counts.sum(axis=0), 0.0, 1e-9, 1.0,
                             np.zeros((0, 2), dtype=int))


class TestGenerateStreams:
    def test_lossless_noiseless(self):
        sa, sb = generate_streams(make_singlet(), CANONICAL, CANONICAL, IDEAL, 1.0, seed=3)
        assert len(sa) == len(sb) > 0
        np.testing.assert_array_equal(sa.timestamps, sb.timestamps)
        assert sa.is_sorted and sb.is_sorted

    def test_singlet_channels_anticorrelated(self):
        sa, sb = generate_streams(make_singlet(), CANONICAL, CANONICAL, IDEAL, 1.0, seed=3)
        assert np.all(sa.channels != sb.channels)

    @pytest.mark.parametrize("eta", [1.0, 0.8, 0.3])
    def test_poisson_thinning(self, eta):
        rate, T = 20_000.0, 2.0
        src = PairSourceSpec(pair_rate=rate, efficiency_a=eta, efficiency_b=eta)
        sa, sb = generate_streams(make_singlet(), CANONICAL, CANONICAL, src, T, seed=21)
        mean = rate * T * eta
        # Poisson(rT) thinned by eta is Poisson(rT eta): sd = sqrt(mean)
        assert abs(len(sa) - mean) <= 4 * np.sqrt(mean)
        assert abs(len(sb) - mean) <= 4 * np.sqrt(mean)

    def test_dark_counts_rate(self):
        src = PairSourceSpec(pair_rate=0.0, dark_rate_a=3000.0, dark_rate_b=0.0)
        sa, sb = generate_streams(make_singlet(), CANONICAL, CANONICAL, src, 2.0, seed=5)
        assert abs(len(sa) - 6000) <= 4 * np.sqrt(6000)
        assert len(sb) == 0

    def test_deterministic(self):
        src = PairSourceSpec(1000.0, 0.7, 0.9, 1e-9, 50.0, 50.0)
        s1 = generate_streams(make_singlet(), CANONICAL, circular_basis(), src, 1.0, 8)
        s2 = generate_streams(make_singlet(), CANONICAL, circular_basis(), src, 1.0, 8)
        assert s1[0].equals(s2[0]) and s1[1].equals(s2[1])

    def test_rejects_bad_duration(self):
        with pytest.raises(ContractViolation):
            generate_streams(make_singlet(), CANONICAL, CANONICAL, IDEAL, 0.0, 1)

    @pytest.mark.parametrize("kw", [{"pair_rate": -1.0}, {"pair_rate": 1.0, "efficiency_a": 1.5},
                                    {"pair_rate": 1.0, "jitter_sigma": float("nan")}])
    def test_source_validation(self, kw):
        with pytest.raises(ContractViolation):
            PairSourceSpec(**kw)


class TestMatch:
    def test_disjoint_ranges(self):
        sa = TagStream("A", [0.0, 1.0, 2.0], [0, 1, 0])
        sb = TagStream("B", [10.0, 11.0], [0, 1])
        assert match_coincidences(sa, sb, 0.5).total == 0

    def test_two_a_events_near_one_b(self):
        sa = TagStream("A", [1.0, 1.2], [0, 1])
        sb = TagStream("B", [1.1], [1])
        r = match_coincidences(sa, sb, 0.5)
        assert r.total == 1
        assert r.pairs.tolist() == [[0, 0]]
        assert r.counts.tolist() == [[0, 1], [0, 0]]

    def test_window_is_inclusive(self):
        r = match_coincidences(TagStream("A", [0.0], [0]), TagStream("B", [0.5], [0]), 0.5)
        assert r.total == 1

    def test_unsorted_rejected(self):
        sa = TagStream("A", [2.0, 1.0], [0, 0])
        with pytest.raises(ContractViolation):
            match_coincidences(sa, TagStream("B", [1.0], [0]), 0.1)

    def test_rejects_bad_window(self):
        s = TagStream("A", [1.0], [0])
        with pytest.raises(ContractViolation):
            match_coincidences(s, TagStream("B", [1.0], [0]), 0.0)

    def test_accidentals_formula(self):
        sa = TagStream("A", [0.1, 0.3, 0.5, 0.7], [0, 0, 1, 1])
        sb = TagStream("B", [0.2, 0.9], [0, 1])
        r = match_coincidences(sa, sb, 1e-3, duration=2.0)
        # 2 tau R_A R_B T with R_A = 4/2, R_B = 2/2
        assert r.accidentals_estimate == pytest.approx(2 * 1e-3 * 2.0 * 1.0 * 2.0)

    def test_counts_bounded_by_stream_sizes(self):
        src = PairSourceSpec(2000.0, 0.6, 0.9, 2e-9, 500.0, 500.0)
        sa, sb = generate_streams(make_singlet(), CANONICAL, CANONICAL, src, 1.0, 2)
        r = match_coincidences(sa, sb, 5e-9)
        assert r.total <= min(len(sa), len(sb))
        assert r.singles_a.sum() == len(sa) and r.singles_b.sum() == len(sb)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0, 100, allow_nan=False), max_size=40, unique=True),
           st.lists(st.floats(0, 100, allow_nan=False), max_size=40, unique=True),
           st.floats(0.01, 5), st.floats(0.01, 5))
    def test_injective_and_monotone(self, ta, tb, w1, w2):
        sa = TagStream("A", sorted(ta), [0] * len(ta))
        sb = TagStream("B", sorted(tb), [1] * len(tb))
        small, large = sorted((w1, w2))
        r1 = match_coincidences(sa, sb, small)
        r2 = match_coincidences(sa, sb, large)
        for r in (r1, r2):
            assert len(set(r.pairs[:, 0])) == len(r.pairs)
            assert len(set(r.pairs[:, 1])) == len(r.pairs)
            dt = sa.timestamps[r.pairs[:, 0]] - sb.timestamps[r.pairs[:, 1]]
            assert np.all(np.abs(dt) <= r.window)
        assert r2.total >= r1.total

    def test_end_to_end_proportional_to_joint_table(self):
        state = apply_local(make_singlet(), paper_qwp("A"))
        a, b = circular_basis(), CANONICAL
        src = PairSourceSpec(100_000.0, jitter_sigma=1e-10)
        sa, sb = generate_streams(state, a, b, src, 1.0, 77)
        r = match_coincidences(sa, sb, 1e-9)
        n = r.total
        p = joint_distribution(state, a, b).p
        sigma = np.sqrt(p * (1 - p) / n)
        assert np.all(np.abs(r.counts / n - p) <= 4 * sigma + 1e-12)


class TestNoiselessFidelity:
    @pytest.mark.parametrize("basis_b", [CANONICAL, circular_basis(), linear_basis(0.3)])
    def test_matches_sampler_exactly(self, basis_b):
        state = apply_local(make_singlet(), paper_qwp("A"))
        sa, sb = generate_streams(state, CANONICAL, basis_b, IDEAL, 2.0, seed=31)
        r = match_coincidences(sa, sb, 1e-12)
        assert r.total == len(sa)
        np.testing.assert_array_equal(r.counts, sample_counts(state, CANONICAL, basis_b, len(sa), 31))


class TestEstimate:
    def test_perfect_anticorrelation(self):
        est = estimate_statistics(result_from_counts([[0, 500], [500, 0]]))
        assert est.correlation == -1
        np.testing.assert_array_equal(est.frequencies, [[0, 0.5], [0.5, 0]])

    def test_uniform(self):
        assert estimate_statistics(result_from_counts([[250, 250], [250, 250]])).correlation == 0

    def test_empty(self):
        with pytest.raises(EmptyResultError):
            estimate_statistics(result_from_counts([[0, 0], [0, 0]]))

    def test_standard_errors(self):
        est = estimate_statistics(result_from_counts([[100, 300], [300, 300]]))
        assert est.frequency_errors[0, 0] == pytest.approx(np.sqrt(0.1 * 0.9 / 1000))
        assert est.correlation == pytest.approx(-0.2)
        assert est.correlation_error == pytest.approx(np.sqrt((1 - 0.2 ** 2) / 1000))

    @pytest.mark.parametrize("pairs", [10_000, 100_000])
    def test_statistical_consistency(self, pairs):
        state = make_singlet()
        a, b = linear_basis(0.0), linear_basis(np.pi / 8)
        src = PairSourceSpec(float(pairs), 0.8, 0.8, 1e-9, 100.0, 100.0)
        sa, sb = generate_streams(state, a, b, src, 1.0, seed=pairs)
        est = estimate_statistics(match_coincidences(sa, sb, 5e-9))
        assert abs(est.correlation - correlation(state, a, b)) <= 4 * est.correlation_error

    def test_singlet_full_pipeline(self):
        state = make_singlet()
        sa, sb = generate_streams(state, CANONICAL, CANONICAL, PairSourceSpec(100_000.0), 1.0, 4)
        est = estimate_statistics(match_coincidences(sa, sb, 1e-9))
        assert abs(est.correlation - (-1)) <= 4 * est.correlation_error


class TestCsvFormat:
    def test_round_trip_bit_exact(self, tmp_path):
        src = PairSourceSpec(3000.0, 0.9, 0.9, 1e-9, 200.0, 200.0)
        sa, _ = generate_streams(make_singlet(), CANONICAL, CANONICAL, src, 1.0, 6)
        path = tmp_path / "a.csv"
        write_tag_stream(sa, path)
        back = read_tag_stream(path)
        assert back.equals(sa)
        assert path.read_text().splitlines()[0] == "# station=A"

    def test_lines(self):
        text = format_tag_stream(TagStream("B", [0.1, 2.5e-9], [1, 0]))
        assert text == "# station=B\n0.1,1\n2.5e-09,0\n"

    def test_missing_header(self):
        with pytest.raises(ContractViolation):
            parse_tag_stream("0.1,1\n")

    def test_bad_line(self):
        with pytest.raises(ContractViolation, match="line 3"):
            parse_tag_stream("# station=A\n0.1,1\nxyz\n")
