import numpy as np
import pytest

from specsense import CovAccumulator, SampleStream, SensingSegment, sample_covariance
from specsense.errors import EmptyAccumulatorError, NonFiniteSampleError


def kahan_reference(stream: np.ndarray, n: int, ns: int) -> np.ndarray:
    """Fixed-order compensated summation oracle: full-matrix Neumaier over
    the same vector sequence the accumulator sees."""
    sums = np.zeros((n, n))
    comps = np.zeros((n, n))
    for i in range(ns):
        outer = np.outer(stream[i:i + n], stream[i:i + n])
        for a in range(n):
            for b in range(n):
                x = outer[a, b]
                t = sums[a, b] + x
                if abs(sums[a, b]) >= abs(x):
                    comps[a, b] += (sums[a, b] - t) + x
                else:
                    comps[a, b] += (x - t) + sums[a, b]
                sums[a, b] = t
    return (sums + comps) / ns


class TestSampleCovariance:
    def test_zero_stream_gives_zero_matrix(self):
        seg = SensingSegment(SampleStream(np.zeros(20)), n=4, ns=17)
        np.testing.assert_array_equal(sample_covariance(seg).values, np.zeros((4, 4)))

    def test_single_vector_outer_product(self):
        seg = SensingSegment(SampleStream(np.array([1.0, 0.0])), n=2, ns=1)
        np.testing.assert_array_equal(
            sample_covariance(seg).values, [[1.0, 0.0], [0.0, 0.0]]
        )

    def test_ar1_matches_closed_form_autocovariance(self, rng):
        # x[k] = a x[k-1] + e[k], unit innovations: gamma(l) = a^l / (1 - a^2).
        # Cross-checked against a scalar lag-autocorrelation estimate.
        a, n, ns = 0.9, 8, 100_000
        e = rng.standard_normal(ns + n + 500)
        x = np.empty(e.shape[0])
        x[0] = e[0]
        for k in range(1, e.shape[0]):
            x[k] = a * x[k - 1] + e[k]
        x = x[500:]
        cov = sample_covariance(SensingSegment(SampleStream(x), n=n, ns=ns)).values
        gamma = a ** np.arange(n) / (1 - a * a)
        for i in range(n):
            for j in range(n):
                expected = gamma[abs(i - j)]
                assert abs(cov[i, j] - expected) <= 0.05 * expected
        # independent scalar estimate of lag-1 autocorrelation
        lag1 = float(x[:-1] @ x[1:] / (x.shape[0] - 1))
        assert abs(cov[0, 1] - lag1) <= 0.05 * lag1

    def test_symmetry_exact(self, rng):
        stream = SampleStream(rng.standard_normal(400))
        cov = sample_covariance(SensingSegment(stream, n=16, ns=300)).values
        assert np.array_equal(cov, cov.T)

    def test_demean_removes_dc_offset(self, rng):
        base = rng.standard_normal(2000)
        seg = SensingSegment(SampleStream(base + 100.0), n=4, ns=1900)
        cov = sample_covariance(seg, demean=True).values
        assert abs(cov[0, 0] - 1.0) < 0.2  # offset gone, unit variance remains

    def test_scaling_by_c_scales_entries_by_c_squared(self, rng):
        base = rng.standard_normal(500)
        for c in (2.0, 3.7):
            cov1 = sample_covariance(SensingSegment(SampleStream(base), n=8, ns=400)).values
            cov2 = sample_covariance(SensingSegment(SampleStream(c * base), n=8, ns=400)).values
            np.testing.assert_allclose(cov2, c * c * cov1, rtol=1e-12)

    def test_white_noise_offdiag_shrinks_like_inverse_sqrt_ns(self, rng):
        n = 8
        mags = {}
        for ns in (1_000, 100_000):
            stream = SampleStream(rng.standard_normal(ns + n - 1))
            cov = sample_covariance(SensingSegment(stream, n=n, ns=ns)).values
            off = cov[~np.eye(n, dtype=bool)]
            mags[ns] = np.mean(np.abs(off))
        ratio = mags[1_000] / mags[100_000]
        assert 3.0 < ratio < 33.0  # ideal sqrt(100) = 10, generous statistical band


class TestCovAccumulator:
    def test_window_not_full_means_no_vectors(self):
        acc = CovAccumulator(n=5)
        for v in range(4):
            acc.push(float(v))
        assert acc.vectors_seen == 0

    def test_exactly_n_samples_completes_first_vector(self):
        acc = CovAccumulator(n=5)
        for v in range(5):
            acc.push(float(v))
        assert acc.vectors_seen == 1

    def test_finalize_before_any_vector_raises(self):
        with pytest.raises(EmptyAccumulatorError):
            CovAccumulator(n=3).finalize()

    def test_single_sample_variance(self):
        acc = CovAccumulator(n=1)
        acc.push(2.0)
        np.testing.assert_array_equal(acc.finalize().values, [[4.0]])

    def test_non_finite_sample_rejected(self):
        acc = CovAccumulator(n=3)
        with pytest.raises(NonFiniteSampleError):
            acc.push(float("nan"))
        with pytest.raises(NonFiniteSampleError):
            acc.extend(np.array([1.0, np.inf]))

    def test_streaming_equals_batch_within_1e12(self, rng):
        n, ns = 8, 2000
        stream = rng.standard_normal(n + ns - 1)
        acc = CovAccumulator(n=n)
        for v in stream:
            acc.push(float(v))
        assert acc.vectors_seen == ns
        batch = sample_covariance(SensingSegment(SampleStream(stream), n=n, ns=ns)).values
        assert np.max(np.abs(acc.finalize().values - batch)) <= 1e-12

    @pytest.mark.parametrize("n", [2, 4, 8, 32])
    @pytest.mark.parametrize("ns", [1, 10, 1000])
    def test_streaming_batch_equivalence_sweep(self, rng, n, ns):
        stream = rng.standard_normal(n + ns - 1)
        acc = CovAccumulator(n=n)
        acc.extend(stream)
        batch = sample_covariance(SensingSegment(SampleStream(stream), n=n, ns=ns)).values
        scale = max(1.0, np.max(np.abs(batch)))
        assert np.max(np.abs(acc.finalize().values - batch)) <= 1e-12 * scale

    def test_bit_for_bit_against_fixed_order_oracle(self, rng):
        n, ns = 4, 50
        stream = rng.standard_normal(n + ns - 1)
        acc = CovAccumulator(n=n)
        acc.extend(stream)
        expected = kahan_reference(stream, n, ns)
        got = acc.finalize().values
        # same per-entry operation sequence -> identical bits
        assert np.array_equal(got[np.triu_indices(n)], expected[np.triu_indices(n)])

    def test_push_and_extend_agree_bitwise(self, rng):
        stream = rng.standard_normal(64)
        one = CovAccumulator(n=6)
        two = CovAccumulator(n=6)
        one.extend(stream)
        for v in stream:
            two.push(float(v))
        assert np.array_equal(one.finalize().values, two.finalize().values)

    def test_stride_matches_strided_segment(self, rng):
        n, ns, stride = 4, 20, 3
        stream = rng.standard_normal(n + (ns - 1) * stride)
        acc = CovAccumulator(n=n, stride=stride)
        acc.extend(stream)
        assert acc.vectors_seen == ns
        seg = SensingSegment(SampleStream(stream), n=n, ns=ns, stride=stride)
        batch = sample_covariance(seg).values
        assert np.max(np.abs(acc.finalize().values - batch)) <= 1e-12

    def test_finalize_is_repeatable_and_nondestructive(self, rng):
        acc = CovAccumulator(n=3)
        acc.extend(rng.standard_normal(10))
        first = acc.finalize().values
        np.testing.assert_array_equal(first, acc.finalize().values)
        acc.push(1.0)
        assert acc.vectors_seen == 9
