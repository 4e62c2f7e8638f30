import numpy as np
import pytest

from specsense import CovMatrix, PowerIterConfig, SampleStream, SensingSegment


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture
def fast_pi():
    """Iteration budget that converges on near-flat (noise-like) spectra."""
    return PowerIterConfig(max_iters=300_000, residual_tol=1e-8, seed=0)


def random_spd(rng: np.random.Generator, n: int, jitter: float = 1.0) -> CovMatrix:
    """SPD test matrix M'M + jitter*I."""
    m = rng.standard_normal((n, n))
    return CovMatrix(values=m.T @ m + jitter * np.eye(n), vector_count=0)


def noise_segment(rng: np.random.Generator, n: int, ns: int, sigma: float = 1.0) -> SensingSegment:
    stream = SampleStream(sigma * rng.standard_normal(n + ns - 1))
    return SensingSegment(stream, n=n, ns=ns)
