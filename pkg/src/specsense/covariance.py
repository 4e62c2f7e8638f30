"""Sample covariance estimation: batch form and a single-pass streaming
accumulator equivalent to it within 1e-12.

The streaming path mirrors a hardware pipeline that sees one sample per
clock: a window of the last n samples slides along the stream and each new
complete window rank-1-updates the running triangle sums. Compensated
(Neumaier) accumulation keeps million-vector runs accurate in float64.
"""

from __future__ import annotations

import math

import numpy as np

from ._kernels import accumulate_samples
from .core import CovMatrix, SensingSegment
from .errors import EmptyAccumulatorError, NonFiniteSampleError


def sample_covariance(segment: SensingSegment, demean: bool = False) -> CovMatrix:
    """(1/ns) * sum of outer products of the segment's vectors.

    The mean is not subtracted by default (signals are modeled zero-mean);
    pass demean=True for captures with DC offset.
    """
    X = segment.data_matrix()
    if demean:
        X = X - X.mean(axis=0, keepdims=True)
    G = (X.T @ X) / segment.ns
    return CovMatrix(values=G, vector_count=segment.ns)


class CovAccumulator:
    """Single-writer streaming covariance builder.

    push() one sample at a time (or extend() with a batch); once n samples
    have arrived, every stride-th sample completes a vector. finalize() may
    be called repeatedly and does not disturb the accumulation.
    """

    def __init__(self, n: int, stride: int = 1):
        if n < 1:
            raise ValueError(f"vector length must be >= 1, got {n}")
        if stride < 1:
            raise ValueError(f"stride must be >= 1, got {stride}")
        self.n = n
        self.stride = stride
        self._window = np.zeros(n)
        self._sums = np.zeros((n, n))
        self._comps = np.zeros((n, n))
        self._seen = 0
        self.vectors_seen = 0

    def push(self, sample: float) -> None:
        if not math.isfinite(sample):
            raise NonFiniteSampleError(self._seen)
        self._seen, added = accumulate_samples(
            np.array([sample], dtype=np.float64),
            self._window, self._sums, self._comps, self._seen, self.stride,
        )
        self.vectors_seen += added

    def extend(self, samples: np.ndarray) -> None:
        samples = np.asarray(samples, dtype=np.float64).ravel()
        finite = np.isfinite(samples)
        if not finite.all():
            raise NonFiniteSampleError(self._seen + int(np.argmin(finite)))
        self._seen, added = accumulate_samples(
            samples, self._window, self._sums, self._comps, self._seen, self.stride,
        )
        self.vectors_seen += added

    def finalize(self) -> CovMatrix:
        if self.vectors_seen < 1:
            raise EmptyAccumulatorError()
        total = (self._sums + self._comps) / self.vectors_seen
        return CovMatrix(values=np.triu(total), vector_count=self.vectors_seen)
