"""Domain types shared by every module.

All types are immutable after construction (arrays are marked read-only) and
safe to share across concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    DetectorMismatchError,
    NonFiniteSampleError,
    TooShortError,
)

EC = "EC"
EC_AVG = "EC_AVG"
MME = "MME"
CAV = "CAV"
FTM = "FTM"
DETECTOR_IDS = (EC, EC_AVG, MME, CAV, FTM)

H0 = "H0"
H1 = "H1"


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


def canonicalize_sign(values: np.ndarray) -> np.ndarray:
    """Flip sign so the largest-magnitude component is non-negative.

    Eigenvector sign is not identified by the math; this fixes one
    representative so persisted features compare equal. Idempotent.
    """
    values = np.asarray(values, dtype=np.float64)
    pivot = int(np.argmax(np.abs(values)))
    if values[pivot] < 0:
        return -values
    return values.copy()


@dataclass(frozen=True)
class SampleStream:
    """Real-valued receiver samples; sample_period is informational only."""

    samples: np.ndarray
    sample_period: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "samples", _readonly(np.ravel(self.samples)))

    def __len__(self) -> int:
        return self.samples.shape[0]


def validate_stream(stream: SampleStream, n: int | None = None, ns: int | None = None) -> None:
    """Raise on the first invariant violation; return silently when valid.

    With (n, ns) given, also checks that at least one sensing segment of
    ns stride-1 vectors of length n fits: len >= n + ns - 1.
    """
    finite = np.isfinite(stream.samples)
    if not finite.all():
        raise NonFiniteSampleError(int(np.argmin(finite)))
    if n is not None and ns is not None:
        required = n + ns - 1
        if len(stream) < required:
            raise TooShortError(required, len(stream))


@dataclass(frozen=True)
class SensingSegment:
    """ns overlapping vectors of n consecutive samples, starting at start_index.

    Vector i is samples[start_index + i*stride : ... + n]; the default
    stride of 1 gives maximally overlapping windows.
    """

    stream: SampleStream
    n: int
    ns: int
    start_index: int = 0
    stride: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"vector length must be >= 2, got {self.n}")
        if self.ns < 1:
            raise ValueError(f"vector count must be >= 1, got {self.ns}")
        if self.start_index < 0:
            raise ValueError(f"start_index must be >= 0, got {self.start_index}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        required = self.start_index + (self.ns - 1) * self.stride + self.n
        if len(self.stream) < required:
            raise TooShortError(required, len(self.stream))

    def data_matrix(self) -> np.ndarray:
        """(ns, n) view of the segment's vectors; no copy for stride 1."""
        lo = self.start_index
        hi = self.start_index + (self.ns - 1) * self.stride + self.n
        windows = sliding_window_view(self.stream.samples[lo:hi], self.n)
        return windows[:: self.stride][: self.ns]


def segment_stream(stream: SampleStream, n: int, ns: int, count: int | None = None,
                   stride: int = 1) -> list[SensingSegment]:
    """Split a stream into as many consecutive non-overlapping segments as fit.

    Segments are back to back in vector index (segment k starts at vector
    k*ns), mirroring how a receiver would chop a continuous capture.
    """
    span = (ns - 1) * stride + n
    segments = []
    k = 0
    while count is None or k < count:
        start = k * ns * stride
        if start + span > len(stream):
            break
        segments.append(SensingSegment(stream, n=n, ns=ns, start_index=start, stride=stride))
        k += 1
    return segments


@dataclass(frozen=True)
class CovMatrix:
    """n x n sample covariance; exactly symmetric by mirroring one triangle."""

    values: np.ndarray
    vector_count: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"covariance must be square, got shape {v.shape}")
        mirrored = np.triu(v) + np.triu(v, 1).T
        object.__setattr__(self, "values", _readonly(mirrored))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def min_eigenvalue_bound(self) -> float:
        """PSD slack: matrices built here satisfy lam_min >= -1e-9 * max(1, lam_max)."""
        w = np.linalg.eigvalsh(self.values)
        return float(w[0] + 1e-9 * max(1.0, w[-1]))


@dataclass(frozen=True)
class Feature:
    """Unit-norm, sign-canonical n-vector (a leading eigenvector)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        nrm = float(np.linalg.norm(v))
        if not math.isfinite(nrm) or abs(nrm - 1.0) > 1e-9:
            raise ValueError(f"feature must be unit norm within 1e-9, got norm {nrm!r}")
        object.__setattr__(self, "values", _readonly(canonicalize_sign(v)))

    @classmethod
    def from_vector(cls, values: np.ndarray) -> "Feature":
        """Normalize an arbitrary nonzero vector into a Feature."""
        v = np.asarray(values, dtype=np.float64).ravel()
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0 or not math.isfinite(nrm):
            raise ValueError("cannot build a feature from a zero or non-finite vector")
        return cls(v / nrm)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class EigenSystem:
    """Full decomposition: eigenvalues descending, eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _readonly(np.ravel(self.eigenvalues)))
        object.__setattr__(self, "eigenvectors", _readonly(self.eigenvectors))

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def feature(self, k: int = 0) -> Feature:
        return Feature.from_vector(self.eigenvectors[:, k])


@dataclass(frozen=True)
class DetectorStatistic:
    """Scalar test statistic tagged with the detector that produced it."""

    detector_id: str
    value: float
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.detector_id not in DETECTOR_IDS:
            raise ValueError(f"unknown detector id {self.detector_id!r}")
        if not math.isfinite(self.value):
            raise ValueError(f"statistic must be finite, got {self.value!r}")


@dataclass(frozen=True)
class Threshold:
    """Decision threshold gamma calibrated for a target false-alarm rate."""

    detector_id: str
    gamma: float
    target_pf: float
    calibration_trials: int

    def __post_init__(self):
        if self.detector_id not in DETECTOR_IDS:
            raise ValueError(f"unknown detector id {self.detector_id!r}")
        if not 0.0 < self.target_pf < 1.0:
            raise ValueError(f"target_pf must be in (0, 1), got {self.target_pf}")
        needed = math.ceil(10.0 / self.target_pf)
        if self.calibration_trials < needed:
            raise ValueError(
                f"calibration_trials={self.calibration_trials} too few for "
                f"target_pf={self.target_pf}; need >= {needed} for tail mass"
            )


def decide(stat: DetectorStatistic, threshold: Threshold) -> str:
    """H1 iff the statistic strictly exceeds gamma; ties go to H0."""
    if stat.detector_id != threshold.detector_id:
        raise DetectorMismatchError(stat.detector_id, threshold.detector_id)
    return H1 if stat.value > threshold.gamma else H0
