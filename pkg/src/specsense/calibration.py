"""Monte-Carlo threshold calibration and detection-probability estimation.

Thresholds are empirical (1 - pf) quantiles of the detector statistic over
independent noise-only segments: distribution-free, so the same procedure
covers every detector uniformly. Calibration and measurement draw from
disjoint seed spaces; each trial is a fresh independent segment keyed by
(seed, purpose, trial index), so trials may run in any order or in parallel
with identical aggregate results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from .core import SampleStream, SensingSegment, Threshold, decide, H1
from .covariance import sample_covariance
from .detectors import Detector
from .simgen import NoiseModel, SignalModel, generate


@dataclass(frozen=True)
class TrialConfig:
    """Shared Monte-Carlo run geometry."""

    n: int = 32
    ns: int = 10_000
    trials: int = 2000
    target_pf: float = 0.1
    seed: int = 1

    def __post_init__(self):
        if not 0.0 < self.target_pf < 1.0:
            raise ValueError(f"target_pf must be in (0, 1), got {self.target_pf}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")

    @property
    def stream_length(self) -> int:
        return self.n + self.ns - 1


@dataclass(frozen=True)
class CalibrationRun:
    """Sorted null statistics and the threshold they produced."""

    detector_id: str
    null_stats: np.ndarray
    threshold: Threshold

    def __post_init__(self):
        stats = np.sort(np.asarray(self.null_stats, dtype=np.float64))
        stats.setflags(write=False)
        object.__setattr__(self, "null_stats", stats)


def empirical_gamma(null_stats: np.ndarray, target_pf: float) -> float:
    """Order statistic at 1-based index ceil((1 - pf) * m) of the ascending sort."""
    stats = np.sort(np.asarray(null_stats, dtype=np.float64))
    m = stats.shape[0]
    idx = max(math.ceil((1.0 - target_pf) * m), 1)
    return float(stats[idx - 1])


def _noise_segment(noise: NoiseModel, cfg: TrialConfig, tag: int, trial: int) -> SensingSegment:
    rng = _rng.make_rng(cfg.seed, tag, trial)
    samples = math.sqrt(noise.sigma2) * rng.standard_normal(cfg.stream_length)
    return SensingSegment(SampleStream(samples), n=cfg.n, ns=cfg.ns)


def calibrate_many(
    detectors: dict[str, Detector], noise: NoiseModel, cfg: TrialConfig,
) -> dict[str, CalibrationRun]:
    """Calibrate several detectors against one shared set of null draws.

    Each trial's sample covariance is computed once and evaluated by every
    detector, which keeps large sweeps affordable without changing any
    single detector's null distribution.
    """
    stats: dict[str, list[float]] = {name: [] for name in detectors}
    for t in range(cfg.trials):
        seg = _noise_segment(noise, cfg, _rng.TAG_CALIBRATION, t)
        cov = sample_covariance(seg)
        for name, det in detectors.items():
            stats[name].append(det.statistic_from_cov(cov).value)
    out = {}
    for name, det in detectors.items():
        gamma = empirical_gamma(np.array(stats[name]), cfg.target_pf)
        out[name] = CalibrationRun(
            detector_id=det.detector_id,
            null_stats=np.array(stats[name]),
            threshold=Threshold(
                detector_id=det.detector_id,
                gamma=gamma,
                target_pf=cfg.target_pf,
                calibration_trials=cfg.trials,
            ),
        )
    return out


def calibrate(detector: Detector, noise: NoiseModel, cfg: TrialConfig) -> CalibrationRun:
    """Noise-only Monte-Carlo calibration of one detector's threshold."""
    return calibrate_many({"d": detector}, noise, cfg)["d"]


def measure_pd(
    detector: Detector,
    threshold: Threshold,
    signal: SignalModel,
    noise: NoiseModel,
    snr_db: float,
    cfg: TrialConfig,
) -> float:
    """Fraction of signal-present trials decided H1 at the given threshold."""
    hits = 0
    for t in range(cfg.trials):
        stream, _ = generate(
            signal, noise, snr_db, cfg.stream_length,
            seed=(cfg.seed, _rng.TAG_MEASUREMENT, t), n=cfg.n,
        )
        seg = SensingSegment(stream, n=cfg.n, ns=cfg.ns)
        stat = detector.statistic(seg)
        if decide(stat, threshold) == H1:
            hits += 1
    return hits / cfg.trials


def measure_pf(
    detectors: dict[str, Detector],
    thresholds: dict[str, Threshold],
    noise: NoiseModel,
    cfg: TrialConfig,
) -> dict[str, float]:
    """Empirical false-alarm rate over fresh noise draws (seed-disjoint from
    calibration), shared across detectors like calibrate_many."""
    hits = {name: 0 for name in detectors}
    for t in range(cfg.trials):
        seg = _noise_segment(noise, cfg, _rng.TAG_FRESH_PF, t)
        cov = sample_covariance(seg)
        for name, det in detectors.items():
            if decide(det.statistic_from_cov(cov), thresholds[name]) == H1:
                hits[name] += 1
    return {name: hits[name] / cfg.trials for name in detectors}
