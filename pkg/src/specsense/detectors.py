"""The four test statistics.

EC is the known-parameters quadratic benchmark (needs the true signal
covariance and noise variance, so outside a simulator it is aspirational).
MME and CAV are fully blind. FTM sits in between, using one blindly learned
feature template as its only prior knowledge.

All four share the same decision rule: H1 iff statistic > gamma, with gamma
calibrated for a target false-alarm rate (see calibration module).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import CAV, EC_AVG, FTM, MME, CovMatrix, DetectorStatistic, Feature, SensingSegment
from .covariance import sample_covariance
from .eig import PowerIterConfig, extreme_eigenvalues, leading_eigenvector
from .errors import DimensionMismatchError, SingularCovarianceError, ZeroDiagonalError
from .features import similarity


@dataclass(frozen=True)
class EcModel:
    """Ground-truth signal covariance R_s and noise variance, with the
    quadratic kernel M = R_s (R_s + sigma2*I)^-1 cached at build time."""

    signal_cov: np.ndarray
    sigma2: float
    kernel: np.ndarray

    @classmethod
    def build(cls, signal_cov: CovMatrix | np.ndarray, sigma2: float) -> "EcModel":
        if sigma2 <= 0:
            raise ValueError(f"noise variance must be > 0, got {sigma2}")
        rs = signal_cov.values if isinstance(signal_cov, CovMatrix) else np.asarray(signal_cov, dtype=np.float64)
        shifted = rs + sigma2 * np.eye(rs.shape[0])
        # M = R_s A^-1 = (A^-1 R_s)^T for symmetric R_s, A; solve instead of invert
        kernel = scipy.linalg.solve(shifted, rs, assume_a="pos").T
        kernel = 0.5 * (kernel + kernel.T)
        return cls(signal_cov=rs, sigma2=float(sigma2), kernel=kernel)

    @property
    def n(self) -> int:
        return self.kernel.shape[0]


def ec_statistic(model: EcModel, r: np.ndarray) -> float:
    """Quadratic form r' M r for a single observation vector."""
    r = np.asarray(r, dtype=np.float64).ravel()
    if r.shape[0] != model.n:
        raise DimensionMismatchError(model.n, r.shape[0])
    return float(r @ (model.kernel @ r))


def ec_avg_statistic(model: EcModel, segment: SensingSegment) -> float:
    """Mean of the per-vector quadratic forms over all ns segment vectors."""
    X = segment.data_matrix()
    if X.shape[1] != model.n:
        raise DimensionMismatchError(model.n, X.shape[1])
    return float(np.mean(np.einsum("ij,jk,ik->i", X, model.kernel, X)))


def ec_avg_from_cov(model: EcModel, cov: CovMatrix) -> float:
    """Averaged EC via the identity mean_i(x_i' M x_i) = <M, R_hat>_F.

    Equal to ec_avg_statistic up to summation rounding; used where the
    sample covariance is already on hand.
    """
    if cov.n != model.n:
        raise DimensionMismatchError(model.n, cov.n)
    return float(np.sum(model.kernel * cov.values))


def mme_statistic(R: CovMatrix, cfg: PowerIterConfig = PowerIterConfig()) -> float:
    """Ratio of extreme eigenvalues lam_1 / lam_n; >= 1 by construction."""
    lam_max, lam_min, _ = extreme_eigenvalues(R, cfg)
    if lam_min <= 1e-12 * lam_max:
        raise SingularCovarianceError(lam_max, lam_min)
    return max(lam_max / lam_min, 1.0)


def cav_statistic(R: CovMatrix) -> float:
    """Total absolute covariance mass over absolute diagonal mass.

    t1 = (1/n) sum_ij |r_ij|, t2 = (1/n) sum_i |r_ii|; the ratio is >= 1
    because t1 contains every diagonal term of t2.
    """
    t2 = float(np.sum(np.abs(np.diag(R.values)))) / R.n
    if t2 <= 1e-300:
        raise ZeroDiagonalError()
    t1 = float(np.sum(np.abs(R.values))) / R.n
    return max(t1 / t2, 1.0)  # t1 >= t2 term-wise; guard rounding at the floor


def ftm_statistic(template: Feature, R: CovMatrix, cfg: PowerIterConfig = PowerIterConfig()) -> float:
    """Similarity of the current leading eigenvector to the stored template."""
    if template.n != R.n:
        raise DimensionMismatchError(R.n, template.n)
    feature, _ = leading_eigenvector(R, cfg)
    return similarity(feature, template)


class Detector:
    """Uniform per-segment evaluation surface for the Monte-Carlo harness.

    statistic() works from a raw segment; statistic_from_cov() reuses an
    already-computed sample covariance so one draw can feed many detectors.
    """

    detector_id: str = ""

    def statistic(self, segment: SensingSegment) -> DetectorStatistic:
        return self.statistic_from_cov(sample_covariance(segment))

    def statistic_from_cov(self, cov: CovMatrix) -> DetectorStatistic:
        raise NotImplementedError


@dataclass(frozen=True)
class EcAvgDetector(Detector):
    model: EcModel
    detector_id = EC_AVG

    def statistic_from_cov(self, cov: CovMatrix) -> DetectorStatistic:
        value = ec_avg_from_cov(self.model, cov)
        return DetectorStatistic(self.detector_id, value, {"sigma2": self.model.sigma2})


@dataclass(frozen=True)
class MmeDetector(Detector):
    power_iter: PowerIterConfig = field(default_factory=PowerIterConfig)
    detector_id = MME

    def statistic_from_cov(self, cov: CovMatrix) -> DetectorStatistic:
        return DetectorStatistic(self.detector_id, mme_statistic(cov, self.power_iter), {})


@dataclass(frozen=True)
class CavDetector(Detector):
    detector_id = CAV

    def statistic_from_cov(self, cov: CovMatrix) -> DetectorStatistic:
        return DetectorStatistic(self.detector_id, cav_statistic(cov), {})


@dataclass(frozen=True)
class FtmDetector(Detector):
    template: Feature
    power_iter: PowerIterConfig = field(default_factory=PowerIterConfig)
    detector_id = FTM

    def statistic_from_cov(self, cov: CovMatrix) -> DetectorStatistic:
        value = ftm_statistic(self.template, cov, self.power_iter)
        return DetectorStatistic(self.detector_id, value, {"template_n": self.template.n})
