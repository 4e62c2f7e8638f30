"""Blind feature learning and template matching.

A feature is the unit-norm leading eigenvector of a segment's sample
covariance. Similarity between two features is the best absolute circular
cross-correlation over all lags, which makes it invariant to sign flips and
circular rotations of either argument and bounded by 1 for unit vectors.

Learning compares consecutive segments: noise features wander, signal
features repeat, so one similarity threshold separates them without knowing
signal or noise power.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _rng
from ._kernels import max_abs_circular_corr
from .core import Feature, SensingSegment
from .covariance import sample_covariance
from .eig import PowerIterConfig, leading_eigenvector
from .errors import (
    DimensionMismatchError,
    DimensionOutOfRangeError,
    InsufficientSegmentsError,
    MalformedTemplateError,
)

TEMPLATE_MAGIC = "specsense-feature v1"
MIN_TEMPLATE_DIM = 2
MAX_TEMPLATE_DIM = 4096

# learning-threshold presets: TE_CLEAN suits simulation-grade data,
# TE_NOISY suits hardware-grade conditions
TE_CLEAN = 0.90
TE_NOISY = 0.80


def similarity(a: Feature, b: Feature) -> float:
    """max over circular lags l of |sum_k a[k] * b[(k+l) mod n]|, in [0, 1]."""
    if a.n != b.n:
        raise DimensionMismatchError(a.n, b.n)
    rho = max_abs_circular_corr(a.values, b.values)
    return float(min(max(rho, 0.0), 1.0))


@dataclass(frozen=True)
class FlaConfig:
    """Learning controls: similarity threshold and per-segment eigen solve.

    TE_CLEAN (0.90) suits simulation-grade data; TE_NOISY (0.80) suits
    noisier conditions. Both are empirical; estimate_noise_similarity_null()
    lets you place te at a chosen quantile of the noise null instead.
    """

    te: float = TE_CLEAN
    power_iter: PowerIterConfig = field(default_factory=PowerIterConfig)

    def __post_init__(self):
        if not 0.0 < self.te < 1.0:
            raise ValueError(f"te must be in (0, 1), got {self.te}")


@dataclass(frozen=True)
class LearnReport:
    learned: bool
    feature: Feature | None
    rho_history: tuple[float, ...]
    segments_processed: int


@dataclass(frozen=True)
class StabilityReport:
    rhos: tuple[float, ...]
    fraction_above_te: float
    first_last_rho: float


def segment_feature(segment: SensingSegment, cfg: PowerIterConfig = PowerIterConfig()) -> Feature:
    """Feature of one segment: leading eigenvector of its sample covariance."""
    feature, _ = leading_eigenvector(sample_covariance(segment), cfg)
    return feature


def _check_segments(segments: Sequence[SensingSegment], minimum: int) -> None:
    if len(segments) < minimum:
        raise InsufficientSegmentsError(minimum, len(segments))
    n, ns = segments[0].n, segments[0].ns
    for seg in segments[1:]:
        if seg.n != n:
            raise DimensionMismatchError(n, seg.n)
        if seg.ns != ns:
            raise DimensionMismatchError(ns, seg.ns)


def fla_learn(segments: Sequence[SensingSegment], cfg: FlaConfig = FlaConfig()) -> LearnReport:
    """Three-step blind learning over consecutive segment pairs.

    For each pair (i, i+1): extract both features, compute their similarity,
    and if it strictly exceeds te declare the later feature learned. Stops at
    the first success; otherwise reports the full similarity history.
    """
    _check_segments(segments, 2)
    rhos: list[float] = []
    prev = segment_feature(segments[0], cfg.power_iter)
    for i in range(1, len(segments)):
        cur = segment_feature(segments[i], cfg.power_iter)
        rho = similarity(prev, cur)
        rhos.append(rho)
        if rho > cfg.te:
            return LearnReport(
                learned=True, feature=cur, rho_history=tuple(rhos), segments_processed=i + 1,
            )
        prev = cur
    return LearnReport(
        learned=False, feature=None, rho_history=tuple(rhos), segments_processed=len(segments),
    )


def stability_experiment(segments: Sequence[SensingSegment], cfg: FlaConfig = FlaConfig()) -> StabilityReport:
    """All consecutive similarities plus first-vs-last feature similarity."""
    _check_segments(segments, 2)
    features = [segment_feature(seg, cfg.power_iter) for seg in segments]
    rhos = tuple(similarity(features[i], features[i + 1]) for i in range(len(features) - 1))
    above = sum(1 for r in rhos if r > cfg.te)
    return StabilityReport(
        rhos=rhos,
        fraction_above_te=above / len(rhos),
        first_last_rho=similarity(features[0], features[-1]),
    )


def save_template(feature: Feature, path: str | Path) -> None:
    """Line-oriented text: magic, n=<dim>, one decimal component per line, end.

    17 significant digits round-trip float64 exactly, so load(save(f)) == f.
    """
    lines = [TEMPLATE_MAGIC, f"n={feature.n}"]
    lines.extend(f"{v:.17g}" for v in feature.values)
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n")


def load_template(path: str | Path) -> Feature:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedTemplateError(0, f"unreadable: {exc}") from exc
    lines = text.splitlines()
    if not lines or lines[0].strip() != TEMPLATE_MAGIC:
        raise MalformedTemplateError(1, f"expected magic {TEMPLATE_MAGIC!r}")
    if len(lines) < 2 or not lines[1].strip().startswith("n="):
        raise MalformedTemplateError(2, "expected 'n=<dim>'")
    try:
        n = int(lines[1].strip()[2:])
    except ValueError as exc:
        raise MalformedTemplateError(2, "dimension is not an integer") from exc
    if not MIN_TEMPLATE_DIM <= n <= MAX_TEMPLATE_DIM:
        raise DimensionOutOfRangeError(n, MIN_TEMPLATE_DIM, MAX_TEMPLATE_DIM)
    if len(lines) != n + 3:
        raise MalformedTemplateError(
            len(lines), f"expected exactly {n + 3} lines for n={n}, got {len(lines)}",
        )
    if lines[-1].strip() != "end":
        raise MalformedTemplateError(n + 3, "expected final line 'end'")
    values = np.empty(n)
    for k, token in enumerate(lines[2:2 + n]):
        try:
            values[k] = float(token.strip())
        except ValueError as exc:
            raise MalformedTemplateError(3 + k, f"bad value {token!r}") from exc
    if not np.isfinite(values).all():
        raise MalformedTemplateError(0, "non-finite component")
    try:
        return Feature(values)
    except ValueError as exc:
        raise MalformedTemplateError(0, str(exc)) from exc


def null_similarity_samples(n: int, draws: int, seed: int = 0) -> np.ndarray:
    """Similarities of independent uniformly random unit-vector pairs.

    This is the geometry-only null (what similarity() does to unrelated
    directions); it ignores the spectral structure noise features inherit
    from the covariance estimator.
    """
    rng = _rng.make_rng(seed, _rng.TAG_NULL_SIM)
    out = np.empty(draws)
    for k in range(draws):
        a = Feature.from_vector(rng.standard_normal(n))
        b = Feature.from_vector(rng.standard_normal(n))
        out[k] = similarity(a, b)
    return out


def estimate_noise_similarity_null(
    n: int,
    ns: int,
    pairs: int,
    sigma2: float = 1.0,
    seed: int = 0,
    power_iter: PowerIterConfig = PowerIterConfig(max_iters=200_000, residual_tol=1e-6),
) -> np.ndarray:
    """Consecutive-feature similarities under pure noise at the given (n, ns).

    This is the null that should set te: features of noise segments are not
    uniformly random directions, so their pairwise similarity is heavier
    tailed than the geometry-only null.
    """
    from .core import SampleStream, segment_stream

    rng = _rng.make_rng(seed, _rng.TAG_NULL_SIM, 1)
    out = np.empty(pairs)
    sigma = float(np.sqrt(sigma2))
    for k in range(pairs):
        stream = SampleStream(sigma * rng.standard_normal(2 * ns + n - 1))
        seg_a, seg_b = segment_stream(stream, n=n, ns=ns, count=2)
        out[k] = similarity(
            segment_feature(seg_a, power_iter), segment_feature(seg_b, power_iter),
        )
    return out


def te_for_null_quantile(null_samples: np.ndarray, quantile: float) -> float:
    """Pick te at a chosen quantile of an estimated noise null."""
    if not 0.0 < quantile < 1.0:
        raise ValueError(f"quantile must be in (0, 1), got {quantile}")
    return float(np.quantile(np.asarray(null_samples), quantile))
