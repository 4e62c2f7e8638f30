"""Synthetic signal and noise generation with controlled SNR, plus ingestion
of captured sample files.

Every model renders a unit-mean-power realization; generate() scales it so
that 10*log10(P_s / sigma2) hits the requested SNR exactly in expectation,
and reports the matching analytic signal covariance as ground truth for the
known-parameters EC benchmark. SNR here is the per-sample power ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import scipy.linalg
import scipy.signal

from . import _rng
from .core import CovMatrix, SampleStream, validate_stream
from .errors import FileIngestError, UnstableModelError


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean white Gaussian noise with variance sigma2."""

    sigma2: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma2) and self.sigma2 >= 0.0):
            raise ValueError(f"sigma2 must be finite and >= 0, got {self.sigma2}")


@dataclass(frozen=True)
class Ar1Model:
    """x[k] = a*x[k-1] + innovation; stationary from the first sample."""

    a: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not abs(self.a) < 1.0:
            raise UnstableModelError(f"AR(1) coefficient |a| must be < 1, got {self.a}")

    def render_unit_power(self, rng: np.random.Generator, length: int) -> np.ndarray:
        e = rng.standard_normal(length)
        x_prev = rng.standard_normal() / math.sqrt(1.0 - self.a * self.a)
        y, _ = scipy.signal.lfilter([1.0], [1.0, -self.a], e, zi=[self.a * x_prev])
        return y * math.sqrt(1.0 - self.a * self.a)

    def autocovariance(self, lags: int) -> np.ndarray:
        return self.a ** np.arange(lags, dtype=np.float64)


@dataclass(frozen=True)
class SinusoidModel:
    """Sinusoid at freq_norm cycles/sample; random per-run phase by default
    (a fixed-phase sinusoid is not WSS as an ensemble)."""

    freq_norm: float
    amplitude: float = 1.0
    phase: float | None = None

    def __post_init__(self):
        if not 0.0 < self.freq_norm < 0.5:
            raise UnstableModelError(
                f"freq_norm must be in (0, 0.5) cycles/sample, got {self.freq_norm}"
            )

    def render_unit_power(self, rng: np.random.Generator, length: int) -> np.ndarray:
        phase = rng.uniform(0.0, 2.0 * math.pi) if self.phase is None else self.phase
        k = np.arange(length)
        return math.sqrt(2.0) * np.sin(2.0 * math.pi * self.freq_norm * k + phase)

    def autocovariance(self, lags: int) -> np.ndarray:
        return np.cos(2.0 * math.pi * self.freq_norm * np.arange(lags))


@dataclass(frozen=True)
class FirModel:
    """White Gaussian innovations through an FIR filter (colored noise)."""

    taps: tuple[float, ...]
    amplitude: float = 1.0

    def __post_init__(self):
        taps = tuple(float(t) for t in np.ravel(self.taps))
        if len(taps) == 0:
            raise UnstableModelError("FIR taps must be non-empty")
        if not all(math.isfinite(t) for t in taps) or not any(taps):
            raise UnstableModelError("FIR taps must be finite and not all zero")
        object.__setattr__(self, "taps", taps)

    def render_unit_power(self, rng: np.random.Generator, length: int) -> np.ndarray:
        taps = np.asarray(self.taps)
        e = rng.standard_normal(length + len(taps) - 1)
        return np.convolve(e, taps, mode="valid") / np.linalg.norm(taps)

    def autocovariance(self, lags: int) -> np.ndarray:
        taps = np.asarray(self.taps)
        full = np.correlate(taps, taps, mode="full")[len(taps) - 1:]
        out = np.zeros(lags)
        m = min(lags, full.shape[0])
        out[:m] = full[:m] / full[0]
        return out


@dataclass(frozen=True)
class FileModel:
    """Replays a captured stream as the clean signal."""

    path: str
    fmt: str = "f32le_real"
    amplitude: float = 1.0

    def render_unit_power(self, rng: np.random.Generator, length: int) -> np.ndarray:
        data = ingest_file(self.path, self.fmt).samples
        if data.shape[0] < length:
            raise FileIngestError(self.path, f"need {length} samples, file has {data.shape[0]}")
        power = float(np.mean(data[:length] ** 2))
        if power == 0.0:
            raise FileIngestError(self.path, "capture has zero power")
        return data[:length] / math.sqrt(power)

    def autocovariance(self, lags: int) -> np.ndarray:
        raise NotImplementedError  # handled empirically in generate()


SignalModel = Union[Ar1Model, SinusoidModel, FirModel, FileModel]


@dataclass(frozen=True)
class GroundTruth:
    """What the simulator knows: analytic signal covariance and noise power."""

    signal_cov: CovMatrix
    sigma2: float


def _signal_power(model: SignalModel, noise: NoiseModel, snr_db: float) -> float:
    if model.amplitude == 0.0:
        return 0.0
    if noise.sigma2 == 0.0 or snr_db == math.inf:
        return float(model.amplitude) ** 2
    if snr_db == -math.inf:
        return 0.0
    return noise.sigma2 * 10.0 ** (snr_db / 10.0)


def generate(
    model: SignalModel,
    noise: NoiseModel,
    snr_db: float,
    length: int,
    seed: int | tuple[int, ...] = 0,
    n: int = 32,
) -> tuple[SampleStream, GroundTruth]:
    """Signal-plus-noise stream and the matching n x n ground truth.

    The signal is scaled to power sigma2 * 10^(snr_db/10); amplitude 0
    requests pure noise. With sigma2 = 0 (or snr_db = +inf) no noise is
    added and the signal keeps its nominal amplitude^2 power.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    path = seed if isinstance(seed, tuple) else (seed,)
    # independent substreams: the noise draw does not depend on whether a
    # signal was rendered, so signal-present and noise-only runs with the
    # same seed share their noise realization exactly
    rng_signal = _rng.make_rng(*path, _rng.TAG_GENERATE, 0)
    rng_noise = _rng.make_rng(*path, _rng.TAG_GENERATE, 1)
    p_signal = _signal_power(model, noise, snr_db)

    samples = np.zeros(length)
    if p_signal > 0.0:
        samples += math.sqrt(p_signal) * model.render_unit_power(rng_signal, length)
    if noise.sigma2 > 0.0 and snr_db != math.inf:
        samples += math.sqrt(noise.sigma2) * rng_noise.standard_normal(length)

    if p_signal == 0.0:
        rs = np.zeros((n, n))
    elif isinstance(model, FileModel):
        from .core import SensingSegment
        from .covariance import sample_covariance
        clean = SampleStream(math.sqrt(p_signal) * model.render_unit_power(rng_signal, length))
        seg = SensingSegment(clean, n=n, ns=length - n + 1)
        rs = sample_covariance(seg).values
    else:
        rs = p_signal * scipy.linalg.toeplitz(model.autocovariance(n))
    truth = GroundTruth(
        signal_cov=CovMatrix(values=np.triu(rs), vector_count=0),
        sigma2=noise.sigma2 if snr_db != math.inf else 0.0,
    )
    return SampleStream(samples), truth


_FORMATS = ("f32le_real", "i16le_real", "csv")


def ingest_file(path: str | Path, fmt: str = "f32le_real") -> SampleStream:
    """Decode a capture file into a validated stream.

    i16 samples are scaled to [-1, 1); csv accepts comma or whitespace
    separated decimal values.
    """
    path = Path(path)
    if fmt not in _FORMATS:
        raise FileIngestError(str(path), f"unknown format {fmt!r}; expected one of {_FORMATS}")
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise FileIngestError(str(path), str(exc)) from exc
    if len(raw) == 0:
        raise FileIngestError(str(path), "empty file")
    if fmt == "f32le_real":
        if len(raw) % 4:
            raise FileIngestError(str(path), f"size {len(raw)} is not a multiple of 4 bytes")
        samples = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    elif fmt == "i16le_real":
        if len(raw) % 2:
            raise FileIngestError(str(path), f"size {len(raw)} is not a multiple of 2 bytes")
        samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    else:
        tokens = raw.decode("utf-8", errors="strict").replace(",", " ").split()
        if not tokens:
            raise FileIngestError(str(path), "no values in csv")
        try:
            samples = np.array([float(t) for t in tokens])
        except ValueError as exc:
            raise FileIngestError(str(path), f"bad csv value: {exc}") from exc
    stream = SampleStream(samples)
    validate_stream(stream)
    return stream
