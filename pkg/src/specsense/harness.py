"""Experiment engine: ties generation, learning, calibration and detection
into reproducible sweeps with self-describing CSV artifacts.

Protocol notes baked in here rather than in the statistics:
- the FTM template is learned once from a high-SNR pre-run, then held fixed
  across the sweep (learn first, detect later);
- EC needs a per-SNR threshold because its kernel depends on the signal
  covariance, which scales with SNR; the blind detectors calibrate once;
- ROC mode reuses one set of null/alternative statistics across the whole
  gamma grid, since statistics do not depend on the threshold.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _rng
from .calibration import TrialConfig, calibrate_many, measure_pf
from .core import (
    CAV,
    EC,
    FTM,
    MME,
    Feature,
    SampleStream,
    SensingSegment,
    Threshold,
    decide,
    segment_stream,
    H1,
)
from .covariance import sample_covariance
from .detectors import CavDetector, Detector, EcAvgDetector, EcModel, FtmDetector, MmeDetector
from .eig import PowerIterConfig
from .errors import InsufficientSegmentsError, MalformedThresholdError, SensingError
from .features import FlaConfig, LearnReport, StabilityReport, fla_learn, stability_experiment
from .simgen import NoiseModel, SignalModel, generate

THRESHOLD_MAGIC = "specsense-threshold v1"
SWEEP_DETECTORS = (EC, FTM, MME, CAV)

# (n, ns, trials) bundles; desk is sized for a laptop core, the paper-*
# bundles reproduce the published simulation and hardware configurations
PRESETS: dict[str, tuple[int, int, int]] = {
    "desk": (32, 10_000, 500),
    "paper-sim": (32, 100_000, 1000),
    "paper-hw": (32, 2**20, 1000),
}

# power-iteration budget for Monte-Carlo work: noise-only covariance has a
# nearly flat spectrum, where eigen gaps are tiny and convergence is slow
HARNESS_POWER_ITER = PowerIterConfig(max_iters=300_000, residual_tol=1e-6)


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one Monte-Carlo experiment."""

    signal: SignalModel
    noise: NoiseModel = field(default_factory=NoiseModel)
    n: int = 32
    ns: int = 10_000
    trials: int = 500
    cal_trials: int = 2000
    target_pf: float = 0.1
    snr_grid: tuple[float, ...] = ()
    detectors: tuple[str, ...] = SWEEP_DETECTORS
    te: float = 0.9
    template_snr_db: float = 20.0
    seed: int = 1
    power_iter: PowerIterConfig = HARNESS_POWER_ITER

    def __post_init__(self):
        grid = tuple(float(s) for s in self.snr_grid)
        if list(grid) != sorted(grid):
            raise ValueError("snr_grid must be sorted ascending")
        object.__setattr__(self, "snr_grid", grid)
        dets = tuple(d.upper() for d in self.detectors)
        for d in dets:
            if d not in SWEEP_DETECTORS:
                raise ValueError(f"unknown detector {d!r}; expected subset of {SWEEP_DETECTORS}")
        object.__setattr__(self, "detectors", dets)

    def describe(self) -> dict[str, str]:
        """Flat key=value view recorded in every CSV artifact."""
        return {
            "signal": repr(self.signal),
            "noise_sigma2": f"{self.noise.sigma2:.9g}",
            "n": str(self.n),
            "ns": str(self.ns),
            "trials": str(self.trials),
            "cal_trials": str(self.cal_trials),
            "target_pf": f"{self.target_pf:.9g}",
            "snr_grid_db": ":".join(f"{s:.9g}" for s in self.snr_grid),
            "detectors": ",".join(self.detectors),
            "te": f"{self.te:.9g}",
            "template_snr_db": f"{self.template_snr_db:.9g}",
            "seed": str(self.seed),
            "snr_definition": "per-sample power ratio, 10*log10(Ps/sigma2)",
        }


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    detector: str
    pd: float
    pf_measured: float
    trials: int


@dataclass(frozen=True)
class SweepResult:
    spec: ExperimentSpec
    rows: tuple[SweepRow, ...]
    template: Feature | None
    thresholds: dict[str, Threshold]

    def pd_of(self, detector: str, snr_db: float) -> float:
        for row in self.rows:
            if row.detector == detector and row.snr_db == snr_db:
                return row.pd
        raise KeyError((detector, snr_db))

    def first_snr_reaching(self, detector: str, pd_floor: float) -> float | None:
        for snr in self.spec.snr_grid:
            if self.pd_of(detector, snr) >= pd_floor:
                return snr
        return None


def _write_csv(path_or_buf, meta: dict[str, str], header: list[str], rows) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={value}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append(f"{cell:.9g}")
            else:
                cells.append(str(cell))
        buf.write(",".join(cells) + "\n")
    text = buf.getvalue()
    if path_or_buf is not None:
        Path(path_or_buf).write_text(text)
    return text


def learn_template(spec: ExperimentSpec) -> Feature:
    """High-SNR pre-run: two consecutive segments, blind-learned feature."""
    length = spec.n + 2 * spec.ns - 1
    stream, _ = generate(
        spec.signal, spec.noise, spec.template_snr_db, length,
        seed=(spec.seed, _rng.TAG_TEMPLATE), n=spec.n,
    )
    segments = segment_stream(stream, n=spec.n, ns=spec.ns, count=2)
    report = fla_learn(segments, FlaConfig(te=spec.te, power_iter=spec.power_iter))
    if not report.learned:
        raise SensingError(
            f"template pre-run at {spec.template_snr_db} dB did not learn "
            f"(max rho {max(report.rho_history):.3f} <= te {spec.te})"
        )
    return report.feature


def _blind_detectors(spec: ExperimentSpec, template: Feature | None) -> dict[str, Detector]:
    out: dict[str, Detector] = {}
    for name in spec.detectors:
        if name == MME:
            out[name] = MmeDetector(power_iter=spec.power_iter)
        elif name == CAV:
            out[name] = CavDetector()
        elif name == FTM:
            out[name] = FtmDetector(template=template, power_iter=spec.power_iter)
    return out


def _ec_detector(spec: ExperimentSpec, snr_db: float) -> EcAvgDetector:
    _, truth = generate(
        spec.signal, spec.noise, snr_db, spec.n + spec.ns - 1,
        seed=(spec.seed, _rng.TAG_TEMPLATE, 0), n=spec.n,
    )
    model = EcModel.build(truth.signal_cov, truth.sigma2)
    return EcAvgDetector(model=model)


def run_sweep(spec: ExperimentSpec) -> SweepResult:
    """Pd versus SNR for the requested detectors at one target Pf."""
    if not spec.snr_grid:
        raise ValueError("sweep needs a non-empty snr_grid")
    template = learn_template(spec) if FTM in spec.detectors else None

    evaluators = _blind_detectors(spec, template)
    if EC in spec.detectors:
        for snr in spec.snr_grid:
            evaluators[_ec_key(snr)] = _ec_detector(spec, snr)

    cal_cfg = TrialConfig(
        n=spec.n, ns=spec.ns, trials=spec.cal_trials,
        target_pf=spec.target_pf, seed=spec.seed,
    )
    runs = calibrate_many(evaluators, spec.noise, cal_cfg)
    thresholds = {name: run.threshold for name, run in runs.items()}

    pf_cfg = replace(cal_cfg, trials=spec.trials)
    pf_measured = measure_pf(evaluators, thresholds, spec.noise, pf_cfg)

    pd: dict[tuple[float, str], float] = {}
    for point, snr in enumerate(spec.snr_grid):
        hits = {name: 0 for name in evaluators}
        for t in range(spec.trials):
            stream, _ = generate(
                spec.signal, spec.noise, snr, spec.n + spec.ns - 1,
                seed=(spec.seed, _rng.TAG_MEASUREMENT, point, t), n=spec.n,
            )
            cov = sample_covariance(SensingSegment(stream, n=spec.n, ns=spec.ns))
            for name in _names_at(spec, snr):
                det = evaluators[name]
                if decide(det.statistic_from_cov(cov), thresholds[name]) == H1:
                    hits[name] += 1
        for name in _names_at(spec, snr):
            label = EC if name.startswith("EC@") else name
            pd[(snr, label)] = hits[name] / spec.trials

    rows = []
    for snr in spec.snr_grid:
        for name in spec.detectors:
            key = _ec_key(snr) if name == EC else name
            rows.append(SweepRow(
                snr_db=snr,
                detector=name,
                pd=pd[(snr, name)],
                pf_measured=pf_measured[key],
                trials=spec.trials,
            ))
    public = {}
    for name in spec.detectors:
        if name == EC:
            public.update({k: v for k, v in thresholds.items() if k.startswith("EC@")})
        else:
            public[name] = thresholds[name]
    return SweepResult(spec=spec, rows=tuple(rows), template=template, thresholds=public)


def _ec_key(snr_db: float) -> str:
    return f"EC@{snr_db:.9g}"


def _names_at(spec: ExperimentSpec, snr: float) -> list[str]:
    return [_ec_key(snr) if name == EC else name for name in spec.detectors]


def sweep_csv(result: SweepResult, path=None) -> str:
    meta = dict(result.spec.describe())
    meta["artifact"] = "pd-vs-snr sweep"
    for name, thr in sorted(result.thresholds.items()):
        meta[f"gamma_{name}"] = f"{thr.gamma:.9g}"
    return _write_csv(
        path, meta,
        ["snr_db", "detector", "pd", "pf_measured", "trials"],
        ((r.snr_db, r.detector, r.pd, r.pf_measured, r.trials) for r in result.rows),
    )


@dataclass(frozen=True)
class RocPoint:
    gamma: float
    pf: float
    pd: float


@dataclass(frozen=True)
class RocResult:
    spec: ExperimentSpec
    detector: str
    snr_db: float
    points: tuple[RocPoint, ...]


def run_roc(spec: ExperimentSpec, detector: str, snr_db: float, gamma_count: int = 50) -> RocResult:
    """(pf, pd) pairs over a gamma grid at one SNR.

    One pool of null statistics and one pool of alternative statistics are
    swept by every gamma, so the whole curve costs two Monte-Carlo runs.
    """
    detector = detector.upper()
    sub = replace(spec, detectors=(detector,), snr_grid=(snr_db,))
    template = learn_template(sub) if detector == FTM else None
    if detector == EC:
        evaluator: Detector = _ec_detector(sub, snr_db)
    else:
        evaluator = _blind_detectors(sub, template)[detector]

    cal_cfg = TrialConfig(
        n=spec.n, ns=spec.ns, trials=spec.cal_trials,
        target_pf=spec.target_pf, seed=spec.seed,
    )
    null_stats = calibrate_many({"d": evaluator}, spec.noise, cal_cfg)["d"].null_stats

    alt_stats = np.empty(spec.trials)
    for t in range(spec.trials):
        stream, _ = generate(
            spec.signal, spec.noise, snr_db, spec.n + spec.ns - 1,
            seed=(spec.seed, _rng.TAG_MEASUREMENT, 0, t), n=spec.n,
        )
        cov = sample_covariance(SensingSegment(stream, n=spec.n, ns=spec.ns))
        alt_stats[t] = evaluator.statistic_from_cov(cov).value

    merged = np.concatenate([null_stats, alt_stats])
    gammas = np.unique(np.quantile(merged, np.linspace(0.0, 1.0, gamma_count)))
    points = tuple(
        RocPoint(
            gamma=float(g),
            pf=float(np.mean(null_stats > g)),
            pd=float(np.mean(alt_stats > g)),
        )
        for g in gammas
    )
    return RocResult(spec=spec, detector=detector, snr_db=snr_db, points=points)


def roc_csv(result: RocResult, path=None) -> str:
    meta = dict(result.spec.describe())
    meta["artifact"] = "roc"
    meta["detector"] = result.detector
    meta["snr_db"] = f"{result.snr_db:.9g}"
    return _write_csv(
        path, meta,
        ["gamma", "pf", "pd"],
        ((p.gamma, p.pf, p.pd) for p in result.points),
    )


def run_stability(spec: ExperimentSpec, segments: int, snr_db: float,
                  stream: SampleStream | None = None) -> StabilityReport:
    """Consecutive-feature stability over many segments of one stream."""
    if segments < 2:
        raise InsufficientSegmentsError(2, segments)
    if stream is None:
        length = spec.n + segments * spec.ns - 1
        stream, _ = generate(
            spec.signal, spec.noise, snr_db, length,
            seed=(spec.seed, _rng.TAG_MEASUREMENT), n=spec.n,
        )
    segs = segment_stream(stream, n=spec.n, ns=spec.ns, count=segments)
    if len(segs) < segments:
        raise InsufficientSegmentsError(segments, len(segs))
    return stability_experiment(segs, FlaConfig(te=spec.te, power_iter=spec.power_iter))


def stability_csv(spec: ExperimentSpec, report: StabilityReport, path=None) -> str:
    meta = dict(spec.describe())
    meta["artifact"] = "feature-stability"
    meta["fraction_above_te"] = f"{report.fraction_above_te:.9g}"
    meta["first_last_rho"] = f"{report.first_last_rho:.9g}"
    return _write_csv(
        path, meta,
        ["segment_index", "rho"],
        ((k + 1, rho) for k, rho in enumerate(report.rhos)),
    )


def run_learn(spec: ExperimentSpec, snr_db: float, max_segments: int = 50,
              stream: SampleStream | None = None) -> LearnReport:
    """Blind learning on a synthetic run or a supplied capture stream."""
    if stream is None:
        length = spec.n + max_segments * spec.ns - 1
        stream, _ = generate(
            spec.signal, spec.noise, snr_db, length,
            seed=(spec.seed, _rng.TAG_TEMPLATE), n=spec.n,
        )
    segs = segment_stream(stream, n=spec.n, ns=spec.ns, count=max_segments)
    if len(segs) < 2:
        raise InsufficientSegmentsError(2, len(segs))
    return fla_learn(segs, FlaConfig(te=spec.te, power_iter=spec.power_iter))


def save_threshold(threshold: Threshold, n: int, ns: int, path) -> None:
    """Mirror of the template format, carrying the calibration geometry."""
    lines = [
        THRESHOLD_MAGIC,
        f"detector={threshold.detector_id}",
        f"gamma={threshold.gamma:.17g}",
        f"target_pf={threshold.target_pf:.17g}",
        f"trials={threshold.calibration_trials}",
        f"n={n}",
        f"ns={ns}",
        "end",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def load_threshold(path) -> tuple[Threshold, int, int]:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise MalformedThresholdError(0, f"unreadable: {exc}") from exc
    if not lines or lines[0].strip() != THRESHOLD_MAGIC:
        raise MalformedThresholdError(1, f"expected magic {THRESHOLD_MAGIC!r}")
    if len(lines) != 8 or lines[-1].strip() != "end":
        raise MalformedThresholdError(len(lines), "expected 8 lines ending with 'end'")
    fields = {}
    for k, line in enumerate(lines[1:7], start=2):
        if "=" not in line:
            raise MalformedThresholdError(k, f"expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    expected = ("detector", "gamma", "target_pf", "trials", "n", "ns")
    if tuple(fields.keys()) != expected:
        raise MalformedThresholdError(0, f"expected keys {expected}, got {tuple(fields)}")
    try:
        threshold = Threshold(
            detector_id=fields["detector"],
            gamma=float(fields["gamma"]),
            target_pf=float(fields["target_pf"]),
            calibration_trials=int(fields["trials"]),
        )
        n = int(fields["n"])
        ns = int(fields["ns"])
    except ValueError as exc:
        raise MalformedThresholdError(0, str(exc)) from exc
    return threshold, n, ns
