"""Command-line front end.

Subcommands: learn, sense, calibrate, sweep, stability, roc.

Exit codes: 0 success (learn: feature learned), 2 clean negative (learn:
not learned), 1 any error. Values resolve in priority order: command-line
flag > config file (--config, flat key=value lines) > preset bundle >
built-in default. All outputs are reproducible from the seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import CAV, FTM, MME, SampleStream, SensingSegment, decide
from .covariance import sample_covariance
from .detectors import CavDetector, FtmDetector, MmeDetector
from .errors import SensingError
from .features import load_template, save_template
from .harness import (
    HARNESS_POWER_ITER,
    PRESETS,
    ExperimentSpec,
    load_threshold,
    roc_csv,
    run_learn,
    run_roc,
    run_stability,
    run_sweep,
    save_threshold,
    stability_csv,
    sweep_csv,
)
from .calibration import TrialConfig, calibrate
from .simgen import Ar1Model, FileModel, FirModel, NoiseModel, SinusoidModel, ingest_file

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_LEARNED = 2

_DEFAULTS = {
    "preset": "desk",
    "sigma2": 1.0,
    "pf": 0.1,
    "te": 0.9,
    "seed": 1,
    "snr_db": 0.0,
    "source": "ar1:0.9",
    "format": "f32le_real",
    "cal_trials": 2000,
    "segments": 100,
    "max_segments": 50,
    "detectors": "ec,ftm,mme,cav",
    "snr_grid": "-22:-13:1",
    "template_snr_db": 20.0,
    "gamma_count": 50,
}

_INT_KEYS = {"n", "ns", "trials", "cal_trials", "seed", "segments", "max_segments", "gamma_count"}
_FLOAT_KEYS = {"sigma2", "pf", "te", "snr_db", "template_snr_db"}


def _parse_source(text: str):
    """Signal model spec: ar1:<a>, sinusoid:<freq>, fir:<t0,t1,...>, file:<path>."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "ar1":
        return Ar1Model(a=float(arg))
    if kind == "sinusoid":
        return SinusoidModel(freq_norm=float(arg))
    if kind == "fir":
        taps = tuple(float(t) for t in arg.split(",") if t.strip())
        return FirModel(taps=taps)
    if kind == "file":
        path, _, fmt = arg.partition("@")
        return FileModel(path=path, fmt=fmt or "f32le_real")
    raise ValueError(f"unknown source {text!r}; expected ar1:/sinusoid:/fir:/file:")


def _parse_grid(text: str) -> tuple[float, ...]:
    """Either lo:hi:step or a comma-separated list of dB values."""
    if ":" in text:
        lo_s, hi_s, step_s = text.split(":")
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
        if step <= 0 or hi < lo:
            raise ValueError(f"bad grid {text!r}")
        out = []
        v = lo
        while v <= hi + 1e-9:
            out.append(round(v, 9))
            v += step
        return tuple(out)
    return tuple(sorted(float(t) for t in text.split(",") if t.strip()))


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SensingError(f"cannot read config {path}: {exc}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SensingError(f"config {path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _DEFAULTS and key not in _INT_KEYS and key not in _FLOAT_KEYS and key not in {
            "n", "ns", "trials", "detector", "out", "input", "template", "threshold",
        }:
            raise SensingError(f"config {path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _resolve(args: argparse.Namespace, key: str):
    """flag > config file > preset > default"""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    config = getattr(args, "_config_values", {})
    if key in config:
        raw = config[key]
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        return raw
    preset_name = args.preset or getattr(args, "_config_values", {}).get("preset") or _DEFAULTS["preset"]
    if preset_name not in PRESETS:
        raise SensingError(f"unknown preset {preset_name!r}; expected one of {sorted(PRESETS)}")
    n, ns, trials = PRESETS[preset_name]
    if key == "n":
        return n
    if key == "ns":
        return ns
    if key == "trials":
        return trials
    return _DEFAULTS.get(key)


def _spec_from_args(args: argparse.Namespace, detectors: tuple[str, ...] | None = None,
                    snr_grid: tuple[float, ...] = ()) -> ExperimentSpec:
    return ExperimentSpec(
        signal=_parse_source(_resolve(args, "source")),
        noise=NoiseModel(sigma2=_resolve(args, "sigma2")),
        n=_resolve(args, "n"),
        ns=_resolve(args, "ns"),
        trials=_resolve(args, "trials"),
        cal_trials=_resolve(args, "cal_trials"),
        target_pf=_resolve(args, "pf"),
        snr_grid=snr_grid,
        detectors=detectors if detectors is not None else ("EC", "FTM", "MME", "CAV"),
        te=_resolve(args, "te"),
        template_snr_db=_resolve(args, "template_snr_db"),
        seed=_resolve(args, "seed"),
    )


def _input_stream(args: argparse.Namespace) -> SampleStream | None:
    path = getattr(args, "input", None)
    if path is None:
        return None
    return ingest_file(path, _resolve(args, "format"))


def cmd_learn(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args, detectors=("FTM",))
    report = run_learn(
        spec, snr_db=_resolve(args, "snr_db"),
        max_segments=_resolve(args, "max_segments"),
        stream=_input_stream(args),
    )
    rhos = ", ".join(f"{r:.4f}" for r in report.rho_history)
    print(f"segments={report.segments_processed} rho_history=[{rhos}] te={_resolve(args, 'te')}")
    if not report.learned:
        print("not learned")
        return EXIT_NOT_LEARNED
    save_template(report.feature, args.out)
    print(f"learned feature (n={report.feature.n}) -> {args.out}")
    return EXIT_OK


def cmd_sense(args: argparse.Namespace) -> int:
    threshold, n, ns = load_threshold(args.threshold)
    detector_name = args.detector.upper()
    if detector_name == FTM:
        if args.template is None:
            raise SensingError("FTM sensing needs --template")
        detector = FtmDetector(template=load_template(args.template), power_iter=HARNESS_POWER_ITER)
    elif detector_name == MME:
        detector = MmeDetector(power_iter=HARNESS_POWER_ITER)
    elif detector_name == CAV:
        detector = CavDetector()
    else:
        raise SensingError(
            f"sense supports FTM (template+threshold) or MME/CAV (threshold only), got {detector_name}"
        )
    if threshold.detector_id != detector.detector_id:
        raise SensingError(
            f"threshold file is for {threshold.detector_id}, not {detector.detector_id}"
        )
    stream = _input_stream(args)
    if stream is None:
        raise SensingError("sense needs --input")
    segment = SensingSegment(stream, n=n, ns=ns)
    stat = detector.statistic_from_cov(sample_covariance(segment))
    decision = decide(stat, threshold)
    print(f"{detector_name},{stat.value:.9g},{threshold.gamma:.9g},{decision}")
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    detector_name = args.detector.upper()
    n = _resolve(args, "n")
    ns = _resolve(args, "ns")
    if detector_name == MME:
        detector = MmeDetector(power_iter=HARNESS_POWER_ITER)
    elif detector_name == CAV:
        detector = CavDetector()
    elif detector_name == FTM:
        if args.template is None:
            raise SensingError("FTM calibration needs --template")
        detector = FtmDetector(template=load_template(args.template), power_iter=HARNESS_POWER_ITER)
    else:
        raise SensingError(f"calibrate supports MME, CAV, FTM; got {detector_name}")
    cfg = TrialConfig(
        n=n, ns=ns, trials=_resolve(args, "cal_trials"),
        target_pf=_resolve(args, "pf"), seed=_resolve(args, "seed"),
    )
    run = calibrate(detector, NoiseModel(sigma2=_resolve(args, "sigma2")), cfg)
    save_threshold(run.threshold, n, ns, args.out)
    print(
        f"{detector_name} gamma={run.threshold.gamma:.9g} "
        f"target_pf={cfg.target_pf:.9g} trials={cfg.trials} -> {args.out}"
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    detectors = tuple(d.strip().upper() for d in _resolve(args, "detectors").split(",") if d.strip())
    spec = _spec_from_args(args, detectors=detectors, snr_grid=_parse_grid(_resolve(args, "snr_grid")))
    result = run_sweep(spec)
    text = sweep_csv(result, args.out)
    if args.out:
        print(f"wrote {args.out} ({len(result.rows)} rows)")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stability(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args, detectors=("FTM",))
    report = run_stability(
        spec, segments=_resolve(args, "segments"),
        snr_db=_resolve(args, "snr_db"), stream=_input_stream(args),
    )
    text = stability_csv(spec, report, args.out)
    if args.out:
        print(f"wrote {args.out} ({len(report.rhos)} rows)")
    else:
        sys.stdout.write(text)
    print(
        f"fraction_above_te={report.fraction_above_te:.9g} "
        f"first_last_rho={report.first_last_rho:.9g}"
    )
    return EXIT_OK


def cmd_roc(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args, detectors=(args.detector.upper(),))
    result = run_roc(
        spec, detector=args.detector, snr_db=_resolve(args, "snr_db"),
        gamma_count=_resolve(args, "gamma_count"),
    )
    text = roc_csv(result, args.out)
    if args.out:
        print(f"wrote {args.out} ({len(result.points)} rows)")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="(n, ns, trials) bundle")
    p.add_argument("--n", type=int, help="vector length")
    p.add_argument("--ns", type=int, help="vectors per sensing segment")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials per point")
    p.add_argument("--cal-trials", dest="cal_trials", type=int, help="calibration trials")
    p.add_argument("--sigma2", type=float, help="noise variance")
    p.add_argument("--pf", type=float, help="target false-alarm probability")
    p.add_argument("--te", type=float, help="learning similarity threshold")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--source", help="signal model: ar1:<a> sinusoid:<f> fir:<taps> file:<path>")
    p.add_argument("--input", help="capture file to ingest instead of synthesizing")
    p.add_argument("--format", choices=("f32le_real", "i16le_real", "csv"), help="capture format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specsense",
        description="Covariance-based spectrum sensing with blindly learned eigenvector features",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="blind-learn a feature template")
    _add_common(p)
    p.add_argument("--snr-db", dest="snr_db", type=float, help="synthetic-source SNR")
    p.add_argument("--max-segments", dest="max_segments", type=int, help="segment budget")
    p.add_argument("--out", required=True, help="template file to write")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("sense", help="one detection decision on an input stream")
    _add_common(p)
    p.add_argument("--detector", required=True, help="ftm, mme or cav")
    p.add_argument("--template", help="feature template (FTM)")
    p.add_argument("--threshold", required=True, help="calibrated threshold file")
    p.set_defaults(func=cmd_sense)

    p = sub.add_parser("calibrate", help="Monte-Carlo threshold calibration")
    _add_common(p)
    p.add_argument("--detector", required=True, help="mme, cav or ftm")
    p.add_argument("--template", help="feature template (FTM)")
    p.add_argument("--out", required=True, help="threshold file to write")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("sweep", help="Pd vs SNR sweep to CSV")
    _add_common(p)
    p.add_argument("--detectors", help="comma list from ec,ftm,mme,cav")
    p.add_argument("--snr-grid", dest="snr_grid", help="lo:hi:step in dB, or comma list")
    p.add_argument("--template-snr-db", dest="template_snr_db", type=float,
                   help="SNR of the FTM template pre-run")
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stability", help="consecutive-feature stability to CSV")
    _add_common(p)
    p.add_argument("--snr-db", dest="snr_db", type=float, help="synthetic-source SNR")
    p.add_argument("--segments", type=int, help="number of sensing segments")
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("roc", help="(pf, pd) over a gamma grid at fixed SNR")
    _add_common(p)
    p.add_argument("--detector", required=True, help="ec, ftm, mme or cav")
    p.add_argument("--snr-db", dest="snr_db", type=float, help="operating SNR")
    p.add_argument("--gamma-count", dest="gamma_count", type=int, help="grid size")
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_roc)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._config_values = _load_config(args.config)
        return args.func(args)
    except SensingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
