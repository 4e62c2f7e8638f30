#!/usr/bin/env python3
"""End-to-end pipeline on a capture file, the way the CLI wires it.

Synthesizes a "capture" to a little-endian float32 file, then: ingest ->
learn a template from the capture -> calibrate an FTM threshold for 10%
false alarms -> sense fresh captures with and without the signal.

The same flow via the command line:

    specsense learn --input capture.f32 --n 32 --ns 10000 --out tpl.txt
    specsense calibrate --detector ftm --template tpl.txt --out thr.txt
    specsense sense --detector ftm --template tpl.txt --threshold thr.txt \
        --input fresh.f32
"""

import numpy as np

from specsense import (
    Ar1Model,
    FtmDetector,
    NoiseModel,
    SensingSegment,
    TrialConfig,
    calibrate,
    decide,
    fla_learn,
    generate,
    ingest_file,
    load_template,
    sample_covariance,
    save_template,
    segment_stream,
)
from specsense.harness import HARNESS_POWER_ITER
from specsense.features import FlaConfig

N, NS = 32, 10_000


def write_capture(path, snr_db, seed, segments=2):
    stream, _ = generate(Ar1Model(a=0.9), NoiseModel(1.0), snr_db,
                         N + segments * NS - 1, seed=seed, n=N)
    np.asarray(stream.samples, dtype="<f4").tofile(path)


def main():
    write_capture("capture.f32", snr_db=8.0, seed=100)
    stream = ingest_file("capture.f32", "f32le_real")
    print(f"ingested {len(stream)} samples")

    report = fla_learn(
        segment_stream(stream, n=N, ns=NS, count=2),
        FlaConfig(te=0.9, power_iter=HARNESS_POWER_ITER),
    )
    print(f"learned: {report.learned} (rho = {report.rho_history[0]:.4f})")
    save_template(report.feature, "capture_feature.txt")

    detector = FtmDetector(template=load_template("capture_feature.txt"),
                           power_iter=HARNESS_POWER_ITER)
    cfg = TrialConfig(n=N, ns=NS, trials=500, target_pf=0.1, seed=101)
    threshold = calibrate(detector, NoiseModel(1.0), cfg).threshold
    print(f"calibrated gamma = {threshold.gamma:.4f} for Pf = {cfg.target_pf}")

    for label, snr, seed in (("signal at -14 dB", -14.0, 555), ("noise only", -200.0, 556)):
        write_capture("fresh.f32", snr_db=snr, seed=seed, segments=1)
        fresh = ingest_file("fresh.f32", "f32le_real")
        stat = detector.statistic_from_cov(
            sample_covariance(SensingSegment(fresh, n=N, ns=NS))
        )
        print(f"{label}: statistic = {stat.value:.4f} -> {decide(stat, threshold)}")


if __name__ == "__main__":
    main()
