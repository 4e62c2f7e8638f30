import numpy as np
import pytest

from specsense import (
    Ar1Model,
    CavDetector,
    FtmDetector,
    MmeDetector,
    NoiseModel,
    PowerIterConfig,
    TrialConfig,
    calibrate,
    calibrate_many,
    empirical_gamma,
    measure_pd,
    measure_pf,
)

FAST_PI = PowerIterConfig(max_iters=300_000, residual_tol=1e-6)
FAST_CFG = TrialConfig(n=16, ns=2000, trials=500, target_pf=0.1, seed=11)


@pytest.fixture(scope="module")
def learned_template():
    from specsense import ExperimentSpec, learn_template

    spec = ExperimentSpec(signal=Ar1Model(0.9), noise=NoiseModel(1.0), n=16, ns=2000, seed=11)
    return learn_template(spec)


class TestEmpiricalGamma:
    def test_order_statistic_example(self):
        stats = np.arange(1.0, 11.0)  # 1..10
        assert empirical_gamma(stats, target_pf=0.2) == 8.0

    def test_near_total_false_alarm_rate_gives_minimum(self):
        stats = np.arange(1.0, 11.0)
        assert empirical_gamma(stats, target_pf=0.999) == 1.0

    def test_small_pf_gives_maximum(self):
        stats = np.arange(1.0, 11.0)
        assert empirical_gamma(stats, target_pf=0.05) == 10.0

    def test_unsorted_input_sorted_internally(self, rng):
        stats = rng.permutation(np.arange(1.0, 101.0))
        assert empirical_gamma(stats, target_pf=0.1) == 90.0


class TestCalibrate:
    def test_run_carries_sorted_nulls_and_threshold(self):
        run = calibrate(CavDetector(), NoiseModel(1.0), FAST_CFG)
        assert np.all(np.diff(run.null_stats) >= 0)
        assert run.null_stats.shape == (FAST_CFG.trials,)
        assert run.threshold.gamma == empirical_gamma(run.null_stats, 0.1)
        assert run.threshold.calibration_trials == FAST_CFG.trials
        assert run.threshold.gamma > 1.0  # CAV nulls exceed 1 by construction

    def test_fresh_noise_false_alarm_rate_near_target(self, learned_template):
        detectors = {
            "MME": MmeDetector(power_iter=FAST_PI),
            "CAV": CavDetector(),
            "FTM": FtmDetector(template=learned_template, power_iter=FAST_PI),
        }
        runs = calibrate_many(detectors, NoiseModel(1.0), FAST_CFG)
        thresholds = {k: r.threshold for k, r in runs.items()}
        pf = measure_pf(detectors, thresholds, NoiseModel(1.0), FAST_CFG)
        for name, rate in pf.items():
            # 3-sigma binomial band around 0.1 at 500 trials, plus the
            # quantile estimation error of gamma itself
            assert abs(rate - 0.1) <= 0.055, (name, rate)

    def test_shared_draws_match_single_detector_calibration(self):
        solo = calibrate(CavDetector(), NoiseModel(1.0), FAST_CFG)
        joint = calibrate_many(
            {"CAV": CavDetector(), "MME": MmeDetector(power_iter=FAST_PI)},
            NoiseModel(1.0), FAST_CFG,
        )
        # same seed path: identical null draws, identical CAV threshold
        assert joint["CAV"].threshold.gamma == solo.threshold.gamma

    def test_too_few_trials_for_tail_rejected(self):
        cfg = TrialConfig(n=16, ns=200, trials=50, target_pf=0.1, seed=1)
        with pytest.raises(ValueError):
            calibrate(CavDetector(), NoiseModel(1.0), cfg)


class TestMeasurePd:
    def test_saturated_regime(self):
        cfg = TrialConfig(n=16, ns=2000, trials=200, target_pf=0.1, seed=13)
        run = calibrate(CavDetector(), NoiseModel(1.0), cfg)
        pd = measure_pd(CavDetector(), run.threshold, Ar1Model(0.9), NoiseModel(1.0), 30.0, cfg)
        assert pd >= 0.99

    def test_vanishing_signal_limit_matches_false_alarm_rate(self):
        cfg = TrialConfig(n=16, ns=2000, trials=400, target_pf=0.1, seed=14)
        run = calibrate(CavDetector(), NoiseModel(1.0), cfg)
        pd = measure_pd(CavDetector(), run.threshold, Ar1Model(0.9), NoiseModel(1.0), -60.0, cfg)
        assert 0.05 <= pd <= 0.15

    @pytest.mark.slow
    def test_ftm_beats_cav_at_cav_half_power_point(self, learned_template):
        # paired comparison at the SNR where CAV sits near Pd = 0.5
        cfg = TrialConfig(n=16, ns=2000, trials=1000, target_pf=0.1, seed=15)
        detectors = {
            "CAV": CavDetector(),
            "FTM": FtmDetector(template=learned_template, power_iter=FAST_PI),
        }
        runs = calibrate_many(detectors, NoiseModel(1.0), cfg)
        pd = {
            name: measure_pd(det, runs[name].threshold, Ar1Model(0.9), NoiseModel(1.0), -15.0, cfg)
            for name, det in detectors.items()
        }
        assert 0.3 <= pd["CAV"] <= 0.7  # the chosen operating point
        assert pd["FTM"] > pd["CAV"]

    def test_monotone_in_snr_with_slack(self, learned_template):
        cfg = TrialConfig(n=16, ns=2000, trials=300, target_pf=0.1, seed=16)
        det = FtmDetector(template=learned_template, power_iter=FAST_PI)
        thr = calibrate(det, NoiseModel(1.0), cfg).threshold
        pds = [
            measure_pd(det, thr, Ar1Model(0.9), NoiseModel(1.0), snr, cfg)
            for snr in (-18.0, -14.0, -10.0, -6.0)
        ]
        for lo, hi in zip(pds, pds[1:]):
            assert hi >= lo - 0.02

    def test_raising_gamma_never_raises_rates(self):
        # exact decision-rule monotonicity on one fixed statistic pool
        cfg = TrialConfig(n=16, ns=1000, trials=200, target_pf=0.1, seed=17)
        run = calibrate(CavDetector(), NoiseModel(1.0), cfg)
        stats = run.null_stats
        gammas = np.quantile(stats, [0.1, 0.5, 0.9, 0.99])
        rates = [float(np.mean(stats > g)) for g in gammas]
        assert all(b <= a for a, b in zip(rates, rates[1:]))

    def test_detector_threshold_mismatch_propagates(self, learned_template):
        from specsense.errors import DetectorMismatchError

        cfg = TrialConfig(n=16, ns=1000, trials=150, target_pf=0.1, seed=18)
        thr = calibrate(CavDetector(), NoiseModel(1.0), cfg).threshold
        with pytest.raises(DetectorMismatchError):
            measure_pd(
                FtmDetector(template=learned_template, power_iter=FAST_PI),
                thr, Ar1Model(0.9), NoiseModel(1.0), 0.0, cfg,
            )
