"""Covariance-based spectrum sensing with blindly learned eigenvector features.

The toolkit covers the full sensing chain: windowed sample-covariance
estimation (batch and streaming), leading-eigenvector extraction by power
iteration, four detectors (known-parameters EC benchmark, blind MME and CAV,
and feature template matching), blind feature learning over consecutive
segments, Monte-Carlo threshold calibration, and a reproducible experiment
harness with CSV artifacts.
"""

from .core import (
    CAV,
    EC,
    EC_AVG,
    FTM,
    H0,
    H1,
    MME,
    CovMatrix,
    DetectorStatistic,
    EigenSystem,
    Feature,
    SampleStream,
    SensingSegment,
    Threshold,
    canonicalize_sign,
    decide,
    segment_stream,
    validate_stream,
)
from .covariance import CovAccumulator, sample_covariance
from .eig import (
    PowerIterConfig,
    extreme_eigenvalues,
    jacobi_eigensystem,
    leading_eigenvector,
    min_eigenvalue,
)
from .detectors import (
    CavDetector,
    EcAvgDetector,
    EcModel,
    FtmDetector,
    MmeDetector,
    cav_statistic,
    ec_avg_statistic,
    ec_statistic,
    ftm_statistic,
    mme_statistic,
)
from .features import (
    FlaConfig,
    LearnReport,
    StabilityReport,
    estimate_noise_similarity_null,
    fla_learn,
    load_template,
    null_similarity_samples,
    save_template,
    similarity,
    stability_experiment,
    te_for_null_quantile,
)
from .simgen import (
    Ar1Model,
    FileModel,
    FirModel,
    GroundTruth,
    NoiseModel,
    SinusoidModel,
    generate,
    ingest_file,
)
from .calibration import (
    CalibrationRun,
    TrialConfig,
    calibrate,
    calibrate_many,
    empirical_gamma,
    measure_pd,
    measure_pf,
)
from .harness import (
    HARNESS_POWER_ITER,
    PRESETS,
    ExperimentSpec,
    RocResult,
    SweepResult,
    SweepRow,
    learn_template,
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
from . import errors

__version__ = "0.1.0"
