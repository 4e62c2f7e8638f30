"""Exception types raised across the toolkit.

Every error carries enough context to act on programmatically; the CLI maps
any SensingError to exit code 1.
"""

from __future__ import annotations


class SensingError(Exception):
    """Base class for all specsense errors."""


class NonFiniteSampleError(SensingError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"non-finite sample at index {index}")


class TooShortError(SensingError):
    def __init__(self, required: int, actual: int):
        self.required = required
        self.actual = actual
        super().__init__(f"stream too short: need {required} samples, have {actual}")


class EmptyAccumulatorError(SensingError):
    def __init__(self):
        super().__init__("accumulator has not seen a complete vector yet")


class NoConvergenceError(SensingError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class DimensionTooLargeError(SensingError):
    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(f"dimension {n} exceeds limit {limit}")


class DimensionMismatchError(SensingError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"dimension mismatch: expected {expected}, got {actual}")


class SingularCovarianceError(SensingError):
    def __init__(self, lam_max: float, lam_min: float):
        self.lam_max = lam_max
        self.lam_min = lam_min
        super().__init__(
            f"covariance numerically singular: lam_min={lam_min:.3e} vs lam_max={lam_max:.3e}"
        )


class ZeroDiagonalError(SensingError):
    def __init__(self):
        super().__init__("covariance diagonal is numerically zero")


class DetectorMismatchError(SensingError):
    def __init__(self, stat_id: str, threshold_id: str):
        self.stat_id = stat_id
        self.threshold_id = threshold_id
        super().__init__(
            f"statistic from detector {stat_id!r} compared against {threshold_id!r} threshold"
        )


class InsufficientSegmentsError(SensingError):
    def __init__(self, required: int, actual: int):
        self.required = required
        self.actual = actual
        super().__init__(f"need at least {required} segments, got {actual}")


class MalformedTemplateError(SensingError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"malformed template file at line {line}: {reason}")


class MalformedThresholdError(SensingError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"malformed threshold file at line {line}: {reason}")


class DimensionOutOfRangeError(SensingError):
    def __init__(self, n: int, lo: int, hi: int):
        self.n = n
        self.lo = lo
        self.hi = hi
        super().__init__(f"dimension {n} outside supported range [{lo}, {hi}]")


class UnstableModelError(SensingError):
    def __init__(self, detail: str):
        super().__init__(f"unstable signal model: {detail}")


class FileIngestError(SensingError):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"cannot ingest {path}: {reason}")
