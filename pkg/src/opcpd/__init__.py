"""opcpd: change-point detection in long univariate time series.

The method compares ordinal-pattern distributions across non-overlapping
windows with a (bias-corrected) kernel maximum mean discrepancy, which
makes it fast (quadratic in the window count, linear in the samples) and
invariant under unknown monotone recalibration of the signal.

Functional API: :func:`detect_single` / :func:`detect_multiple` plus the
building blocks in :mod:`opcpd.ordinal`, :mod:`opcpd.mmd`,
:mod:`opcpd.simulate`. Estimator API: :class:`ChangePointDetector` and
:class:`OrdinalPatternDistributions`. Command line: ``opcpd detect | scan
| simulate | mc``.
"""

__version__ = "0.1.0"

from .detector import (ChangePointEstimate, DetectorConfig, MultiConfig,
                       detect_multiple, detect_single, window_index_to_sample)
from .estimators import ChangePointDetector, OrdinalPatternDistributions
from .exceptions import (InsufficientDataError, InvalidSampleError,
                         ReplicationError, SeriesFormatError, WindowSizeWarning)
from .mmd import (KernelConfig, ScanResult, cmmd_from_scan, mmd_direct,
                  mmd_scan, rbf_kernel)
from .ordinal import (PatternConfig, PatternSequence, encode_pattern,
                      extract_pattern_sequence, pattern_rank, pattern_unrank,
                      windowed_distributions)
from .presets import PRESET_NAMES, get_preset
from .simulate import (AffineMap, McReport, MonotoneMap, PiecewiseLinearMap,
                       ScaleTailsMap, SimSpec, apply_distortions, derive_seed,
                       monte_carlo, simulate_ar1)

__all__ = [
    "__version__",
    "AffineMap",
    "ChangePointDetector",
    "ChangePointEstimate",
    "DetectorConfig",
    "InsufficientDataError",
    "InvalidSampleError",
    "KernelConfig",
    "McReport",
    "MonotoneMap",
    "MultiConfig",
    "OrdinalPatternDistributions",
    "PatternConfig",
    "PatternSequence",
    "PiecewiseLinearMap",
    "PRESET_NAMES",
    "ReplicationError",
    "ScaleTailsMap",
    "ScanResult",
    "SeriesFormatError",
    "SimSpec",
    "WindowSizeWarning",
    "apply_distortions",
    "cmmd_from_scan",
    "derive_seed",
    "detect_multiple",
    "detect_single",
    "encode_pattern",
    "extract_pattern_sequence",
    "get_preset",
    "mmd_direct",
    "mmd_scan",
    "monte_carlo",
    "pattern_rank",
    "pattern_unrank",
    "rbf_kernel",
    "simulate_ar1",
    "window_index_to_sample",
    "windowed_distributions",
]
