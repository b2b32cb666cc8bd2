"""End-to-end change-point estimation on raw series.

The pipeline per analyzed segment: extract the pattern sequence, aggregate
it into non-overlapping window distributions, scan all splits with the
kernel statistic, and map the winning split back to a raw-sample index.
Multiple change-points come from recursive bisection of the segments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InsufficientDataError
from .mmd import KernelConfig, ScanResult, mmd_scan
from .ordinal import PatternConfig, extract_pattern_sequence, windowed_distributions
from .validation import check_series

STATISTICS = ("mmd", "cmmd")


@dataclass(frozen=True)
class MultiConfig:
    """Recursion policy for multiple change-point detection.

    max_changes:         cap on the number of reported change-points.
    min_segment_windows: a segment is only split when it holds at least
                         twice this many windows.
    score_threshold:     when set, splits scoring below it are rejected
                         (and their segments are not bisected further).
    """

    max_changes: int = 1
    min_segment_windows: int = 2
    score_threshold: float | None = None

    def __post_init__(self):
        if self.max_changes < 1:
            raise ValueError(f"max_changes must be >= 1, got {self.max_changes}")
        if self.min_segment_windows < 2:
            raise ValueError(
                f"min_segment_windows must be >= 2, got {self.min_segment_windows}")


@dataclass(frozen=True)
class DetectorConfig:
    """Everything a detection run depends on."""

    pattern: PatternConfig = field(default_factory=PatternConfig)
    kernel: KernelConfig = field(default_factory=KernelConfig)
    statistic: str = "cmmd"
    correction_scale: float = 1.0
    multi: MultiConfig | None = None

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(
                f"statistic must be one of {STATISTICS}, got {self.statistic!r}")
        if self.correction_scale < 0:
            raise ValueError(
                f"correction_scale must be >= 0, got {self.correction_scale}")


@dataclass(frozen=True)
class ChangePointEstimate:
    """One detected change-point.

    split:       (m', n') window counts on either side.
    sample_index: boundary between windows m'-1 and m', in raw-sample
                 coordinates of the full series.
    precision_half_width: localization precision; the true change lies
                 within about this many samples of ``sample_index``.
    score:       value of the configured statistic at the split.
    scan:        full scan of the analyzed segment, kept for reporting.
    segment:     [start, stop) of the analyzed segment in raw coordinates.
    """

    split: tuple[int, int]
    sample_index: int
    precision_half_width: float
    score: float
    scan: ScanResult
    segment: tuple[int, int]


def window_index_to_sample(segment_start: int, m_prime: int,
                           config: PatternConfig) -> int:
    """Raw-sample index of the boundary after the first ``m_prime`` windows.

    The first pattern anchors ``order * delay`` samples into the segment
    and anchors advance one sample per pattern position, so the boundary
    after ``m_prime`` windows anchors at ``segment_start + order * delay +
    m_prime * window``.
    """
    if m_prime < 1:
        raise ValueError(f"m_prime must be >= 1, got {m_prime}")
    return segment_start + config.warmup + m_prime * config.window


def _segment_window_count(length: int, config: PatternConfig) -> int:
    return max(0, length - config.warmup) // config.window


def _detect_segment(x: np.ndarray, start: int, stop: int,
                    config: DetectorConfig) -> ChangePointEstimate:
    pattern_cfg = config.pattern
    min_len = pattern_cfg.min_series_length(2)
    if stop - start < min_len:
        raise InsufficientDataError(
            f"segment of {stop - start} samples yields fewer than 2 windows "
            f"(order={pattern_cfg.order}, delay={pattern_cfg.delay}, "
            f"window={pattern_cfg.window}); need at least {min_len} samples",
            min_length=min_len,
        )
    patterns = extract_pattern_sequence(x[start:stop], pattern_cfg)
    distributions = windowed_distributions(patterns, pattern_cfg)
    scan = mmd_scan(distributions, config.kernel,
                    correction_scale=config.correction_scale)
    index = scan.argmax(config.statistic)
    m_prime, n_prime = scan.split(index)
    return ChangePointEstimate(
        split=(m_prime, n_prime),
        sample_index=window_index_to_sample(start, m_prime, pattern_cfg),
        precision_half_width=pattern_cfg.window * pattern_cfg.delay / 2.0,
        score=float(scan.statistic(config.statistic)[index]),
        scan=scan,
        segment=(start, stop),
    )


def detect_single(series, config: DetectorConfig | None = None) -> ChangePointEstimate:
    """Estimate one change-point as the argmax split of the whole series."""
    config = config or DetectorConfig()
    x = check_series(series)
    return _detect_segment(x, 0, x.size, config)


def detect_multiple(series, config: DetectorConfig | None = None) -> list[ChangePointEstimate]:
    """Estimate several change-points by recursive bisection.

    Segments are processed longest first. A segment's best split is
    recorded when the segment holds at least ``2 * min_segment_windows``
    windows and (when a threshold is set) the score clears it; the two
    sub-segments then queue up for the same treatment. Recursion stops at
    ``max_changes`` accepted splits. Undersized or rejected segments are
    dropped silently, except that an input too short for any detection
    raises, exactly as :func:`detect_single` would.
    """
    config = config or DetectorConfig()
    x = check_series(series)
    multi = config.multi or MultiConfig()

    if x.size < config.pattern.min_series_length(2):
        _detect_segment(x, 0, x.size, config)  # raises InsufficientDataError

    estimates: list[ChangePointEstimate] = []
    segments: list[tuple[int, int]] = [(0, x.size)]
    while segments and len(estimates) < multi.max_changes:
        # longest segment first; ties toward the earlier one
        segments.sort(key=lambda span: (span[0] - span[1], span[0]))
        start, stop = segments.pop(0)
        if _segment_window_count(stop - start, config.pattern) < 2 * multi.min_segment_windows:
            continue
        estimate = _detect_segment(x, start, stop, config)
        if multi.score_threshold is not None and estimate.score < multi.score_threshold:
            continue
        estimates.append(estimate)
        segments.append((start, estimate.sample_index))
        segments.append((estimate.sample_index, stop))
    return sorted(estimates, key=lambda e: e.sample_index)
