"""Scikit-learn style wrappers around the functional pipeline.

Both classes are thin: parameters mirror the dataclass configs one-to-one
so ``get_params`` / ``set_params`` / ``clone`` work, and all computation
stays in the functional modules.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .detector import DetectorConfig, MultiConfig, detect_multiple
from .mmd import KernelConfig
from .ordinal import PatternConfig, extract_pattern_sequence, windowed_distributions
from .validation import check_series


class OrdinalPatternDistributions(TransformerMixin, BaseEstimator):
    """Transform a univariate series into windowed ordinal-pattern frequencies.

    ``transform`` maps a series of ``L`` samples to an array of shape
    ``(n_windows, (order + 1)!)`` whose rows are probability vectors, one
    per non-overlapping window of ``window`` pattern positions. The rows
    are invariant under strictly increasing transformations of the input.
    """

    def __init__(self, order: int = 3, delay: int = 1, window: int = 500):
        self.order = order
        self.delay = delay
        self.window = window

    def _config(self) -> PatternConfig:
        return PatternConfig(order=self.order, delay=self.delay, window=self.window)

    def fit(self, X, y=None):
        """Validate parameters; the transform itself is stateless."""
        config = self._config()
        self.n_patterns_ = config.n_patterns
        return self

    def transform(self, X) -> np.ndarray:
        config = self._config()
        patterns = extract_pattern_sequence(check_series(X, name="X"), config)
        return windowed_distributions(patterns, config)


class ChangePointDetector(BaseEstimator):
    """Locate change-points in a univariate series.

    ``fit(X)`` runs the detection and exposes the results as attributes;
    ``predict(X)`` returns change-point sample indices without storing
    anything. There is no trained state beyond the parameters, so both can
    be called on a fresh instance.

    Attributes after ``fit``:
        estimates_:     list of :class:`~opcpd.detector.ChangePointEstimate`.
        change_points_: int array of change-point sample indices, ascending.
        scores_:        statistic value at each estimate.
        n_windows_:     window count of the full series.
    """

    def __init__(self, order: int = 3, delay: int = 1, window: int = 500,
                 sigma_sq: float = 1.0, statistic: str = "cmmd",
                 correction_scale: float = 1.0, max_changes: int = 1,
                 min_segment_windows: int = 2,
                 score_threshold: float | None = None):
        self.order = order
        self.delay = delay
        self.window = window
        self.sigma_sq = sigma_sq
        self.statistic = statistic
        self.correction_scale = correction_scale
        self.max_changes = max_changes
        self.min_segment_windows = min_segment_windows
        self.score_threshold = score_threshold

    def _config(self) -> DetectorConfig:
        return DetectorConfig(
            pattern=PatternConfig(order=self.order, delay=self.delay,
                                  window=self.window),
            kernel=KernelConfig(sigma_sq=self.sigma_sq),
            statistic=self.statistic,
            correction_scale=self.correction_scale,
            multi=MultiConfig(max_changes=self.max_changes,
                              min_segment_windows=self.min_segment_windows,
                              score_threshold=self.score_threshold),
        )

    def fit(self, X, y=None):
        config = self._config()
        x = check_series(X, name="X")
        estimates = detect_multiple(x, config)
        self.estimates_ = estimates
        self.change_points_ = np.array([e.sample_index for e in estimates],
                                       dtype=np.int64)
        self.scores_ = np.array([e.score for e in estimates], dtype=np.float64)
        self.n_windows_ = max(0, x.size - config.pattern.warmup) // self.window
        return self

    def predict(self, X) -> np.ndarray:
        """Change-point sample indices of ``X`` under the current parameters."""
        estimates = detect_multiple(check_series(X, name="X"), self._config())
        return np.array([e.sample_index for e in estimates], dtype=np.int64)

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X, y).change_points_
