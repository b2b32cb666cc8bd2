"""Ordinal patterns and windowed pattern distributions.

An ordinal pattern describes how a short run of samples is ordered, not
what its values are. A pattern of order ``d`` looks at ``d + 1`` samples
spaced ``delay`` apart and records the permutation that lists their lag
indices from the largest value down to the smallest. Because only order
relations enter, the patterns (and everything built on them) are invariant
under strictly increasing transformations of the measured values, which is
what makes them robust against unknown or drifting sensor calibration.

Sliced into non-overlapping windows, the relative frequencies of the
``(d + 1)!`` patterns give a compact distributional fingerprint of each
stretch of the series; downstream stages compare those fingerprints.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import factorial

import numpy as np

from .exceptions import InsufficientDataError, InvalidSampleError, WindowSizeWarning
from .validation import check_series

# Rule of thumb for stable relative frequencies: the window should hold at
# least this many patterns per alphabet entry.  Violations warn, not fail;
# tiny windows are legitimate in tests and exploratory runs.
WINDOW_ALPHABET_FACTOR = 10


@dataclass(frozen=True)
class PatternConfig:
    """Parameters of the pattern extraction and windowing stage.

    order:  number of increments one pattern spans; the alphabet has
            ``(order + 1)!`` patterns (24 for the default order 3).
    delay:  spacing, in samples, between the values entering one pattern.
    window: number of consecutive pattern positions aggregated into one
            distribution.
    """

    order: int = 3
    delay: int = 1
    window: int = 500

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.delay < 1:
            raise ValueError(f"delay must be >= 1, got {self.delay}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.window < WINDOW_ALPHABET_FACTOR * self.n_patterns:
            warnings.warn(
                f"window={self.window} is small for a {self.n_patterns}-pattern "
                f"alphabet; frequencies will be noisy "
                f"(recommended window >= {WINDOW_ALPHABET_FACTOR * self.n_patterns})",
                WindowSizeWarning,
                stacklevel=2,
            )

    @property
    def n_patterns(self) -> int:
        return factorial(self.order + 1)

    @property
    def warmup(self) -> int:
        """Leading samples consumed before the first pattern anchor."""
        return self.order * self.delay

    def min_series_length(self, n_windows: int = 1) -> int:
        """Shortest raw series that yields ``n_windows`` full windows."""
        return self.warmup + n_windows * self.window


@dataclass(frozen=True)
class PatternSequence:
    """Pattern codes plus the raw-sample index anchoring the first pattern.

    ``ids[j]`` is the code of the pattern anchored at raw sample
    ``first_sample_index + j``. The array is frozen; sequences are safe to
    share between threads.
    """

    ids: np.ndarray
    first_sample_index: int

    def __post_init__(self):
        ids = np.array(self.ids, dtype=np.int64, copy=True)
        ids.flags.writeable = False
        object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return len(self.ids)


def encode_pattern(values) -> tuple[int, ...]:
    """Ordinal pattern of one lag vector, most recent sample first.

    ``values[i]`` is the sample ``i * delay`` steps in the past. The result
    ``(r_0, ..., r_d)`` lists lag indices by descending value; equal values
    put the larger lag index first, so every input (ties included, as
    produced by quantized ADC output) maps to exactly one pattern.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("values must be a 1-D array of at least 2 samples")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise InvalidSampleError(f"values[{i}] is not finite ({arr[i]!r})", index=i)
    # Reversing a stable ascending argsort gives descending order with ties
    # broken toward the larger lag index.
    order = np.argsort(arr, kind="stable")[::-1]
    return tuple(int(i) for i in order)


def pattern_rank(permutation) -> int:
    """Lexicographic rank of a permutation of {0, ..., d} (Lehmer code)."""
    perm = tuple(int(r) for r in permutation)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {permutation!r}")
    code = 0
    for j, r in enumerate(perm):
        smaller_before = sum(1 for prev in perm[:j] if prev < r)
        code += (r - smaller_before) * factorial(n - 1 - j)
    return code


def pattern_unrank(code: int, order: int) -> tuple[int, ...]:
    """Permutation of {0, ..., order} with the given lexicographic rank."""
    n = order + 1
    if not 0 <= code < factorial(n):
        raise ValueError(f"code {code} out of range for order {order} "
                         f"(alphabet size {factorial(n)})")
    remaining = list(range(n))
    perm = []
    for j in range(n):
        digit, code = divmod(code, factorial(n - 1 - j))
        perm.append(remaining.pop(digit))
    return tuple(perm)


def _rank_rows(perms: np.ndarray) -> np.ndarray:
    """Lexicographic rank of each row; vectorized over rows."""
    n = perms.shape[1]
    codes = np.zeros(len(perms), dtype=np.int64)
    for j in range(n - 1):
        r = perms[:, j]
        smaller_before = (perms[:, :j] < r[:, None]).sum(axis=1)
        codes += (r - smaller_before) * factorial(n - 1 - j)
    return codes


def extract_pattern_sequence(series, config: PatternConfig) -> PatternSequence:
    """Encode every pattern of a raw series.

    Pattern ``j`` is anchored at sample ``t = warmup + j`` and covers the
    samples ``t, t - delay, ..., t - order * delay``; anchors advance one
    sample at a time, so a series of length ``L`` yields
    ``L - order * delay`` patterns. The first ``order * delay`` samples
    produce no pattern of their own and act as warm-up.
    """
    x = check_series(series)
    warmup = config.warmup
    if x.size <= warmup:
        raise InsufficientDataError(
            f"series of length {x.size} yields no pattern with order="
            f"{config.order}, delay={config.delay}; need at least {warmup + 1} samples",
            min_length=warmup + 1,
        )
    n_pat = x.size - warmup
    anchors = warmup + np.arange(n_pat)
    lag_index = anchors[:, None] - np.arange(config.order + 1)[None, :] * config.delay
    perms = np.argsort(x[lag_index], axis=1, kind="stable")[:, ::-1]
    return PatternSequence(ids=_rank_rows(perms), first_sample_index=warmup)


def windowed_distributions(patterns: PatternSequence, config: PatternConfig) -> np.ndarray:
    """Relative pattern frequencies over non-overlapping windows.

    Returns an array of shape ``(n_windows, (order + 1)!)`` where row ``k``
    holds the counts of window ``k`` (pattern positions ``[k * window,
    (k + 1) * window)``) divided by ``window``. Trailing positions that do
    not fill a window are dropped, so every row sums to exactly one.
    """
    ids = np.asarray(patterns.ids)
    n_windows = len(ids) // config.window
    if n_windows < 1:
        raise InsufficientDataError(
            f"{len(ids)} patterns cannot fill a window of {config.window}",
            min_length=config.window,
        )
    used = ids[: n_windows * config.window]
    rows = np.arange(n_windows, dtype=np.int64).repeat(config.window)
    counts = np.bincount(
        rows * config.n_patterns + used,
        minlength=n_windows * config.n_patterns,
    ).reshape(n_windows, config.n_patterns)
    return counts / float(config.window)
