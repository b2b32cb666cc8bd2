"""Seeded AR(1) simulation with calibration distortions and a Monte Carlo
harness for scoring detectors over many replications.

Reproducibility contract: a :class:`SimSpec` plus a seed produces a
bit-identical series on every run and thread count. Normal variates come
from the inverse CDF applied to 53-bit midpoint uniforms of a PCG64
stream, so the draw sequence is pinned to the documented scheme rather
than to a library's current sampler.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from math import sqrt

import numpy as np
from scipy.signal import lfilter
from scipy.special import ndtri

from .detector import DetectorConfig, detect_multiple, detect_single
from .exceptions import ReplicationError
from .validation import check_positive

_MASK64 = (1 << 64) - 1
THREADS_ENV_VAR = "OP_CPD_THREADS"


class MonotoneMap:
    """A strictly increasing map of the real line, applied elementwise.

    Subclasses validate their parameters at construction, so any instance
    is safe to use as a calibration distortion: it can never reorder
    values within one contiguously mapped stretch.
    """

    def __call__(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class AffineMap(MonotoneMap):
    """x -> scale * x + offset with scale > 0."""

    scale: float
    offset: float = 0.0

    def __post_init__(self):
        check_positive("scale", self.scale)

    def __call__(self, x):
        return self.scale * np.asarray(x, dtype=np.float64) + self.offset

    def describe(self):
        return {"kind": "affine", "scale": self.scale, "offset": self.offset}


@dataclass(frozen=True)
class PiecewiseLinearMap(MonotoneMap):
    """Linear interpolation through increasing knots, extended by the end
    slopes outside the knot range."""

    knots_x: tuple[float, ...]
    knots_y: tuple[float, ...]

    def __post_init__(self):
        xs = np.asarray(self.knots_x, dtype=np.float64)
        ys = np.asarray(self.knots_y, dtype=np.float64)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("need matching 1-D knot arrays of length >= 2")
        if not (np.all(np.diff(xs) > 0) and np.all(np.diff(ys) > 0)):
            raise ValueError("knots must be strictly increasing in x and y "
                             "(all segment slopes positive)")
        object.__setattr__(self, "knots_x", tuple(float(v) for v in xs))
        object.__setattr__(self, "knots_y", tuple(float(v) for v in ys))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        xs = np.asarray(self.knots_x)
        ys = np.asarray(self.knots_y)
        out = np.interp(x, xs, ys)
        lo = x < xs[0]
        hi = x > xs[-1]
        slope_lo = (ys[1] - ys[0]) / (xs[1] - xs[0])
        slope_hi = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        out = np.where(lo, ys[0] + (x - xs[0]) * slope_lo, out)
        out = np.where(hi, ys[-1] + (x - xs[-1]) * slope_hi, out)
        return out

    def describe(self):
        return {"kind": "piecewise_linear",
                "knots_x": list(self.knots_x), "knots_y": list(self.knots_y)}


@dataclass(frozen=True)
class ScaleTailsMap(MonotoneMap):
    """Identity on [-threshold, threshold], x -> factor * x outside.

    With factor > 1 the branches never overlap, so the map is strictly
    increasing despite the jumps at the thresholds.
    """

    threshold: float
    factor: float

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")
        if not self.factor > 1:
            raise ValueError(f"factor must be > 1, got {self.factor}")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(np.abs(x) <= self.threshold, x, self.factor * x)

    def describe(self):
        return {"kind": "scale_tails", "threshold": self.threshold,
                "factor": self.factor}


@dataclass(frozen=True)
class SimSpec:
    """Piecewise AR(1) scenario.

    coeff_schedule lists ``(start_index, phi)`` segments; starts must be
    strictly increasing, begin at 0, and stay below ``length``, so the
    segments tile [0, length). distortions lists ``(start_index, map)``
    calibration changes: each start opens a range that runs to the next
    distinct start (or the end), entries sharing a start compose in list
    order, and samples before the first start pass through unchanged.
    """

    length: int
    coeff_schedule: tuple[tuple[int, float], ...]
    innovation_sd: float = 1.0
    distortions: tuple[tuple[int, MonotoneMap], ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff_schedule",
                           tuple((int(s), float(p)) for s, p in self.coeff_schedule))
        object.__setattr__(self, "distortions", tuple(self.distortions))
        if self.length < 1:
            raise ValueError(f"length must be >= 1, got {self.length}")
        if not self.coeff_schedule:
            raise ValueError("coeff_schedule must not be empty")
        starts = [s for s, _ in self.coeff_schedule]
        if starts[0] != 0:
            raise ValueError(f"first schedule segment must start at 0, got {starts[0]}")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError(f"schedule starts must be strictly increasing: {starts}")
        if starts[-1] >= self.length:
            raise ValueError(f"schedule start {starts[-1]} is beyond the series "
                             f"(length {self.length})")
        for _, phi in self.coeff_schedule:
            if not abs(phi) < 1:
                raise ValueError(f"|phi| must be < 1 for stationarity, got {phi}")
        check_positive("innovation_sd", self.innovation_sd)
        for start, dist in self.distortions:
            if start < 0:
                raise ValueError(f"distortion start must be >= 0, got {start}")
            if not isinstance(dist, MonotoneMap):
                raise ValueError(f"distortion at {start} is not a MonotoneMap: {dist!r}")
        if not 0 <= self.seed < (1 << 64):
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def describe(self) -> dict:
        return {
            "length": self.length,
            "coeff_schedule": [[s, p] for s, p in self.coeff_schedule],
            "innovation_sd": self.innovation_sd,
            "distortions": [{"start": s, **d.describe()} for s, d in self.distortions],
            "seed": self.seed,
        }


def derive_seed(base_seed: int, replication: int) -> int:
    """SplitMix64 mix of (base_seed, replication).

    Gives each replication an independent, documented 64-bit stream seed
    without any shared generator state.
    """
    z = (base_seed + (replication + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _standard_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    # inverse CDF on (k + 0.5) / 2^53 keeps u strictly inside (0, 1)
    u = (rng.integers(0, 1 << 53, size=n, dtype=np.uint64) + 0.5) * 2.0**-53
    return ndtri(u)


def apply_distortions(series, distortions) -> np.ndarray:
    """Apply piecewise calibration maps; always returns a fresh array.

    Ranges run from each distinct start index to the next one (or the
    end); entries sharing a start compose in list order.
    """
    x = np.array(series, dtype=np.float64, copy=True)
    starts = sorted({start for start, _ in distortions})
    for i, start in enumerate(starts):
        stop = starts[i + 1] if i + 1 < len(starts) else x.size
        segment = slice(start, stop)
        for entry_start, dist in distortions:
            if entry_start == start:
                x[segment] = dist(x[segment])
    return x


def simulate_ar1(spec: SimSpec) -> np.ndarray:
    """Generate one series from a piecewise AR(1) spec, distortions applied.

    Within each schedule segment, ``X_t = phi * X_{t-1} + sd * eps_t``; the
    presample value is drawn from the stationary law of the first segment
    (variance ``sd^2 / (1 - phi^2)``) so the series starts in regime rather
    than burning in from zero. Draw order is fixed: one presample normal,
    then one innovation per sample.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    eps = _standard_normals(rng, spec.length + 1)
    phi0 = spec.coeff_schedule[0][1]
    x_prev = spec.innovation_sd / sqrt(1.0 - phi0 * phi0) * eps[0]

    out = np.empty(spec.length, dtype=np.float64)
    starts = [s for s, _ in spec.coeff_schedule] + [spec.length]
    for (start, phi), stop in zip(spec.coeff_schedule, starts[1:]):
        drive = spec.innovation_sd * eps[1 + start : 1 + stop]
        segment, _ = lfilter([1.0], [1.0, -phi], drive, zi=np.array([phi * x_prev]))
        out[start:stop] = segment
        x_prev = segment[-1]
    return apply_distortions(out, spec.distortions)


@dataclass(frozen=True)
class McReport:
    """Histogram of detection outcomes over replications.

    ``mode`` is ``"split"`` (keys are (m', n') pairs from single
    detection) or ``"sample_pair"`` (keys are ascending tuples of
    change-point sample indices from multiple detection). Frequencies sum
    to one.
    """

    histogram: dict[tuple, float]
    reps: int
    mode: str
    scenario: dict

    def modal_key(self) -> tuple:
        return max(self.histogram, key=lambda k: (self.histogram[k], k))

    def mass(self, keys) -> float:
        wanted = set(tuple(k) for k in keys)
        return sum(f for k, f in self.histogram.items() if k in wanted)


def _resolve_threads(n_threads: int | None) -> int:
    if n_threads is not None:
        return max(1, int(n_threads))
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {env!r}")
    return 1


def monte_carlo(spec_template: SimSpec, config: DetectorConfig, reps: int,
                base_seed: int, n_threads: int | None = None) -> McReport:
    """Replicate simulate-then-detect and histogram the outcomes.

    Replication ``r`` reseeds the spec with ``derive_seed(base_seed, r)``.
    When the detector config caps recursion at one change the histogram
    keys are splits (m', n'); with ``max_changes > 1`` the keys are the
    ascending tuples of detected sample indices. Replications may run on a
    thread pool (``n_threads`` argument, falling back to the
    ``OP_CPD_THREADS`` env var); results are aggregated by replication
    index so the report never depends on scheduling.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    multi = config.multi
    pair_mode = multi is not None and multi.max_changes > 1

    def run_one(r: int) -> tuple:
        try:
            spec = replace(spec_template, seed=derive_seed(base_seed, r))
            series = simulate_ar1(spec)
            if pair_mode:
                return tuple(e.sample_index for e in detect_multiple(series, config))
            return detect_single(series, config).split
        except Exception as exc:
            raise ReplicationError(f"replication {r} failed: {exc}",
                                   replication=r) from exc

    workers = _resolve_threads(n_threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            keys = list(pool.map(run_one, range(reps)))
    else:
        keys = [run_one(r) for r in range(reps)]

    counts = Counter(keys)
    histogram = {key: count / reps for key, count in sorted(counts.items())}
    return McReport(
        histogram=histogram,
        reps=reps,
        mode="sample_pair" if pair_mode else "split",
        scenario={"sim": spec_template.describe(), "base_seed": base_seed,
                  "detector": describe_detector(config)},
    )


def describe_detector(config: DetectorConfig) -> dict:
    multi = config.multi
    return {
        "order": config.pattern.order,
        "delay": config.pattern.delay,
        "window": config.pattern.window,
        "sigma_sq": config.kernel.sigma_sq,
        "statistic": config.statistic,
        "correction_scale": config.correction_scale,
        "max_changes": multi.max_changes if multi else 1,
        "min_segment_windows": multi.min_segment_windows if multi else 2,
        "score_threshold": multi.score_threshold if multi else None,
    }
