"""Bundled AR(1) benchmark scenarios.

All presets share the reference parameterization: order 3, delay 1,
window 500, sigma_sq 1, 20 windows of 500 patterns each. The series
length is 20 * 500 + 3 = 10003 samples: the three extra samples feed the
pattern warm-up so the window grid tiles the patterns exactly and every
regime change lands on a window boundary.

    fig2            one change 0.1 -> 0.3 mid-series, plus two calibration
                    distortions the detector must ignore (gain sqrt(2) from
                    sample 3003; gain sqrt(1/2) with tails beyond +-2
                    doubled from sample 7003)
    fig3a/b/c       one change 0.1 -> 0.2 / 0.3 / 0.4 after 5 of 20 windows
    fig4a/b/c       two changes 0.1 -> 0.4/0.3/0.2 -> 0.1 after 5 and 15
                    windows (detector preset caps at two change-points)
"""

from __future__ import annotations

from math import sqrt

from .detector import DetectorConfig, MultiConfig
from .mmd import KernelConfig
from .ordinal import PatternConfig
from .simulate import AffineMap, ScaleTailsMap, SimSpec

PATTERN = PatternConfig(order=3, delay=1, window=500)
N_WINDOWS = 20
LENGTH = PATTERN.min_series_length(N_WINDOWS)


def _boundary(n_windows: int) -> int:
    """Sample index of the boundary after ``n_windows`` windows."""
    return PATTERN.warmup + n_windows * PATTERN.window


def _detector(max_changes: int = 1) -> DetectorConfig:
    return DetectorConfig(
        pattern=PATTERN,
        kernel=KernelConfig(sigma_sq=1.0),
        statistic="cmmd",
        multi=MultiConfig(max_changes=max_changes),
    )


def _single_change(phi_after: float, change_windows: int,
                   distortions=()) -> SimSpec:
    return SimSpec(
        length=LENGTH,
        coeff_schedule=((0, 0.1), (_boundary(change_windows), phi_after)),
        distortions=tuple(distortions),
        seed=0,
    )


def _double_change(phi_mid: float) -> SimSpec:
    return SimSpec(
        length=LENGTH,
        coeff_schedule=((0, 0.1), (_boundary(5), phi_mid), (_boundary(15), 0.1)),
        seed=0,
    )


_FIG2_DISTORTIONS = (
    (_boundary(6), AffineMap(sqrt(2.0))),
    (_boundary(14), AffineMap(sqrt(0.5))),
    (_boundary(14), ScaleTailsMap(threshold=2.0, factor=2.0)),
)


def _build(name: str) -> tuple[SimSpec, DetectorConfig]:
    builders = {
        "fig2": lambda: (_single_change(0.3, 10, _FIG2_DISTORTIONS), _detector()),
        "fig3a": lambda: (_single_change(0.2, 5), _detector()),
        "fig3b": lambda: (_single_change(0.3, 5), _detector()),
        "fig3c": lambda: (_single_change(0.4, 5), _detector()),
        "fig4a": lambda: (_double_change(0.4), _detector(max_changes=2)),
        "fig4b": lambda: (_double_change(0.3), _detector(max_changes=2)),
        "fig4c": lambda: (_double_change(0.2), _detector(max_changes=2)),
    }
    return builders[name]()


PRESET_NAMES = ("fig2", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig4c")


def get_preset(name: str) -> tuple[SimSpec, DetectorConfig]:
    """Scenario spec (seed 0) and matching detector config for a preset."""
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    return _build(name)
