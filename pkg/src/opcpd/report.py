"""Structured detection reports.

A report is a plain dict of JSON-native values with a fixed key order, so
it serializes reproducibly and round-trips losslessly through
``json.dumps`` / ``json.loads``. Scan curves are emitted per analyzed
segment; window distributions are optional (they are bulky and only
needed for ribbon-style plots).
"""

from __future__ import annotations

import json

import numpy as np

from . import __version__
from .detector import ChangePointEstimate, DetectorConfig
from .ordinal import extract_pattern_sequence, windowed_distributions
from .simulate import describe_detector


def scan_rows(scan) -> list[dict]:
    """One row per split: split_index, m_prime, n_prime, mmd, cmmd."""
    rows = []
    for i in range(scan.n_windows - 1):
        m_prime, n_prime = scan.split(i)
        rows.append({
            "split_index": i,
            "m_prime": m_prime,
            "n_prime": n_prime,
            "mmd": float(scan.mmd[i]),
            "cmmd": float(scan.cmmd[i]),
        })
    return rows


def build_report(series, config: DetectorConfig,
                 estimates: list[ChangePointEstimate],
                 seed: int | None = None,
                 emit_distributions: bool = False) -> dict:
    x = np.asarray(series, dtype=np.float64)
    segments = []
    distributions = []
    for estimate in estimates:
        start, stop = estimate.segment
        segments.append({
            "start": start,
            "stop": stop,
            "n_windows": estimate.scan.n_windows,
            "curve": scan_rows(estimate.scan),
        })
        if emit_distributions:
            patterns = extract_pattern_sequence(x[start:stop], config.pattern)
            dists = windowed_distributions(patterns, config.pattern)
            distributions.append({
                "start": start,
                "stop": stop,
                "distributions": dists.tolist(),
            })

    report = {
        "tool": {"name": "opcpd", "version": __version__},
        "config": {**describe_detector(config), "seed": seed},
        "n_samples": int(x.size),
        "estimates": [
            {
                "split": list(estimate.split),
                "sample_index": estimate.sample_index,
                "precision_half_width": estimate.precision_half_width,
                "score": estimate.score,
                "segment": list(estimate.segment),
            }
            for estimate in estimates
        ],
        "segments": segments,
    }
    if emit_distributions:
        report["window_distributions"] = distributions
    return report


def mc_report_to_dict(mc) -> dict:
    """JSON form of an McReport; histogram keys become '(a,b)' strings."""
    return {
        "tool": {"name": "opcpd", "version": __version__},
        "scenario": mc.scenario,
        "mode": mc.mode,
        "reps": mc.reps,
        "histogram": {
            "(" + ",".join(str(v) for v in key) + ")": freq
            for key, freq in mc.histogram.items()
        },
    }


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False)
