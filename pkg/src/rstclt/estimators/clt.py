"""Kolmogorov distance to the normal law along a sequence of intensities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..geom import Window
from .asymptotics import rst_functional_samples
from .stats import kolmogorov_distance, kolmogorov_quantile


@dataclass
class CltResult:
    a: float
    rows: list = field(default_factory=list)
    slope: float = math.nan
    metadata: dict = field(default_factory=dict)

    header = ("t", "ks", "ks_stderr", "mean", "sd", "replicates")

    def table(self) -> list[tuple]:
        return [tuple(r[h] for h in self.header) for r in self.rows]

    def to_dict(self) -> dict:
        return {"a": self.a, "rows": self.rows, "slope": self.slope, "metadata": self.metadata}


def standardized(values: np.ndarray) -> np.ndarray:
    """Centre and scale by the empirical mean and standard deviation."""
    sd = values.std(ddof=1)
    if not sd > 0:
        raise ValueError("replicate values have zero spread")
    return (values - values.mean()) / sd


def subsample_error(values: np.ndarray, subsamples: int) -> float:
    """Spread of the KS distance over contiguous sub-batches, scaled to the full sample.

    Each batch is standardised on its own; the batch standard deviation is
    divided by ``sqrt(subsamples)``.
    """
    batches = np.array_split(values, subsamples)
    ks = np.array([kolmogorov_distance(standardized(b)) for b in batches])
    return float(ks.std(ddof=1) / math.sqrt(subsamples))


def loglog_slope(t: Sequence[float], ks: Sequence[float]) -> float:
    return float(np.polyfit(np.log(t), np.log(ks), 1)[0])


def clt_experiment(w: Window, a: float, t_list: Sequence[float], replicates: int, seed: int,
                   subsamples: int = 10, workers: int = 1) -> CltResult:
    """KS distance of the standardised ``L_t^(a)`` from N(0, 1) for each ``t``.

    Standardisation uses the empirical mean and standard deviation of the
    replicates.  Also fits the slope of log KS against log t.
    """
    t_list = list(t_list)
    if any(b <= a_ for a_, b in zip(t_list, t_list[1:])):
        raise ValueError("t_list must be increasing")
    if replicates < 1000:
        raise ValueError("need at least 1000 replicates per intensity")
    rows = []
    for i, t in enumerate(t_list):
        vals = rst_functional_samples(w, t, a, replicates, seed, workers, stream=(i,))
        rows.append({"t": t, "ks": kolmogorov_distance(standardized(vals)),
                     "ks_stderr": subsample_error(vals, subsamples),
                     "mean": float(vals.mean()), "sd": float(vals.std(ddof=1)),
                     "replicates": replicates})
    slope = loglog_slope(t_list, [r["ks"] for r in rows]) if len(rows) > 1 else math.nan
    meta = {"standardization": "empirical mean and sd", "subsamples": subsamples,
            "ks_noise_floor_99": kolmogorov_quantile(replicates, 0.99)}
    return CltResult(a, rows, slope, meta)


def count_inversions(rows: Sequence[dict]) -> tuple[int, bool]:
    """Number of increases of KS along t, and whether each lies within the combined error."""
    inv, within = 0, True
    for prev, nxt in zip(rows, rows[1:]):
        if nxt["ks"] > prev["ks"]:
            inv += 1
            within &= nxt["ks"] - prev["ks"] <= prev["ks_stderr"] + nxt["ks_stderr"]
    return inv, within
