"""Summary statistics, the normal CDF and Kolmogorov distances."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.special import kolmogi

SQRT_PI = math.sqrt(math.pi)
SQRT2 = math.sqrt(2.0)

# erf/erfc switch point; below it the power series, above it the continued fraction
_SPLIT = 2.5
_SERIES_TERMS = 60
_CF_DEPTH = 90


@dataclass
class SummaryStats:
    n: int
    mean: float
    variance: float
    std_error_mean: float
    std_error_variance: float

    def to_dict(self) -> dict:
        return asdict(self)


def jackknife_variance_error(values: np.ndarray, batches: int = 10) -> float:
    """Standard error of the sample variance from a leave-one-batch-out jackknife.

    The values are cut into ``batches`` contiguous blocks in their given
    order (replicate order), so the result is deterministic.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    batches = min(batches, n // 2)
    if batches < 2:
        return float("nan")
    blocks = np.array_split(values, batches)
    loo = np.empty(batches)
    for b in range(batches):
        rest = np.concatenate([blk for i, blk in enumerate(blocks) if i != b])
        loo[b] = rest.var(ddof=1)
    return float(math.sqrt((batches - 1) / batches * np.sum((loo - loo.mean()) ** 2)))


def summarize(values, batches: int = 10) -> SummaryStats:
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        raise ValueError("need at least two values for a variance")
    mean = math.fsum(values) / n
    var = float(values.var(ddof=1))
    return SummaryStats(n, mean, var, math.sqrt(var / n),
                        jackknife_variance_error(values, batches))


def _erf_series(x: np.ndarray) -> np.ndarray:
    # erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (2n+1)!!  (all terms positive)
    x2 = x * x
    term = x.copy()
    total = x.copy()
    for n in range(1, _SERIES_TERMS):
        term = term * (2.0 * x2) / (2 * n + 1)
        total = total + term
    return 2.0 / SQRT_PI * np.exp(-x2) * total


def _erfc_cf(x: np.ndarray) -> np.ndarray:
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x > 0
    frac = x.copy()
    for k in range(_CF_DEPTH, 0, -1):
        frac = x + (0.5 * k) / frac
    return np.exp(-x * x) / SQRT_PI / frac


def erf(x):
    """Error function, accurate to about 1e-15 absolute.

    Power series for ``|x| <= 2.5`` and a continued fraction for erfc
    beyond, so results do not depend on the platform's libm erf.
    """
    arr = np.asarray(x, dtype=float)
    a = np.abs(arr)
    out = np.empty_like(a)
    small = a <= _SPLIT
    out[small] = _erf_series(a[small])
    out[~small] = 1.0 - _erfc_cf(a[~small])
    out = np.copysign(out, arr)
    return float(out) if out.ndim == 0 else out


def erfc(x):
    arr = np.asarray(x, dtype=float)
    out = np.empty_like(arr)
    big = arr > _SPLIT
    out[big] = _erfc_cf(arr[big])
    out[~big] = 1.0 - erf(arr[~big])
    return float(out) if out.ndim == 0 else out


def normal_cdf(x):
    """Standard normal distribution function ``0.5 * erfc(-x / sqrt(2))``."""
    u = np.asarray(x, dtype=float) / SQRT2
    out = np.where(u >= 0, 1.0 - 0.5 * erfc(np.abs(u)), 0.5 * erfc(np.abs(u)))
    return float(out) if out.ndim == 0 else out


def ks_distance(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """``sup_s |F_n(s) - F(s)|`` for the empirical CDF of ``samples``.

    Both one-sided step limits of the empirical CDF are compared at every
    order statistic.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    upper = np.abs(i / n - f)
    lower = np.abs((i - 1) / n - f)
    return float(max(upper.max(), lower.max()))


def kolmogorov_distance(samples) -> float:
    """Kolmogorov distance between the empirical law of ``samples`` and N(0, 1)."""
    return ks_distance(samples, normal_cdf)


def kolmogorov_quantile(n: int, level: float = 0.99) -> float:
    """Asymptotic quantile of the one-sample Kolmogorov statistic ``D_n``."""
    return float(kolmogi(1.0 - level) / math.sqrt(n))
