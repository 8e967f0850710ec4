"""Seeded sampling of homogeneous Poisson point processes.

Random numbers come from numpy's counter-based Philox generator keyed
directly by a 64-bit seed::

    rng = numpy.random.Generator(numpy.random.Philox(key=seed))

Replicate seeds are derived from a master seed with the SplitMix64 stream
construction::

    derive_replicate_seed(s, i) = mix64(s + (i + 1) * 0x9E3779B97F4A7C15 mod 2**64)

where ``mix64`` is the SplitMix64 finaliser.  ``mix64`` is a bijection of
64-bit words and the golden-ratio increment is odd, so for a fixed master
seed the map ``i -> seed`` is injective for every ``i < 2**64``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geom import Window, ball, box, dilate, squared_norm, unit_ball_volume, window_volume

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MAX_MEAN_COUNT = 2 ** 31
TAIL_TARGET = 1e-6


class IntensityError(ValueError):
    """Raised for a negative intensity."""


class ResourceError(RuntimeError):
    """Raised when a requested sample would be unreasonably large."""


def mix64(z: int) -> int:
    """SplitMix64 output finaliser (a bijection on 64-bit integers)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_replicate_seed(master_seed: int, replicate_index: int) -> int:
    if replicate_index < 0:
        raise ValueError("replicate_index must be non-negative")
    return mix64((master_seed & MASK64) + (replicate_index + 1) * GOLDEN_GAMMA)


def stream_seed(master_seed: int, *path: int) -> int:
    """Seed of a named sub-stream: ``derive_replicate_seed`` applied along ``path``."""
    s = master_seed & MASK64
    for i in path:
        s = derive_replicate_seed(s, i)
    return s


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & MASK64))


@dataclass
class PointSample:
    """One realisation of a Poisson process.

    ``window`` is the core window; when ``dilation_margin > 0`` the points
    were drawn on the dilated window, available as ``sampling_window``.
    """

    points: np.ndarray
    window: Window
    intensity: float
    seed: Optional[int] = None
    dilation_margin: float = 0.0
    duplicate_rejections: int = 0

    @property
    def dim(self) -> int:
        return self.window.dim

    @property
    def sampling_window(self) -> Window:
        if self.dilation_margin > 0:
            return dilate(self.window, self.dilation_margin)
        return self.window

    def __len__(self) -> int:
        return self.points.shape[0]

    def with_points(self, points: np.ndarray) -> "PointSample":
        """Copy carrying a different point array (same window and provenance)."""
        return PointSample(np.ascontiguousarray(points, dtype=float), self.window,
                           self.intensity, self.seed, self.dilation_margin)

    def scaled(self, s: float) -> "PointSample":
        """All points (and the window) multiplied by ``s > 0``."""
        w = self.window
        if w.kind == "box":
            w = box([s * v for v in w.lower], [s * v for v in w.upper])
        else:
            w = ball(s * w.radius, w.dim)
        return PointSample(self.points * s, w, self.intensity / s ** w.dim,
                           self.seed, self.dilation_margin * s)


def from_points(points, window: Window, intensity: float = 1.0) -> PointSample:
    """Wrap an explicit point array (e.g. a hand-built configuration)."""
    pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, window.dim))
    return PointSample(pts, window, float(intensity))


def _uniform(rng: np.random.Generator, w: Window, n: int) -> np.ndarray:
    if w.kind == "box":
        lo, hi = w.bounds
        return lo + (hi - lo) * rng.random((n, w.dim))
    out = np.empty((n, w.dim))
    filled = 0
    r2 = w.radius * w.radius
    while filled < n:
        m = n - filled
        g = rng.standard_normal((m, w.dim))
        g /= np.sqrt(squared_norm(g))[:, None]
        rad = w.radius * rng.random(m) ** (1.0 / w.dim)
        cand = g * rad[:, None]
        # rounding can push a point a hair outside the closed ball
        cand = cand[squared_norm(cand) <= r2]
        out[filled:filled + cand.shape[0]] = cand
        filled += cand.shape[0]
    return out


def uniform_points(rng: np.random.Generator, w: Window, n: int) -> np.ndarray:
    """``n`` i.i.d. uniform points in ``w``."""
    return _uniform(rng, w, n)


def _drop_duplicates(rng, w: Window, pts: np.ndarray) -> tuple[np.ndarray, int]:
    rejected = 0
    while pts.shape[0] > 1:
        _, first = np.unique(pts, axis=0, return_index=True)
        if first.size == pts.shape[0]:
            break
        dup = np.setdiff1d(np.arange(pts.shape[0]), first)
        rejected += dup.size
        pts[dup] = _uniform(rng, w, dup.size)
    return pts, rejected


def _sample(w: Window, t: float, seed: int, margin: float) -> PointSample:
    if not t >= 0:
        raise IntensityError(f"invalid intensity {t}")
    sw = dilate(w, margin) if margin > 0 else w
    mean = t * window_volume(sw)
    if mean > MAX_MEAN_COUNT:
        raise ResourceError(f"expected point count {mean:.3g} exceeds 2^31")
    rng = make_rng(seed)
    n = int(rng.poisson(mean)) if mean > 0 else 0
    pts = _uniform(rng, sw, n)
    pts, rejected = _drop_duplicates(rng, sw, pts)
    return PointSample(np.ascontiguousarray(pts), w, float(t), int(seed) & MASK64,
                       float(margin), rejected)


def sample_poisson(w: Window, t: float, seed: int) -> PointSample:
    """Poisson process of intensity ``t`` on ``w``: Poisson count, then uniform points."""
    return _sample(w, t, seed, 0.0)


def default_margin(d: int, tail: float = TAIL_TARGET) -> float:
    """Smallest ``m`` with ``exp(-kappa_d m^d / 2) <= tail``.

    This is the probability that a directed edge is longer than ``m``, so a
    collar of this width makes truncation effects on the core negligible.
    """
    return (2.0 * math.log(1.0 / tail) / unit_ball_volume(d)) ** (1.0 / d)


def sample_poisson_dilated(w: Window, t: float, margin: Optional[float], seed: int) -> PointSample:
    """Sample on ``w`` dilated by ``margin`` (``None`` picks :func:`default_margin`)."""
    if margin is None:
        margin = default_margin(w.dim)
    if margin < 0:
        raise ValueError("margin must be non-negative")
    return _sample(w, t, seed, float(margin))


def points_to_csv(sample: PointSample | np.ndarray) -> str:
    """CSV text with header ``x0,...,x{d-1}`` and 17 significant digits."""
    pts = sample.points if isinstance(sample, PointSample) else np.asarray(sample)
    d = pts.shape[1]
    buf = io.StringIO()
    buf.write(",".join(f"x{k}" for k in range(d)) + "\n")
    for row in pts:
        buf.write(",".join("%.17g" % v for v in row) + "\n")
    return buf.getvalue()


def points_from_csv(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    d = len(lines[0].split(","))
    if len(lines) == 1:
        return np.empty((0, d))
    return np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
