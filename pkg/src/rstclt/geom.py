"""Geometric primitives: observation windows, ball volumes and half-spaces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

DIRECTION_TOL = 1e-12


class GeometryError(ValueError):
    """Invalid geometric input (bad dimension, degenerate window, ...)."""


@dataclass(frozen=True)
class Window:
    """Convex observation window containing the origin.

    Two variants are supported: an axis-aligned box given by ``lower`` and
    ``upper`` corners, and a ball of radius ``radius`` centred at the origin.
    Use :func:`box` and :func:`ball` to construct validated instances.
    """

    kind: str
    dim: int
    lower: Optional[tuple] = None
    upper: Optional[tuple] = None
    radius: Optional[float] = None

    def __post_init__(self):
        if self.dim < 1:
            raise GeometryError(f"invalid dimension {self.dim}")
        if self.kind == "box":
            if self.lower is None or self.upper is None:
                raise GeometryError("box window needs lower and upper corners")
            if len(self.lower) != self.dim or len(self.upper) != self.dim:
                raise GeometryError("box corners do not match the dimension")
            for lo, hi in zip(self.lower, self.upper):
                if not (lo <= 0.0 <= hi):
                    raise GeometryError("box window must contain the origin")
                if not hi > lo:
                    raise GeometryError("box window has zero volume")
        elif self.kind == "ball":
            if self.radius is None or not self.radius > 0:
                raise GeometryError("ball window needs a positive radius")
        else:
            raise GeometryError(f"unknown window kind {self.kind!r}")

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned bounding box as two arrays."""
        if self.kind == "box":
            return np.asarray(self.lower, float), np.asarray(self.upper, float)
        r = float(self.radius)
        return np.full(self.dim, -r), np.full(self.dim, r)

    @property
    def diameter(self) -> float:
        if self.kind == "box":
            lo, hi = self.bounds
            return float(np.sqrt(np.sum((hi - lo) ** 2)))
        return 2.0 * float(self.radius)

    def to_dict(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "dim": self.dim,
                    "lower": list(self.lower), "upper": list(self.upper)}
        return {"kind": "ball", "dim": self.dim, "radius": self.radius}

    @classmethod
    def from_dict(cls, data: dict) -> "Window":
        if data["kind"] == "box":
            return box(data["lower"], data["upper"])
        return ball(data["radius"], data["dim"])


def box(lower: Sequence[float], upper: Sequence[float]) -> Window:
    lower = tuple(float(v) for v in lower)
    upper = tuple(float(v) for v in upper)
    return Window("box", len(lower), lower=lower, upper=upper)


def ball(radius: float, dim: int) -> Window:
    return Window("ball", int(dim), radius=float(radius))


def unit_box(dim: int) -> Window:
    """Unit-volume cube centred at the origin."""
    return box([-0.5] * dim, [0.5] * dim)


def dilate(window: Window, margin: float) -> Window:
    """Minkowski dilation of ``window`` by a ball of radius ``margin``.

    For boxes the result is the bounding box of the dilation (each side
    pushed out by ``margin``), which is what the samplers need.
    """
    if margin < 0:
        raise GeometryError("dilation margin must be non-negative")
    if window.kind == "box":
        return box([v - margin for v in window.lower], [v + margin for v in window.upper])
    return ball(window.radius + margin, window.dim)


def gamma_function(x: float) -> float:
    """Gamma function for positive real arguments.

    Delegates to :func:`math.gamma`, whose relative error is at the level of
    a few ulps on the positive axis.
    """
    x = float(x)
    if not x > 0:
        raise GeometryError(f"gamma_function requires x > 0, got {x}")
    return math.gamma(x)


def unit_ball_volume(d: int) -> float:
    """Volume ``kappa_d = pi^(d/2) / Gamma(d/2 + 1)`` of the unit ball in R^d."""
    if int(d) != d or d < 1:
        raise GeometryError(f"invalid dimension {d}")
    return math.pi ** (d / 2.0) / gamma_function(d / 2.0 + 1.0)


def window_volume(w: Window) -> float:
    if w.kind == "box":
        return float(np.prod(np.subtract(w.upper, w.lower)))
    return unit_ball_volume(w.dim) * w.radius ** w.dim


def _as_point(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (dim,):
        raise GeometryError(f"point of shape {x.shape} does not match dimension {dim}")
    return x


def window_contains(w: Window, x) -> bool | np.ndarray:
    """Closed membership test; accepts one point or an ``(n, d)`` array."""
    x = _as_point(x, w.dim)
    if w.kind == "box":
        inside = np.all((x >= np.asarray(w.lower)) & (x <= np.asarray(w.upper)), axis=-1)
    else:
        inside = squared_norm(x) <= w.radius * w.radius
    return bool(inside) if inside.ndim == 0 else inside


def window_inside(outer: Window, inner: Window) -> bool:
    """True if ``inner`` is a subset of ``outer`` (for the supported variants)."""
    if outer.dim != inner.dim:
        return False
    lo, hi = inner.bounds
    if inner.kind == "box":
        corners = np.array(np.meshgrid(*zip(lo, hi))).reshape(inner.dim, -1).T
        return bool(np.all(window_contains(outer, corners)))
    if outer.kind == "ball":
        return inner.radius <= outer.radius
    return bool(np.all(np.asarray(outer.lower) <= lo) and np.all(hi <= np.asarray(outer.upper)))


def squared_norm(x: np.ndarray) -> np.ndarray:
    """Sum of squares accumulated axis by axis (fixed summation order)."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros(x.shape[:-1])
    for k in range(x.shape[-1]):
        acc = acc + x[..., k] * x[..., k]
    return acc


def direction(e: Sequence[float]) -> np.ndarray:
    """Validate a unit vector; raises if its norm is not 1 within 1e-12."""
    e = np.asarray(e, dtype=float)
    if e.ndim != 1 or e.size < 1:
        raise GeometryError("direction must be a 1-d vector")
    if abs(math.sqrt(float(squared_norm(e))) - 1.0) > DIRECTION_TOL:
        raise GeometryError("direction must have unit length")
    return e


def halfspace_contains(e, x, y) -> bool | np.ndarray:
    """``<e, y - x> <= 0``, i.e. ``y`` lies in the closed half-space behind ``x``."""
    e = np.asarray(e, dtype=float)
    x = _as_point(x, e.size)
    y = _as_point(y, e.size)
    diff = y - x
    acc = np.zeros(diff.shape[:-1])
    for k in range(e.size):
        acc = acc + e[k] * diff[..., k]
    out = acc <= 0.0
    return bool(out) if out.ndim == 0 else out
