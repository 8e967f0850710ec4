"""Closed-form limits and tail laws for radial and directed edge lengths."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..geom import GeometryError, Window, gamma_function, unit_ball_volume


def _check(a: float, d: int):
    if not a >= 0:
        raise ValueError(f"exponent must be >= 0, got {a}")
    if int(d) != d or d < 1:
        raise GeometryError(f"invalid dimension {d}")


def ell_e_moment_closed_form(a: float, d: int) -> float:
    """``E[l_e^a] = (2 / kappa_d)^(a/d) Gamma(1 + a/d)`` for a directed edge length.

    The directed edge length of a point of a unit-intensity stationary
    Poisson process has tail ``exp(-kappa_d u^d / 2)``.
    """
    _check(a, d)
    return (2.0 / unit_ball_volume(d)) ** (a / d) * gamma_function(1.0 + a / d)


def expectation_limit(a: float, d: int, vol: float) -> float:
    """Limit of ``t^(a/d - 1) E[L_t^(a)]`` for a window of volume ``vol``."""
    _check(a, d)
    if not vol > 0:
        raise ValueError("window volume must be positive")
    return ell_e_moment_closed_form(a, d) * vol


def ell_e_tail(u: float, d: int) -> float:
    """``P(l_e >= u) = exp(-kappa_d u^d / 2)``."""
    if not u >= 0:
        raise ValueError("u must be non-negative")
    return math.exp(-unit_ball_volume(d) * u ** d / 2.0)


def ell_e_cdf(u, d: int):
    u = np.maximum(np.asarray(u, dtype=float), 0.0)
    return -np.expm1(-unit_ball_volume(d) * u ** d / 2.0)


@dataclass
class TailBoundParams:
    """Probed volume-ratio constant ``alpha_W`` for a window.

    This is an empirical lower-bound probe, not a certified constant.
    """

    alpha_W: float
    window: Optional[Window] = None
    min_ratio: float = float("nan")
    argmin: Optional[tuple] = None
    cells: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.alpha_W <= 1:
            raise ValueError("alpha_W must lie in (0, 1]")


def rst_tail_bound(u: float, t: float, params: TailBoundParams, d: int) -> float:
    """Dominating curve ``exp(-t alpha_W kappa_d u^d)`` for radial edge lengths."""
    if not u >= 0:
        raise ValueError("u must be non-negative")
    if not t >= 1:
        raise ValueError("t must be >= 1")
    return math.exp(-t * params.alpha_W * unit_ball_volume(d) * u ** d)


def diff2_bound(separation: float, t: float, alpha: float, d: int) -> float:
    """Bound ``(2 + 2/alpha) exp(-t alpha kappa_d s^d / 2^d)`` on P(D^2 != 0)."""
    return (2.0 + 2.0 / alpha) * math.exp(-t * alpha * unit_ball_volume(d) * separation ** d / 2 ** d)


def covariance_envelope(r: float, d: int, c_a: float = 1.0) -> float:
    """Decay envelope ``c_a exp(-kappa_d r^d / 2^(d+1))`` of the pair covariance."""
    return c_a * math.exp(-unit_ball_volume(d) * r ** d / 2 ** (d + 1))
