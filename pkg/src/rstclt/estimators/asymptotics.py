"""Monte Carlo estimators for the mean and variance asymptotics.

The limiting variance constant ``v_a`` has no closed form.  It is estimated
in two independent ways which must agree:

* ``BALL_VARIANCE``: the variance of the directed-forest functional summed
  over a large ball, divided by the ball volume;
* ``COVARIANCE_INTEGRAL``: Monte Carlo integration of the pair covariance of
  directed edge lengths over ``z``, plus the closed-form ``E[l_e^(2a)]``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .. import _kernels as K
from ..functionals import eval_dsf_functional, eval_rst_functional
from ..geom import Window, ball, direction, unit_ball_volume, window_volume
from ..harness import replicate_seeds, run_array
from ..pointprocess import (default_margin, make_rng, sample_poisson, sample_poisson_dilated,
                            uniform_points)
from ..spanning import NONE, build_dsf, build_rst
from .closed_form import covariance_envelope, ell_e_moment_closed_form
from .stats import SummaryStats, jackknife_variance_error, summarize

BALL_VARIANCE = "BALL_VARIANCE"
COVARIANCE_INTEGRAL = "COVARIANCE_INTEGRAL"


@dataclass
class VaEstimate:
    method: str
    a: float
    d: int
    value: float
    std_error: float
    radius: float
    replicates: int
    metadata: dict = field(default_factory=dict)

    @property
    def ci_excludes_zero(self) -> bool:
        return self.value - 3.0 * self.std_error > 0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ci_excludes_zero"] = self.ci_excludes_zero
        return out


def _default_direction(d: int) -> np.ndarray:
    e = np.zeros(d)
    e[0] = 1.0
    return e


# ----------------------------------------------------------- radial functional

def rst_functional_task(seed: int, window: Window, t: float, a: float,
                        indicator_u: Optional[float] = None) -> float:
    """``L_t^(a)`` (or the count of edges of length >= u) for one replicate."""
    tree = build_rst(sample_poisson(window, t, seed))
    if indicator_u is not None:
        return float(np.count_nonzero(tree.edge_length >= indicator_u))
    return eval_rst_functional(tree, a).value


def rst_functional_samples(w: Window, t: float, a: float, replicates: int, seed: int,
                           workers: int = 1, stream: tuple = ()) -> np.ndarray:
    task = functools.partial(rst_functional_task, window=w, t=t, a=a)
    return run_array(task, replicate_seeds(seed, replicates, *stream), workers)


def estimate_rst_mean(w: Window, t: float, a: float, replicates: int, seed: int,
                      workers: int = 1) -> SummaryStats:
    """Statistics of ``t^(a/d - 1) L_t^(a)`` across replicates."""
    if replicates < 2:
        raise ValueError("need at least 2 replicates")
    values = rst_functional_samples(w, t, a, replicates, seed, workers)
    return summarize(values * t ** (a / w.dim - 1.0))


def estimate_rst_variance(w: Window, t: float, a: float, replicates: int, seed: int,
                          workers: int = 1, batches: int = 10) -> SummaryStats:
    """Statistics of ``t^(a/d - 1/2) L_t^(a)``.

    The ``variance`` field is therefore the scaled variance
    ``t^(2a/d - 1) V[L_t^(a)]`` and ``std_error_variance`` its batch
    jackknife error.
    """
    if replicates < 30:
        raise ValueError("need at least 30 replicates for a variance estimate")
    values = rst_functional_samples(w, t, a, replicates, seed, workers)
    return summarize(values * t ** (a / w.dim - 0.5), batches)


# ------------------------------------------------------------ ball estimator

def dsf_ball_task(seed: int, r: float, d: int, a: float, e: np.ndarray, margin: float) -> float:
    core = ball(r, d)
    sample = sample_poisson_dilated(core, 1.0, margin, seed)
    return eval_dsf_functional(build_dsf(sample, e), core, a).value


def estimate_va_ball(r: float, a: float, d: int, e=None, replicates: int = 1000, seed: int = 0,
                     margin: Optional[float] = None, workers: int = 1,
                     batches: int = 10) -> VaEstimate:
    """``V[hat L_{B(0,r)}^(a)] / (kappa_d r^d)`` from unit-intensity replicates.

    Pairs of points near the ball boundary lose part of their (negative)
    covariance, so at finite ``r`` the estimate sits above ``v_a`` by a
    term of order ``1/r``.  For a=1, d=2 this is still about 0.01 at r=16.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    e = _default_direction(d) if e is None else direction(e)
    margin = default_margin(d) if margin is None else margin
    task = functools.partial(dsf_ball_task, r=r, d=d, a=a, e=e, margin=margin)
    values = run_array(task, replicate_seeds(seed, replicates), workers)
    vol = unit_ball_volume(d) * r ** d
    var = float(values.var(ddof=1))
    se = jackknife_variance_error(values, batches)
    return VaEstimate(BALL_VARIANCE, a, d, var / vol, se / vol, r, replicates,
                      {"margin": margin, "direction": list(e),
                       "mean_per_volume": float(values.mean() / vol),
                       "mean_closed_form": ell_e_moment_closed_form(a, d)})


# ------------------------------------------------------- covariance integral

def _directed_length(points: np.ndarray, x: np.ndarray, e: np.ndarray) -> float:
    j, d2 = K.directed_query(points, K.norms2(points), x, e)
    return 0.0 if j == NONE else math.sqrt(d2)


def pair_covariance_sample(rng: np.random.Generator, z: np.ndarray, a: float,
                           e: np.ndarray, margin: float, coupled: bool = True) -> float:
    """One unbiased draw of the covariance integrand at ``z``.

    The first term is ``l_e(0)^a l_e(z)^a`` with both 0 and z added to a
    unit-intensity process.  With ``coupled=True`` the product of means is
    estimated from two independent processes assembled out of the same
    process and an independent copy, swapped across the bisecting
    hyperplane of 0 and z; when the two neighbourhoods do not reach the
    hyperplane both terms coincide, which removes most of the noise at
    large ``|z|``.  With ``coupled=False`` the closed-form mean is used.
    """
    d = z.size
    centre = z / 2.0
    region = ball(math.sqrt(float(z @ z)) / 2.0 + margin, d)
    vol = window_volume(region)
    origin = np.zeros(d)

    def draw():
        n = int(rng.poisson(vol))
        return uniform_points(rng, region, n) + centre

    eta = draw()
    with_z = np.ascontiguousarray(np.vstack([eta, z]))
    with_0 = np.ascontiguousarray(np.vstack([eta, origin]))
    prod = (_directed_length(with_z, origin, e) ** a) * (_directed_length(with_0, z, e) ** a)
    if not coupled:
        return prod - ell_e_moment_closed_form(a, d) ** 2
    other = draw()
    side = lambda p: (p - centre) @ z <= 0.0  # noqa: E731
    s_eta, s_other = side(eta), side(other)
    xi1 = np.ascontiguousarray(np.vstack([eta[s_eta], other[~s_other]]))
    xi2 = np.ascontiguousarray(np.vstack([other[s_other], eta[~s_eta]]))
    indep = (_directed_length(xi1, origin, e) ** a) * (_directed_length(xi2, z, e) ** a)
    return prod - indep


def _uniform_in_ball(rng: np.random.Generator, radius: float, d: int) -> np.ndarray:
    return uniform_points(rng, ball(radius, d), 1)[0]


def va_integrand_task(seed: int, R: float, a: float, d: int, e: np.ndarray, margin: float,
                      inner: int, coupled: bool) -> float:
    rng = make_rng(seed)
    z = _uniform_in_ball(rng, R, d)
    return math.fsum(pair_covariance_sample(rng, z, a, e, margin, coupled)
                     for _ in range(inner)) / inner


def probe_integrand(radius: float, a: float, d: int, e=None, replicates: int = 400,
                    seed: int = 0, margin: Optional[float] = None,
                    coupled: bool = True) -> tuple[float, float]:
    """Mean and standard error of the covariance integrand at ``|z| = radius``.

    The direction of ``z`` is drawn uniformly for each replicate.
    """
    e = _default_direction(d) if e is None else direction(e)
    margin = default_margin(d) if margin is None else margin
    vals = np.empty(replicates)
    for i, s in enumerate(replicate_seeds(seed, replicates)):
        rng = make_rng(s)
        g = rng.standard_normal(d)
        z = radius * g / math.sqrt(float(g @ g))
        vals[i] = pair_covariance_sample(rng, z, a, e, margin, coupled)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(replicates))


def truncation_radius(a: float, d: int, c_a: float, scale: float, rel: float = 1e-3) -> float:
    """Radius beyond which the covariance envelope is negligible.

    Solves ``c_a exp(-kappa_d R^d / 2^(d+1)) kappa_d R^d = rel * scale``
    on the decreasing branch of the left-hand side.
    """
    kd = unit_ball_volume(d)
    f = lambda R: math.log(c_a * kd * R ** d) - kd * R ** d / 2 ** (d + 1) - math.log(rel * scale)  # noqa: E731
    # the left side peaks where kappa_d R^d = 2^(d+1)
    r_peak = (2 ** (d + 1) / kd) ** (1.0 / d)
    if f(r_peak) <= 0:
        return r_peak
    hi = 2 * r_peak
    while f(hi) > 0:
        hi *= 2
    return brentq(f, r_peak, hi, xtol=1e-10)


def default_truncation(a: float, d: int, e=None, seed: int = 0, probe_replicates: int = 400,
                       rel: float = 1e-3) -> tuple[float, dict]:
    """Pick ``R_trunc`` from probed integrand magnitudes; returns (R, metadata)."""
    if a == 0:
        return 1.0, {"c_a": 0.0, "reason": "integrand vanishes identically for a = 0"}
    radii = (0.25, 0.5, 1.0, 1.5)
    c_a = 0.0
    probes = {}
    for i, r in enumerate(radii):
        m, se = probe_integrand(r, a, d, e, probe_replicates, seed + i)
        probes[r] = (m, se)
        c_a = max(c_a, (abs(m) + 2 * se) / covariance_envelope(r, d))
    scale = ell_e_moment_closed_form(2 * a, d)
    R = truncation_radius(a, d, c_a, scale, rel)
    return R, {"c_a": c_a, "scale": scale, "rel": rel,
               "probes": {str(k): list(v) for k, v in probes.items()}}


def estimate_va_integral(R_trunc: Optional[float], a: float, d: int, e=None,
                         z_samples: int = 4000, replicates: int = 1, seed: int = 0,
                         margin: Optional[float] = None, coupled: bool = True,
                         workers: int = 1) -> VaEstimate:
    """Covariance-integral estimate of ``v_a``.

    ``z`` is drawn uniformly from ``B(0, R_trunc)`` (``z_samples`` times);
    each integrand value averages ``replicates`` process draws.  The
    integral is ``kappa_d R^d`` times the mean integrand; the closed-form
    ``E[l_e^(2a)]`` is added.  ``R_trunc=None`` uses :func:`default_truncation`.
    """
    e = _default_direction(d) if e is None else direction(e)
    margin = default_margin(d) if margin is None else margin
    meta = {"margin": margin, "direction": list(e), "coupled": coupled}
    if R_trunc is None:
        R_trunc, tmeta = default_truncation(a, d, e, seed)
        meta["truncation"] = tmeta
    if not R_trunc > 0:
        raise ValueError("R_trunc must be positive")
    second = ell_e_moment_closed_form(2 * a, d)
    vol = unit_ball_volume(d) * R_trunc ** d
    task = functools.partial(va_integrand_task, R=R_trunc, a=a, d=d, e=e, margin=margin,
                             inner=replicates, coupled=coupled)
    g = run_array(task, replicate_seeds(seed, z_samples, 1), workers)
    integral = vol * math.fsum(g) / g.size
    se = vol * float(g.std(ddof=1)) / math.sqrt(g.size) if g.size > 1 else float("nan")
    meta.update({"integral": integral, "second_moment_term": second, "z_samples": z_samples})
    return VaEstimate(COVARIANCE_INTEGRAL, a, d, integral + second, se, R_trunc,
                      replicates, meta)
