"""Monte Carlo consistency checks.

Each check compares a simulated quantity with an independent route to the
same quantity (the Mecke identity, a tail law, a dominating curve) and
returns plain dictionaries so the results can go straight into a record.
"""

from __future__ import annotations

import functools
import itertools
import math
from typing import Optional, Sequence

import numpy as np

from .. import _kernels as K
from ..functionals import FunctionalSpec, diff_first_graph, diff_second_graph
from ..geom import Window, ball, unit_ball_volume, window_contains, window_volume
from ..harness import replicate_seeds, run_array, run_replicates
from ..pointprocess import default_margin, make_rng, sample_poisson, stream_seed, uniform_points
from ..spanning import NONE, build_rst
from .asymptotics import rst_functional_task
from .closed_form import TailBoundParams, diff2_bound, ell_e_cdf, rst_tail_bound
from .stats import SummaryStats, ks_distance, summarize

ALPHA_FLOOR = 1e-6


# ---------------------------------------------------------------- alpha probe

def volume_ratio(w: Window, x: np.ndarray, u: float, unit_points: np.ndarray) -> tuple[float, float]:
    """MC estimate (and its standard error) of the fraction of ``B(x, u)``
    lying in both ``B(0, |x|)`` and ``w``.

    ``unit_points`` are uniform points of the unit ball, shared across calls
    so that ratios at different (x, u) are comparable.
    """
    pts = x + u * unit_points
    r2 = float(x @ x)
    inside = (K.norms2(np.ascontiguousarray(pts)) <= r2) & window_contains(w, pts)
    m = unit_points.shape[0]
    p = float(np.count_nonzero(inside)) / m
    return p, math.sqrt(p * (1.0 - p) / m)


def _grid(w: Window, grid_points: int) -> np.ndarray:
    lo, hi = w.bounds
    axes = [np.linspace(lo[k], hi[k], grid_points + 1) for k in range(w.dim)]
    pts = np.array(list(itertools.product(*axes)))
    keep = window_contains(w, pts) & (np.abs(pts).sum(axis=1) > 0)
    return pts[keep]


def alpha_probe(w: Window, grid_points: int = 8, mc_per_cell: int = 4000,
                seed: int = 0) -> TailBoundParams:
    """Empirical lower-bound probe of the volume-ratio constant ``alpha_W``.

    Scans ``x`` over a grid of ``w`` (boundary included) and
    ``u = |x| j / grid_points`` for ``j = 1..grid_points``; returns the
    smallest ratio minus three MC standard errors, floored at 1e-6.  Not a
    certified constant.
    """
    if grid_points < 1:
        raise ValueError("grid_points must be >= 1")
    if window_volume(w) <= 0:
        raise ValueError("degenerate window")
    unit = uniform_points(make_rng(seed), ball(1.0, w.dim), mc_per_cell)
    best, arg, best_p = math.inf, None, math.nan
    cells = 0
    for x in _grid(w, grid_points):
        nx = math.sqrt(float(x @ x))
        for j in range(1, grid_points + 1):
            u = nx * j / grid_points
            p, se = volume_ratio(w, x, u, unit)
            cells += 1
            if p - 3 * se < best:
                best, arg, best_p = p - 3 * se, (tuple(float(v) for v in x), u), p
    alpha = min(1.0, max(best, ALPHA_FLOOR))
    return TailBoundParams(alpha, w, best_p, arg, cells,
                           {"certified": False, "grid_points": grid_points,
                            "mc_per_cell": mc_per_cell, "seed": seed})


# --------------------------------------------------------------- Mecke check

def mecke_rhs_task(seed: int, window: Window, t: float, a: float,
                   indicator_u: Optional[float] = None) -> float:
    """``t vol(W) l(X, eta_t + delta_X)^a`` with X uniform in W, independent of eta_t."""
    pts = np.ascontiguousarray(sample_poisson(window, t, stream_seed(seed, 0)).points)
    x = uniform_points(make_rng(stream_seed(seed, 1)), window, 1)[0]
    xn2 = float(K.norms2(x.reshape(1, -1))[0])
    _, d2 = K.radial_query(pts, K.norms2(pts), x, xn2)
    length = math.sqrt(d2)
    f = float(length >= indicator_u) if indicator_u is not None else length ** a
    return t * window_volume(window) * f


def mecke_check(w: Window, t: float, a: float, replicates: int, seed: int,
                indicator_u: Optional[float] = None, rhs_replicates: Optional[int] = None,
                workers: int = 1) -> tuple[SummaryStats, SummaryStats]:
    """Both sides of the Mecke identity ``E sum_x f(x, eta) = t int E f(x, eta + delta_x) dx``.

    ``f`` is the radial edge length to the power ``a``, or the indicator
    ``l >= indicator_u``.  The two sides use independent random streams.
    """
    if replicates < 30:
        raise ValueError("need at least 30 replicates")
    lhs_task = functools.partial(rst_functional_task, window=w, t=t, a=a, indicator_u=indicator_u)
    rhs_task = functools.partial(mecke_rhs_task, window=w, t=t, a=a, indicator_u=indicator_u)
    lhs = run_array(lhs_task, replicate_seeds(seed, replicates, 0), workers)
    rhs = run_array(rhs_task, replicate_seeds(seed, rhs_replicates or replicates, 1), workers)
    return summarize(lhs), summarize(rhs)


def combined_z(x: SummaryStats, y: SummaryStats) -> float:
    """``|mean_x - mean_y|`` in units of the combined standard error."""
    se = math.hypot(x.std_error_mean, y.std_error_mean)
    diff = abs(x.mean - y.mean)
    if se == 0:
        return 0.0 if diff == 0 else math.inf
    return diff / se


# ---------------------------------------------------------------- tail checks

def rst_tail_task(seed: int, window: Window, t: float, x: np.ndarray) -> float:
    pts = np.ascontiguousarray(sample_poisson(window, t, seed).points)
    xn2 = float(K.norms2(x.reshape(1, -1))[0])
    _, d2 = K.radial_query(pts, K.norms2(pts), x, xn2)
    return math.sqrt(d2)


def rst_tail_check(w: Window, t: float, x, u_values: Sequence[float], replicates: int,
                   seed: int, params: TailBoundParams, workers: int = 1) -> list[dict]:
    """Empirical ``P(l(x, eta_t + delta_x) >= u)`` against ``exp(-t alpha kappa u^d)``."""
    x = np.asarray(x, dtype=float)
    task = functools.partial(rst_tail_task, window=w, t=t, x=x)
    lengths = run_array(task, replicate_seeds(seed, replicates), workers)
    rows = []
    for u in u_values:
        f = float(np.mean(lengths >= u))
        se = math.sqrt(f * (1 - f) / replicates)
        bound = rst_tail_bound(u, t, params, w.dim)
        rows.append({"u": u, "frequency": f, "std_error": se, "bound": bound,
                     "below_bound": f - 3 * se <= bound})
    return rows


def ell_e_center_task(seed: int, d: int, e: np.ndarray, margin: float) -> float:
    """Directed edge length of the origin added to a unit-intensity sample of B(0, margin)."""
    rng = make_rng(seed)
    region = ball(margin, d)
    pts = np.ascontiguousarray(uniform_points(rng, region, int(rng.poisson(window_volume(region)))))
    j, d2 = K.directed_query(pts, K.norms2(pts), np.zeros(d), e)
    return 0.0 if j == NONE else math.sqrt(d2)


def ell_e_law_check(d: int, replicates: int, seed: int, e=None,
                    margin: Optional[float] = None, workers: int = 1) -> dict:
    """Kolmogorov distance between simulated directed edge lengths and ``1 - exp(-kappa u^d / 2)``."""
    if e is None:
        e = np.eye(d)[0]
    margin = default_margin(d) if margin is None else margin
    task = functools.partial(ell_e_center_task, d=d, e=np.asarray(e, float), margin=margin)
    lengths = run_array(task, replicate_seeds(seed, replicates), workers)
    ks = ks_distance(lengths, lambda u: ell_e_cdf(u, d))
    return {"d": d, "replicates": replicates, "margin": margin, "ks": ks,
            "mean": float(lengths.mean()), "samples": lengths}


# ----------------------------------------------------- difference operators

def diff_moment_task(seed: int, window: Window, t: float, a: float,
                     z_probes: np.ndarray, pair_probes: np.ndarray) -> np.ndarray:
    """``t^(a/d) D_z L`` at each probe followed by ``t^(a/d) D^2 L`` at each pair."""
    spec = FunctionalSpec(a)
    tree = build_rst(sample_poisson(window, t, seed))
    scale = t ** (a / window.dim)
    first = [scale * diff_first_graph(spec, tree, z) for z in z_probes]
    second = [scale * diff_second_graph(spec, tree, z1, z2) for z1, z2 in pair_probes]
    return np.array(first + second)


def _moment_row(values: np.ndarray, power: float = 5.0) -> tuple[float, float]:
    m = np.abs(values) ** power
    return float(m.mean()), float(m.std(ddof=1) / math.sqrt(m.size))


def diff_moment_check(w: Window, t_list: Sequence[float], a: float, z_probes, pair_probes,
                      replicates: int, seed: int, workers: int = 1) -> dict:
    """Fifth absolute moments of the scaled first and second difference operators.

    The functional is ``t^(a/d) L_t^(a)``.  Growth between consecutive
    ``t`` values by more than a factor 2 is flagged.
    """
    z_probes = np.atleast_2d(np.asarray(z_probes, float))
    pair_probes = np.asarray(pair_probes, float).reshape(-1, 2, w.dim)
    for z in np.concatenate([z_probes, pair_probes.reshape(-1, w.dim)]):
        if not window_contains(w, z):
            raise ValueError("probe outside the window")
    rows = []
    for i, t in enumerate(t_list):
        task = functools.partial(diff_moment_task, window=w, t=t, a=a,
                                 z_probes=z_probes, pair_probes=pair_probes)
        vals = np.array(run_replicates(task, replicate_seeds(seed, replicates, i), workers))
        for k in range(vals.shape[1]):
            order = 1 if k < len(z_probes) else 2
            probe = k if order == 1 else k - len(z_probes)
            m, se = _moment_row(vals[:, k])
            rows.append({"t": t, "order": order, "probe": probe, "moment5": m, "std_error": se,
                         "nonzero_fraction": float(np.mean(vals[:, k] != 0))})
    growth = []
    for order, probe in sorted({(r["order"], r["probe"]) for r in rows}):
        seq = [r for r in rows if r["order"] == order and r["probe"] == probe]
        for prev, nxt in zip(seq, seq[1:]):
            ratio = nxt["moment5"] / prev["moment5"] if prev["moment5"] > 0 else (
                1.0 if nxt["moment5"] == 0 else math.inf)
            growth.append({"order": order, "probe": probe, "t_from": prev["t"], "t_to": nxt["t"],
                           "ratio": ratio, "flag_growth": ratio > 2.0})
    return {"a": a, "rows": rows, "growth": growth,
            "any_growth": any(g["flag_growth"] for g in growth)}


def diff2_decay_task(seed: int, window: Window, t: float, a: float, z1: np.ndarray,
                     separations: np.ndarray) -> np.ndarray:
    """Indicator of ``D^2 != 0`` at every separation, one random direction per replicate."""
    rng = make_rng(stream_seed(seed, 1))
    g = rng.standard_normal(window.dim)
    v = g / math.sqrt(float(g @ g))
    spec = FunctionalSpec(a)
    tree = build_rst(sample_poisson(window, t, seed))
    out = np.empty(separations.size)
    for k, s in enumerate(separations):
        z2 = z1 + s * v
        if not window_contains(window, z2):
            z2 = z1 - s * v
        if not window_contains(window, z2):
            raise ValueError(f"separation {s} leaves the window in both directions")
        out[k] = diff_second_graph(spec, tree, z1, z2) != 0.0
    return out


def diff2_decay_check(w: Window, t: float, a: float, separations: Sequence[float],
                      replicates: int, seed: int, alpha: float, z1=None,
                      workers: int = 1) -> dict:
    """Frequency of ``D^2_{z1,z2} L != 0`` against the separation-decay curve.

    ``alpha`` should come from :func:`alpha_probe`.  A separation passes if
    ``frequency - 3 se`` does not exceed the curve.  Also reports the
    least-squares slope of log-frequency against ``separation^d``.
    """
    d = w.dim
    seps = np.asarray(separations, dtype=float)
    if np.any(seps < 0) or np.any(seps > w.diameter):
        raise ValueError("separations must lie within the window diameter")
    if z1 is None:
        lo, hi = w.bounds
        z1 = lo + 0.7 * (hi - lo)
    z1 = np.asarray(z1, dtype=float)
    task = functools.partial(diff2_decay_task, window=w, t=t, a=a, z1=z1, separations=seps)
    hits = np.array(run_replicates(task, replicate_seeds(seed, replicates), workers))
    rows = []
    for k, s in enumerate(seps):
        f = float(hits[:, k].mean())
        se = math.sqrt(f * (1 - f) / replicates)
        bound = diff2_bound(float(s), t, alpha, d)
        rows.append({"separation": float(s), "frequency": f, "std_error": se, "bound": bound,
                     "below_bound": f - 3 * se <= bound})
    pos = [(r["separation"] ** d, math.log(r["frequency"])) for r in rows if r["frequency"] > 0]
    slope = float(np.polyfit(*zip(*pos), 1)[0]) if len(pos) >= 2 else math.nan
    return {"t": t, "a": a, "alpha": alpha, "z1": z1.tolist(), "rows": rows,
            "log_slope_vs_sep_d": slope, "all_below_bound": all(r["below_bound"] for r in rows)}


def reference_slope(t: float, alpha: float, d: int) -> float:
    """Slope of the log of the decay curve against ``separation^d``."""
    return -t * alpha * unit_ball_volume(d) / 2 ** d
