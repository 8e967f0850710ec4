"""Edge-length functionals and their difference operators.

Sums are evaluated with :func:`math.fsum`, i.e. correctly rounded and
independent of point order.  Difference operators are formed as one fsum
over all the signed terms, so structurally cancelling contributions cancel
exactly: ``diff_second`` is exactly zero whenever the two insertions do not
interact, and ``diff_second(z1, z2) == diff_second(z2, z1)`` bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geom import Window, direction, window_contains, window_inside
from .pointprocess import PointSample
from .spanning import DirectedForest, RadialTree, build_dsf, build_rst, insert_point


class ExponentError(ValueError):
    """Negative exponent requested."""


@dataclass(frozen=True)
class FunctionalSpec:
    """Sum of ``edge_length ** a`` over a radial tree or a directed forest.

    For ``kind="dsf"`` the sum runs over points of ``core`` only (the
    neighbours may lie anywhere in the sample).
    """

    a: float
    kind: str = "rst"
    e: Optional[tuple] = None
    core: Optional[Window] = None

    def __post_init__(self):
        if not self.a >= 0:
            raise ExponentError(f"exponent must be >= 0, got {self.a}")
        if self.kind not in ("rst", "dsf"):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.kind == "dsf":
            if self.e is None:
                raise ValueError("a DSF functional needs a direction")
            direction(self.e)


@dataclass
class FunctionalValue:
    value: float
    point_count: int
    spec: Optional[FunctionalSpec] = None


def _check_exponent(a: float):
    if not a >= 0:
        raise ExponentError(f"exponent must be >= 0, got {a}")


def _powers(lengths: np.ndarray, a: float) -> np.ndarray:
    # numpy gives 0.0 ** 0.0 == 1.0, so a = 0 counts vertices
    return np.power(lengths, float(a))


def eval_rst_functional(tree: RadialTree, a: float) -> FunctionalValue:
    _check_exponent(a)
    value = math.fsum(_powers(tree.edge_length, a))
    return FunctionalValue(value, len(tree), FunctionalSpec(a))


def _core_mask(points: np.ndarray, core: Window) -> np.ndarray:
    if points.shape[0] == 0:
        return np.zeros(0, bool)
    return np.atleast_1d(window_contains(core, points))


def eval_dsf_functional(forest: DirectedForest, core: Window, a: float) -> FunctionalValue:
    _check_exponent(a)
    if forest.window is not None and not window_inside(forest.window, core):
        raise ValueError("core window is not contained in the sample window")
    mask = _core_mask(forest.points, core)
    value = math.fsum(_powers(forest.edge_length[mask], a))
    return FunctionalValue(value, int(mask.sum()),
                           FunctionalSpec(a, "dsf", tuple(forest.direction), core))


def build_graph(spec: FunctionalSpec, sample: PointSample):
    if spec.kind == "rst":
        return build_rst(sample)
    return build_dsf(sample, np.asarray(spec.e, float))


def _terms(spec: FunctionalSpec, graph, mask: Optional[np.ndarray] = None) -> np.ndarray:
    """Signed-sum ingredients: ``length ** a`` of the counted points."""
    keep = np.ones(len(graph), bool) if mask is None else mask.copy()
    if spec.kind == "dsf" and spec.core is not None:
        keep &= _core_mask(graph.points, spec.core)
    return _powers(graph.edge_length[keep], spec.a)


def functional_value(spec: FunctionalSpec, graph) -> float:
    return math.fsum(_terms(spec, graph))


def _check_z(sample: PointSample, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != (sample.dim,):
        raise ValueError("z does not match the sample dimension")
    if not window_contains(sample.sampling_window, z):
        raise ValueError("z lies outside the sample window")
    return z


def diff_first_graph(spec: FunctionalSpec, graph, z) -> float:
    """``F(graph + z) - F(graph)`` using the incremental update."""
    new = insert_point(graph, z)
    changed = np.zeros(len(new), bool)
    changed[:-1] = new.parent[:-1] != graph.parent
    changed[-1] = True
    plus = _terms(spec, new, changed)
    minus = _terms(spec, graph, changed[:-1])
    return math.fsum(np.concatenate([plus, -minus]))


def diff_first(spec: FunctionalSpec, sample: PointSample, z, method: str = "incremental") -> float:
    """First-order difference operator ``D_z F``.

    ``method="full"`` rebuilds the graph on the augmented sample and is used
    as the oracle for the incremental path.
    """
    z = _check_z(sample, z)
    if method == "full":
        base = build_graph(spec, sample)
        new = build_graph(spec, sample.with_points(np.vstack([sample.points, z])))
        return math.fsum(np.concatenate([_terms(spec, new), -_terms(spec, base)]))
    if method != "incremental":
        raise ValueError(f"unknown method {method!r}")
    return diff_first_graph(spec, build_graph(spec, sample), z)


def diff_second_graph(spec: FunctionalSpec, graph, z1, z2) -> float:
    g1 = insert_point(graph, z1)
    g2 = insert_point(graph, z2)
    g12 = insert_point(g1, z2)
    return math.fsum(np.concatenate([_terms(spec, g12), -_terms(spec, g1),
                                     -_terms(spec, g2), _terms(spec, graph)]))


def diff_second(spec: FunctionalSpec, sample: PointSample, z1, z2, method: str = "incremental") -> float:
    """Second-order difference operator ``D^2_{z1,z2} F`` (four-term alternating sum)."""
    z1 = _check_z(sample, z1)
    z2 = _check_z(sample, z2)
    if method == "full":
        pts = sample.points
        f = [build_graph(spec, sample.with_points(np.vstack([pts] + extra)))
             for extra in ([z1, z2], [z1], [z2], [])]
        return math.fsum(np.concatenate([_terms(spec, f[0]), -_terms(spec, f[1]),
                                         -_terms(spec, f[2]), _terms(spec, f[3])]))
    if method != "incremental":
        raise ValueError(f"unknown method {method!r}")
    return diff_second_graph(spec, build_graph(spec, sample), z1, z2)
