"""Radial spanning tree and directed spanning forest construction.

Both graphs are built with a uniform grid and an expanding-shell nearest
candidate search.  ``method="brute"`` runs the O(n^2) scan instead; the two
must agree exactly and the test-suite checks that they do.

Ties (probability zero for Poisson input) are broken by squared norm, then
coordinates in lexicographic order, then index.  In the radial tree a point
may only attach to points that come strictly before it in the
(norm, coordinates) order, which keeps the parent relation acyclic even for
crafted inputs with equal norms.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as K
from .geom import Window, direction as _direction
from .pointprocess import PointSample

ROOT = K.ROOT
NONE = K.NONE

_DUMMY_E = np.zeros(1)


@dataclass
class RadialTree:
    """Parent per point (``ROOT`` = the origin) and the edge lengths."""

    parent: np.ndarray
    edge_length: np.ndarray
    sq_length: np.ndarray = field(repr=False)
    points: Optional[np.ndarray] = field(default=None, repr=False)
    window: Optional[Window] = None

    def __len__(self):
        return self.parent.size


@dataclass
class DirectedForest:
    """Parent per point (``NONE`` when the half-space behind it is empty)."""

    direction: np.ndarray
    parent: np.ndarray
    edge_length: np.ndarray
    sq_length: np.ndarray = field(repr=False)
    points: Optional[np.ndarray] = field(default=None, repr=False)
    window: Optional[Window] = None

    def __len__(self):
        return self.parent.size


def _lengths(sq: np.ndarray, parent: np.ndarray) -> np.ndarray:
    out = np.sqrt(np.where(parent == NONE, 0.0, sq))
    return out


class GridIndex:
    """Uniform bucket grid over a point set.

    Cells are cubes of side ``cell``, anchored at the lower corner of the
    bounding box of the points.  Queries outside the box are clamped to the
    nearest cell, which keeps the shell lower bound valid.
    """

    def __init__(self, points: np.ndarray, cell: float):
        if not cell > 0:
            raise ValueError("cell size must be positive")
        points = np.ascontiguousarray(points, dtype=float)
        n, d = points.shape
        if n:
            lo, hi = points.min(axis=0), points.max(axis=0)
        else:
            lo = hi = np.zeros(d)
        extent = hi - lo
        # keep the cell count linear in n
        limit = 4 * n + 64
        while True:
            ncell = np.maximum(1, np.ceil(extent / cell)).astype(np.int64)
            if np.prod(ncell.astype(float)) <= limit:
                break
            cell *= 1.5
        self.points = points
        self.cell = float(cell)
        self.lower = lo
        self.upper = hi
        self.ncell = ncell
        cells = K.grid_cells(points, lo, self.cell, ncell)
        self.start, self.items = K.grid_csr(cells, int(np.prod(ncell)))
        self.cell_of_point = cells

    def bucket(self, linear_cell: int) -> np.ndarray:
        return self.items[self.start[linear_cell]:self.start[linear_cell + 1]]

    def shell_candidates(self, x, shell: int) -> np.ndarray:
        """Indices of points in cells at Chebyshev cell distance ``shell`` from x."""
        x = np.asarray(x, dtype=float)
        return K.shell_members(x, int(shell), self.lower, self.cell, self.ncell,
                               self.start, self.items)


def default_cell(sample: PointSample) -> float:
    """Typical inter-point spacing ``t^(-1/d)``."""
    t = sample.intensity if sample.intensity > 0 else 1.0
    return t ** (-1.0 / sample.dim)


def grid_build(sample: PointSample, cell: Optional[float] = None) -> GridIndex:
    return GridIndex(sample.points, default_cell(sample) if cell is None else cell)


def grid_shell_candidates(index: GridIndex, x, shell_radius: int) -> np.ndarray:
    return index.shell_candidates(x, shell_radius)


def _check_index(sample: PointSample, i: int):
    if not 0 <= i < len(sample):
        raise IndexError(f"point index {i} out of range for {len(sample)} points")


def radial_parent(x_index: int, sample: PointSample) -> tuple[int, float]:
    """Radial nearest neighbour of ``points[x_index]`` (``ROOT`` for the origin)."""
    _check_index(sample, x_index)
    pts = sample.points
    others = np.delete(np.arange(len(sample)), x_index)
    norm2 = K.norms2(pts)
    j, d2 = K.radial_query(pts[others], norm2[others], pts[x_index], norm2[x_index])
    return (int(others[j]) if j >= 0 else ROOT), math.sqrt(d2)


def directed_parent(x_index: int, sample: PointSample, e) -> tuple[int, float]:
    """Nearest other point in the closed half-space behind ``points[x_index]``."""
    _check_index(sample, x_index)
    e = _direction(e)
    pts = sample.points
    others = np.delete(np.arange(len(sample)), x_index)
    norm2 = K.norms2(pts)
    j, d2 = K.directed_query(pts[others], norm2[others], pts[x_index], e)
    if j == NONE:
        return NONE, 0.0
    return int(others[j]), math.sqrt(d2)


def _build(points, radial: bool, e, method: str, cell: Optional[float]):
    points = np.ascontiguousarray(points, dtype=float)
    norm2 = K.norms2(points)
    if points.shape[0] == 0:
        return np.empty(0, np.int64), np.empty(0)
    if method == "brute":
        if radial:
            return K.rst_brute(points, norm2)
        return K.dsf_brute(points, norm2, e)
    if method != "grid":
        raise ValueError(f"unknown method {method!r}")
    index = GridIndex(points, cell)
    return K.grid_build_all(points, norm2, radial, e, index.lower, index.cell,
                            index.ncell, index.start, index.items)


def build_rst(sample: PointSample, method: str = "grid", cell: Optional[float] = None) -> RadialTree:
    if cell is None:
        cell = default_cell(sample)
    parent, sq = _build(sample.points, True, _DUMMY_E, method, cell)
    return RadialTree(parent, np.sqrt(sq), sq, sample.points, sample.sampling_window)


def build_dsf(sample: PointSample, e, method: str = "grid", cell: Optional[float] = None) -> DirectedForest:
    e = np.ascontiguousarray(_direction(e))
    if e.size != sample.dim:
        raise ValueError("direction does not match the sample dimension")
    if cell is None:
        cell = default_cell(sample)
    parent, sq = _build(sample.points, False, e, method, cell)
    return DirectedForest(e, parent, _lengths(sq, parent), sq, sample.points,
                          sample.sampling_window)


def insert_point(graph, z):
    """Graph on ``graph.points + [z]``, updated rather than rebuilt.

    Only the new point and the points for which it becomes the nearest
    admissible candidate are recomputed; the result equals a full rebuild.
    """
    z = np.asarray(z, dtype=float).reshape(1, -1)
    ext = np.ascontiguousarray(np.vstack([graph.points, z]))
    norm2 = K.norms2(ext)
    radial = isinstance(graph, RadialTree)
    e = _DUMMY_E if radial else graph.direction
    parent, sq = K.insert_last(ext, norm2, graph.parent, graph.sq_length, radial, e)
    if radial:
        return RadialTree(parent, np.sqrt(sq), sq, ext, graph.window)
    return DirectedForest(graph.direction, parent, _lengths(sq, parent), sq, ext, graph.window)


def parent_kind(parent: int) -> str:
    if parent == ROOT:
        return "ROOT"
    if parent == NONE:
        return "NONE"
    return "NODE"


def edges_to_csv(graph) -> str:
    """``child_index,parent_index,parent_kind,length`` rows, 17 significant digits."""
    buf = io.StringIO()
    buf.write("child_index,parent_index,parent_kind,length\n")
    for i, (p, length) in enumerate(zip(graph.parent, graph.edge_length)):
        p = int(p)
        buf.write(f"{i},{p if p >= 0 else -1},{parent_kind(p)},{'%.17g' % length}\n")
    return buf.getvalue()
