import math

import numpy as np
import pytest

from rstclt.geom import ball, box, unit_box
from rstclt.pointprocess import derive_replicate_seed, from_points, sample_poisson
from rstclt.spanning import (NONE, ROOT, GridIndex, build_dsf, build_rst, directed_parent,
                             edges_to_csv, grid_build, grid_shell_candidates, insert_point,
                             radial_parent)

W2 = box([-1, -1], [1, 1])


def _sample(pts, w=W2):
    return from_points(pts, w)


def test_radial_parent_examples():
    assert radial_parent(0, _sample([[0.5, 0]])) == (ROOT, 0.5)
    j, length = radial_parent(1, _sample([[0.5, 0], [0.6, 0]]))
    assert j == 0 and length == pytest.approx(0.1, abs=1e-12)
    j, length = radial_parent(0, _sample([[0.3, 0.4], [0, 0.45]]))
    assert j == 1 and length == pytest.approx(math.sqrt(0.0925), abs=1e-12)


def test_directed_parent_examples():
    s = _sample([[0, 0], [-1, 0], [0.5, 0]])
    assert directed_parent(0, s, [1, 0]) == (1, 1.0)
    assert directed_parent(0, _sample([[0, 0]]), [1, 0]) == (NONE, 0.0)
    j, length = directed_parent(0, _sample([[0, 0], [0.2, 0.1]]), [0, -1])
    assert j == 1 and length == pytest.approx(math.sqrt(0.05), abs=1e-12)


def test_empty_and_single():
    empty = _sample(np.empty((0, 2)))
    assert len(build_rst(empty)) == 0
    assert len(build_dsf(empty, [1, 0])) == 0
    t = build_rst(_sample([[0.3, -0.4]]))
    assert t.parent.tolist() == [ROOT] and t.edge_length[0] == pytest.approx(0.5)
    f = build_dsf(_sample([[0.3, -0.4]]), [1, 0])
    assert f.parent.tolist() == [NONE] and f.edge_length[0] == 0.0


def test_dsf_extreme_points():
    s = sample_poisson(unit_box(2), 100, 3)
    f = build_dsf(s, [1, 0])
    lo = np.argmin(s.points[:, 0])
    hi = np.argmax(s.points[:, 0])
    assert f.parent[lo] == NONE
    assert f.parent[hi] != NONE


def test_equal_norm_tie_is_acyclic():
    # two points of equal norm, each closer to the other than to the origin
    s = _sample([[0.6, 0.8], [0.8, 0.6]])
    t = build_rst(s, method="brute")
    assert sorted(t.parent.tolist()) == [ROOT, 0]
    assert np.array_equal(t.parent, build_rst(s, method="grid").parent)


@pytest.mark.parametrize("d", [2, 3])
def test_grid_matches_brute_small(d):
    for i in range(20):
        s = sample_poisson(unit_box(d), 200, derive_replicate_seed(100 + d, i))
        assert np.array_equal(build_rst(s).parent, build_rst(s, method="brute").parent)
        e = np.eye(d)[i % d] * (1 if i % 2 else -1)
        assert np.array_equal(build_dsf(s, e).parent, build_dsf(s, e, method="brute").parent)


@pytest.mark.parametrize("cell", [0.01, 0.2, 5.0])
def test_grid_cell_size_is_only_an_optimization(cell):
    s = sample_poisson(ball(1, 2), 150, 42)
    ref = build_rst(s, method="brute")
    got = build_rst(s, cell=cell)
    assert np.array_equal(ref.parent, got.parent)
    assert np.array_equal(ref.sq_length, got.sq_length)


def test_clustered_and_far_points():
    rng = np.random.default_rng(5)
    pts = np.vstack([rng.normal(0.4, 0.01, (100, 2)), rng.normal(-0.45, 0.002, (50, 2)),
                     [[0.99, -0.99], [-0.99, 0.98]]])
    s = _sample(pts)
    assert np.array_equal(build_rst(s, cell=0.05).parent, build_rst(s, method="brute").parent)
    e = np.array([0.6, -0.8])
    assert np.array_equal(build_dsf(s, e, cell=0.05).parent,
                          build_dsf(s, e, method="brute").parent)


def test_grid_buckets_partition_points():
    s = sample_poisson(unit_box(2), 300, 6)
    index = grid_build(s)
    seen = np.concatenate([index.bucket(c) for c in range(int(np.prod(index.ncell)))])
    assert sorted(seen.tolist()) == list(range(len(s)))
    for i in range(len(s)):
        assert i in index.bucket(index.cell_of_point[i])


def test_shell_zero_is_own_cell():
    # cells are anchored at the bounding-box corner; 1.05 * i puts point i in cell i
    pts = np.array([[1.05 * i, 1.05 * j] for i in range(10) for j in range(10)])
    index = GridIndex(pts, 1.0)
    for k in range(len(pts)):
        got = grid_shell_candidates(index, pts[k], 0)
        assert got.tolist() == [k]
    ring = grid_shell_candidates(index, pts[55], 1)
    assert len(ring) == 8


def test_query_outside_bounding_box():
    pts = np.array([[0.1, 0.1], [0.2, 0.15], [0.12, 0.3]])
    index = GridIndex(pts, 0.05)
    far = np.array([5.0, -3.0])
    found = np.concatenate([grid_shell_candidates(index, far, k) for k in range(20)])
    assert sorted(found.tolist()) == [0, 1, 2]


def test_insert_point_equals_rebuild():
    s = sample_poisson(unit_box(2), 300, 7)
    z = np.array([0.11, -0.23])
    full = build_rst(s.with_points(np.vstack([s.points, z])))
    inc = insert_point(build_rst(s), z)
    assert np.array_equal(full.parent, inc.parent)
    assert np.array_equal(full.edge_length, inc.edge_length)
    e = np.array([0.0, 1.0])
    full = build_dsf(s.with_points(np.vstack([s.points, z])), e)
    inc = insert_point(build_dsf(s, e), z)
    assert np.array_equal(full.parent, inc.parent)


def test_edges_csv_schema():
    t = build_rst(_sample([[0.5, 0], [0.6, 0]]))
    lines = edges_to_csv(t).splitlines()
    assert lines[0] == "child_index,parent_index,parent_kind,length"
    assert lines[1] == "0,-1,ROOT,0.5"
    assert lines[2].startswith("1,0,NODE,0.0999999999999")
