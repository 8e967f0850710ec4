import numpy as np
import pytest

from rstclt.functionals import (ExponentError, FunctionalSpec, diff_first, diff_second,
                                eval_dsf_functional, eval_rst_functional)
from rstclt.geom import ball, box, unit_box
from rstclt.pointprocess import derive_replicate_seed, from_points, sample_poisson
from rstclt.spanning import build_dsf, build_rst

W2 = box([-1, -1], [1, 1])


def test_rst_functional_examples():
    t = build_rst(from_points([[0.5, 0.0]], W2))
    assert eval_rst_functional(t, 1).value == 0.5
    assert eval_rst_functional(t, 2).value == 0.25
    s = sample_poisson(unit_box(2), 300, 2)
    assert eval_rst_functional(build_rst(s), 0).value == len(s)


def test_negative_exponent_rejected():
    t = build_rst(from_points([[0.5, 0.0]], W2))
    with pytest.raises(ExponentError):
        eval_rst_functional(t, -0.5)
    with pytest.raises(ExponentError):
        FunctionalSpec(-1)


def test_dsf_functional_examples():
    core = ball(0.5, 2)
    f = build_dsf(from_points([[0.9, 0.9], [0.95, 0.95]], W2), [1, 0])
    assert eval_dsf_functional(f, core, 1).value == 0.0
    # one point in the core whose parent is 0.3 behind it
    f = build_dsf(from_points([[0.1, 0.0], [-0.2, 0.0]], W2), [1, 0])
    assert eval_dsf_functional(f, core, 1).value == pytest.approx(0.3, abs=1e-15)
    assert eval_dsf_functional(f, core, 0).value == 2.0


def test_dsf_core_must_fit():
    f = build_dsf(from_points([[0.1, 0.0]], unit_box(2)), [1, 0])
    with pytest.raises(ValueError):
        eval_dsf_functional(f, ball(2, 2), 1)


def test_first_difference_examples():
    empty = from_points(np.empty((0, 2)), W2)
    assert diff_first(FunctionalSpec(1), empty, [0.5, 0]) == 0.5
    s = sample_poisson(unit_box(2), 200, 3)
    for z in ([0.1, 0.2], [-0.4, 0.33], [0.0, 0.0]):
        assert diff_first(FunctionalSpec(0), s, z) == 1.0


def test_second_difference_zero_for_counts():
    s = sample_poisson(unit_box(2), 200, 4)
    assert diff_second(FunctionalSpec(0), s, [0.1, 0.1], [0.12, 0.1]) == 0.0


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_incremental_equals_full_rst(a):
    spec = FunctionalSpec(a)
    for i in range(300):
        seed = derive_replicate_seed(31, i)
        s = sample_poisson(unit_box(2), 150, seed)
        z1, z2 = np.random.default_rng(seed).uniform(-0.5, 0.5, (2, 2))
        assert diff_first(spec, s, z1) == diff_first(spec, s, z1, method="full")
        assert diff_second(spec, s, z1, z2) == diff_second(spec, s, z1, z2, method="full")


def test_incremental_equals_full_dsf():
    core = ball(0.3, 2)
    spec = FunctionalSpec(1.0, "dsf", (0.0, 1.0), core)
    for i in range(100):
        seed = derive_replicate_seed(32, i)
        s = sample_poisson(unit_box(2), 150, seed)
        z1, z2 = np.random.default_rng(seed).uniform(-0.5, 0.5, (2, 2))
        assert diff_first(spec, s, z1) == diff_first(spec, s, z1, method="full")
        assert diff_second(spec, s, z1, z2) == diff_second(spec, s, z1, z2, method="full")


def test_far_insertions_do_not_interact():
    rng = np.random.default_rng(8)
    cluster_a = rng.uniform(0.30, 0.35, (20, 2))
    cluster_b = rng.uniform(-0.35, -0.30, (20, 2))
    s = from_points(np.vstack([cluster_a, cluster_b]), W2)
    spec = FunctionalSpec(1.0)
    assert diff_second(spec, s, [0.33, 0.31], [-0.31, -0.34]) == 0.0


def test_far_point_adds_only_its_edge():
    s = from_points([[0.01, 0.0], [0.0, 0.02]], W2)
    z = np.array([0.9, 0.9])
    spec = FunctionalSpec(1.0)
    own = build_rst(s.with_points(np.vstack([s.points, z]))).edge_length[-1]
    assert diff_first(spec, s, z) == own


def test_z_outside_window_rejected():
    s = sample_poisson(unit_box(2), 50, 1)
    with pytest.raises(ValueError):
        diff_first(FunctionalSpec(1), s, [2.0, 0.0])
