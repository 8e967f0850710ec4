import math

import numpy as np
import pytest

from rstclt.geom import ball, box, unit_box, window_contains
from rstclt.pointprocess import (IntensityError, ResourceError, derive_replicate_seed,
                                 points_from_csv, points_to_csv, sample_poisson,
                                 sample_poisson_dilated)


def _counts(w, t, n, margin=None):
    if margin is None:
        return np.array([len(sample_poisson(w, t, derive_replicate_seed(11, i))) for i in range(n)])
    return np.array([len(sample_poisson_dilated(w, t, margin, derive_replicate_seed(11, i)))
                     for i in range(n)])


def test_zero_intensity_is_empty():
    s = sample_poisson(unit_box(2), 0.0, 1)
    assert s.points.shape == (0, 2)


def test_negative_intensity_rejected():
    with pytest.raises(IntensityError, match="invalid intensity"):
        sample_poisson(unit_box(2), -1.0, 1)


def test_huge_mean_rejected():
    with pytest.raises(ResourceError):
        sample_poisson(unit_box(2), 3.0 * 2 ** 31, 1)


def test_box_count_mean_and_dispersion():
    c = _counts(unit_box(2), 500, 10_000)
    se = c.std(ddof=1) / math.sqrt(c.size)
    assert abs(c.mean() - 500) < 3 * se
    assert 0.95 <= c.var(ddof=1) / c.mean() <= 1.05


def test_ball_count_mean():
    c = _counts(ball(1, 2), 100, 10_000)
    se = c.std(ddof=1) / math.sqrt(c.size)
    assert abs(c.mean() - 100 * math.pi) < 3 * se


def test_dilated_count_mean():
    c = _counts(unit_box(2), 20, 4000, margin=1.0)
    se = c.std(ddof=1) / math.sqrt(c.size)
    assert abs(c.mean() - 9 * 20) < 3 * se


def test_margin_zero_equals_plain_sampling():
    a = sample_poisson(unit_box(2), 300, 5)
    b = sample_poisson_dilated(unit_box(2), 300, 0.0, 5)
    assert np.array_equal(a.points, b.points)


def test_points_inside_windows():
    for w in (unit_box(3), ball(1.5, 2), box([-1, -0.2], [0.3, 2])):
        s = sample_poisson(w, 400, 3)
        assert np.all(window_contains(w, s.points))
    s = sample_poisson_dilated(ball(1, 2), 50, 1.0, 4)
    assert np.all(window_contains(ball(2, 2), s.points))
    assert s.sampling_window.radius == 2.0


def test_seed_derivation_deterministic_and_distinct():
    assert derive_replicate_seed(123, 7) == derive_replicate_seed(123, 7)
    rng = np.random.default_rng(2)
    masters = rng.integers(0, 2 ** 63, size=10 ** 6, dtype=np.int64)
    clashes = sum(derive_replicate_seed(int(s), 0) == derive_replicate_seed(int(s), 1)
                  for s in masters)
    assert clashes == 0


def test_seed_derivation_injective_over_indices():
    seeds = {derive_replicate_seed(99, i) for i in range(100_000)}
    assert len(seeds) == 100_000


def test_sampling_reproducible():
    a = sample_poisson(unit_box(2), 250, derive_replicate_seed(4, 2))
    b = sample_poisson(unit_box(2), 250, derive_replicate_seed(4, 2))
    assert points_to_csv(a) == points_to_csv(b)


def test_disjoint_counts_uncorrelated():
    left, right = [], []
    for i in range(10_000):
        p = sample_poisson(unit_box(2), 50, derive_replicate_seed(8, i)).points
        left.append(np.count_nonzero(p[:, 0] < 0))
        right.append(np.count_nonzero(p[:, 0] >= 0))
    assert abs(np.corrcoef(left, right)[0, 1]) < 0.05


def test_subregion_count_mean():
    c = []
    for i in range(4000):
        p = sample_poisson(unit_box(2), 200, derive_replicate_seed(9, i)).points
        c.append(np.count_nonzero((p[:, 0] < 0.0) & (p[:, 1] < -0.25)))
    c = np.array(c)
    assert abs(c.mean() - 200 * 0.125) < 3 * c.std(ddof=1) / math.sqrt(c.size)


def test_csv_round_trip():
    s = sample_poisson(unit_box(3), 100, 1)
    text = points_to_csv(s)
    assert text.splitlines()[0] == "x0,x1,x2"
    assert np.array_equal(points_from_csv(text), s.points)
