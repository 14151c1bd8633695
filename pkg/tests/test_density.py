import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffuselab.density import (
    HistogramSpec,
    histogram_density,
    l1_distance,
    l2_distance,
    noise_floor,
    sup_distance,
)
from diffuselab.errors import DimensionError, InvalidParameterError
from diffuselab.pde import ScalarGrid
from diffuselab.rng import RngStream


def test_spec_geometry_and_edges():
    spec = HistogramSpec([-1.0, 0.0], [1.0, 2.0], (4, 2))
    assert spec.d == 2
    ex, ey = spec.edges()
    np.testing.assert_allclose(ex, [-1.0, -0.5, 0.0, 0.5, 1.0])
    np.testing.assert_allclose(ey, [0.0, 1.0, 2.0])


def test_spec_validation():
    with pytest.raises(DimensionError):
        HistogramSpec([0.0], [1.0], (4, 4))
    with pytest.raises(DimensionError):
        HistogramSpec([0.0, 0.0, 0.0], [1.0, 1.0, 1.0], (2, 2, 2))
    with pytest.raises(InvalidParameterError):
        HistogramSpec([0.0], [1.0], (1,))
    with pytest.raises(InvalidParameterError):
        HistogramSpec([1.0], [0.0], (4,))


def test_bin_edge_semantics_match_histogramdd():
    # [0,1) [1,2]: interior edges go right, the top boundary is kept
    spec = HistogramSpec([0.0], [2.0], (2,))
    grid, dropped = histogram_density(np.array([0.0, 0.5, 1.0, 2.0]), spec)
    assert dropped == 0.0
    counts = grid.values * 4 * 1.0  # n_total * cell_volume
    np.testing.assert_allclose(counts, [2.0, 2.0])


def test_out_of_box_samples_are_dropped_and_counted():
    spec = HistogramSpec([0.0], [1.0], (2,))
    grid, dropped = histogram_density(np.array([0.1, 0.9, -5.0, 7.0]), spec)
    assert dropped == 0.5
    assert grid.total_mass() == pytest.approx(0.5, rel=1e-15)


def test_density_integrates_to_one_2d():
    pts = RngStream(5, 0).normals(2 * 50_000).reshape(-1, 2)
    spec = HistogramSpec([-5.0, -5.0], [5.0, 5.0], (25, 25))
    grid, dropped = histogram_density(pts, spec)
    assert grid.total_mass() == pytest.approx(1.0 - dropped, abs=1e-12)
    assert dropped < 1e-3


def test_histogram_shape_validation():
    spec2 = HistogramSpec([0.0, 0.0], [1.0, 1.0], (2, 2))
    with pytest.raises(DimensionError):
        histogram_density(np.zeros(10), spec2)
    with pytest.raises(DimensionError):
        histogram_density(np.zeros((10, 3)), spec2)
    with pytest.raises(InvalidParameterError):
        histogram_density(np.zeros((0, 2)), spec2)


def test_distance_oracles():
    a = ScalarGrid([0.0], [2.0], np.array([1.0, 0.0]))
    b = ScalarGrid([0.0], [2.0], np.array([0.0, 1.0]))
    assert l1_distance(a, b) == pytest.approx(2.0, rel=1e-15)  # |1| + |-1| times dx=1
    assert l2_distance(a, b) == pytest.approx(np.sqrt(2.0), rel=1e-15)
    assert sup_distance(a, b) == 1.0
    assert l1_distance(a, a) == 0.0
    # identity of indiscernibles and symmetry
    assert l1_distance(b, a) == l1_distance(a, b)


def test_distances_require_identical_geometry():
    a = ScalarGrid([0.0], [2.0], np.array([1.0, 0.0]))
    for other in (
        ScalarGrid([0.0], [2.0], np.array([1.0, 0.0, 0.0])),
        ScalarGrid([0.0], [3.0], np.array([1.0, 0.0])),
    ):
        for dist in (l1_distance, l2_distance, sup_distance):
            with pytest.raises(DimensionError):
                dist(a, other)


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2 ** 32),
    n=st.integers(min_value=1, max_value=300),
    bins=st.integers(min_value=2, max_value=12),
)
def test_mass_is_kept_fraction(seed, n, bins):
    samples = 3.0 * RngStream(seed, 0).normals(n)
    grid, dropped = histogram_density(samples, HistogramSpec([-2.0], [2.0], (bins,)))
    assert grid.total_mass() == pytest.approx(1.0 - dropped, abs=1e-12)
    assert 0.0 <= dropped <= 1.0


def gaussian_sampler(seed, n):
    return RngStream(seed, 0).normals(n).reshape(n, 1)


def test_noise_floor_zero_for_identical_seeds():
    spec = HistogramSpec([-4.0], [4.0], (20,))
    assert noise_floor(gaussian_sampler, 1000, spec, seeds=(7, 7)) == 0.0
    floor = noise_floor(gaussian_sampler, 1000, spec, seeds=(7, 8))
    assert floor > 0.0
    with pytest.raises(InvalidParameterError):
        noise_floor(gaussian_sampler, 1000, spec, seeds=(1, 2, 3))


def test_noise_floor_shrinks_like_root_n():
    spec = HistogramSpec([-4.0], [4.0], (20,))
    small = noise_floor(gaussian_sampler, 100, spec, seeds=(1, 2))
    big = noise_floor(gaussian_sampler, 40_000, spec, seeds=(1, 2))
    ratio = small / big
    assert 20.0 * 0.7 <= ratio <= 20.0 * 1.3  # sqrt(40000/100) = 20
