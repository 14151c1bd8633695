import numpy as np
import pytest

from diffuselab.errors import DimensionError, InvalidParameterError
from diffuselab.paths import Path, brownian_path
from diffuselab.rng import RngStream


def make_path(n_steps=4, d=1, dt=0.25, fill=0.0):
    times = np.arange(n_steps + 1) * dt
    states = np.full((n_steps + 1, d), fill)
    return Path(times=times, states=states)


def test_basic_properties():
    p = make_path(n_steps=4, d=2, dt=0.25)
    assert p.dim == 2
    assert p.n_steps == 4
    assert p.dt == 0.25
    assert p.horizon == 1.0
    assert p.increments().shape == (4, 2)
    assert p.component(1).shape == (5,)


def test_arrays_are_read_only():
    p = make_path()
    with pytest.raises(ValueError):
        p.states[0, 0] = 1.0
    with pytest.raises(ValueError):
        p.times[0] = 1.0


def test_validation_errors():
    with pytest.raises(InvalidParameterError):
        Path(times=np.array([0.1, 0.2]), states=np.zeros((2, 1)))  # t0 != 0
    with pytest.raises(InvalidParameterError):
        Path(times=np.array([0.0, 0.1, 0.3]), states=np.zeros((3, 1)))  # non-uniform
    with pytest.raises(DimensionError):
        Path(times=np.array([0.0, 0.1]), states=np.zeros((3, 1)))  # length mismatch
    with pytest.raises(DimensionError):
        Path(times=np.array([0.0]), states=np.zeros((1, 1)))  # need one step
    # 1-D states are promoted to a single column
    p = Path(times=np.array([0.0, 0.1]), states=np.array([1.0, 2.0]))
    assert p.states.shape == (2, 1)


def test_brownian_path_start_and_single_step():
    p = brownian_path(RngStream(0, 0), x0=np.array([1.5, -2.0]), T=1.0, n_steps=1)
    assert p.dim == 2
    assert np.array_equal(p.states[0], [1.5, -2.0])
    assert p.n_steps == 1
    # one step of a unit normal scaled by sqrt(T)
    z = RngStream(0, 0).normals(2)
    assert np.array_equal(p.states[1], np.array([1.5, -2.0]) + z)


def test_brownian_scalar_x0_with_dimension():
    p = brownian_path(RngStream(3, 1), x0=0.0, T=2.0, n_steps=8, d=3)
    assert p.dim == 3
    assert np.array_equal(p.states[0], np.zeros(3))


def test_brownian_increment_statistics():
    n_steps, T = 50_000, 2.0
    p = brownian_path(RngStream(77, 0), x0=0.0, T=T, n_steps=n_steps)
    inc = p.increments()[:, 0]
    dt = T / n_steps
    assert abs(inc.mean()) < 4.0 * np.sqrt(dt) / np.sqrt(n_steps)
    assert abs(inc.var() / dt - 1.0) < 4.0 * np.sqrt(2.0 / n_steps)


def test_brownian_cross_dimension_independence():
    p = brownian_path(RngStream(101, 0), x0=0.0, T=1.0, n_steps=100_000, d=2)
    inc = p.increments()
    r = np.corrcoef(inc[:, 0], inc[:, 1])[0, 1]
    assert abs(r) < 4.0 / np.sqrt(inc.shape[0])


def test_self_similarity_exact_scaling():
    # With x0 = 0 the same stream gives W(4T) == 2 * W(T) sample by sample:
    # sqrt(4 dt) is exactly 2 sqrt(dt) in binary floating point.
    n = 512
    w1 = brownian_path(RngStream(13, 5), x0=0.0, T=1.0, n_steps=n)
    w4 = brownian_path(RngStream(13, 5), x0=0.0, T=4.0, n_steps=n)
    assert np.array_equal(w4.states, 2.0 * w1.states)
    assert np.array_equal(w4.times, 4.0 * w1.times)


def test_self_similarity_with_offset_is_affine():
    n = 256
    x0 = 0.75
    w1 = brownian_path(RngStream(13, 6), x0=x0, T=1.0, n_steps=n)
    w4 = brownian_path(RngStream(13, 6), x0=x0, T=4.0, n_steps=n)
    # subtracting x0 back out costs one rounding of magnitude ~eps * |x0|
    np.testing.assert_allclose(w4.states - x0, 2.0 * (w1.states - x0), rtol=0.0, atol=1e-14)


def test_brownian_parameter_validation():
    s = RngStream(0, 0)
    with pytest.raises(InvalidParameterError):
        brownian_path(s, x0=0.0, T=-1.0, n_steps=10)
    with pytest.raises(InvalidParameterError):
        brownian_path(s, x0=0.0, T=1.0, n_steps=0)
    with pytest.raises(DimensionError):
        brownian_path(s, x0=np.zeros((2, 2)), T=1.0, n_steps=10)
    with pytest.raises(DimensionError):
        brownian_path(s, x0=np.zeros(2), T=1.0, n_steps=10, d=3)
