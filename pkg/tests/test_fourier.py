import numpy as np
import pytest

from car_lab.fourier import FourierSeries, argument_winding, exp_series


def test_algebra_roundtrip():
    a = FourierSeries.from_dict({1: 1.0, -1: 1.0})
    b = FourierSeries.from_dict({2: 0.5j, -2: -0.5j})
    prod = a * b
    # convolution oracle on a sample grid
    grid = 2 * np.pi * np.arange(64) / 64
    assert np.allclose(prod.evaluate(grid), a.evaluate(grid) * b.evaluate(grid))
    assert (a + b - b - a).is_zero()
    assert a.conj().to_dict() == a.to_dict()  # real series
    assert b.is_real()


def test_mode_and_pairs():
    s = FourierSeries.from_pairs([[3, 1.0, -2.0], [-1, 0.5, 0.0]])
    assert s[3] == 1.0 - 2.0j
    assert s[-1] == 0.5
    assert s[0] == 0
    assert s.bandwidth == 3
    assert FourierSeries.from_pairs(s.to_pairs()).to_dict() == s.to_dict()


def test_rotate_is_precomposition():
    s = FourierSeries.from_dict({1: 1.0, -2: 3.0 - 1.0j})
    theta = 0.731
    grid = 2 * np.pi * np.arange(32) / 32
    assert np.allclose(s.rotate(theta).evaluate(grid), s.evaluate(grid + theta))


def test_derivative():
    s = FourierSeries.real_cos(2)  # 2 cos(2a)
    grid = 2 * np.pi * np.arange(128) / 128
    assert np.allclose(s.derivative().evaluate(grid), -4 * np.sin(2 * grid), atol=1e-12)


def test_exp_series_against_sampled_exponential():
    h = FourierSeries.real_cos(1, 0.2)  # 0.4 cos
    e = exp_series(h.scale(1j))
    grid = 2 * np.pi * np.arange(256) / 256
    direct = np.exp(1j * 0.4 * np.cos(grid))
    assert np.abs(e.evaluate(grid) - direct).max() < 1e-13


def test_exp_series_large_concentration_no_cancellation():
    # all power-series terms of e^{kappa cos} have nonnegative coefficients,
    # so the sum is stable even though intermediate values reach e^kappa
    kappa = 36.0
    e = exp_series(FourierSeries.real_cos(1, kappa / 2)).scale(np.exp(-kappa))
    grid = 2 * np.pi * np.arange(512) / 512
    direct = np.exp(kappa * (np.cos(grid) - 1.0))
    assert np.abs(e.evaluate(grid) - direct).max() < 1e-12


@pytest.mark.parametrize("w", [-3, -1, 0, 2])
def test_argument_winding(w):
    grid = 2 * np.pi * np.arange(1024) / 1024
    vals = np.exp(1j * (w * grid + 0.3 * np.sin(grid)))
    assert argument_winding(vals) == w


def test_argument_winding_rejects_near_zero():
    vals = 0.1 * np.exp(1j * np.linspace(0, 2 * np.pi, 64, endpoint=False))
    with pytest.raises(ArithmeticError):
        argument_winding(vals)
