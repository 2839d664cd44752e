"""Finite-difference checks for every differentiable building block.

Each op's backward is compared against central differences of a scalar
probe loss sum(op(...) * U) in float64. Inputs are drawn away from the ReLU
kink so the numeric derivative is well defined.
"""

import numpy as np
import pytest

from csrnet import nn
from csrnet.gradcheck import (finite_difference_gradient, max_relative_error)

SEEDS = (0, 1, 2)


def away_from_zero(rng, shape, margin=0.05):
    x = rng.standard_normal(shape)
    return x + np.sign(x) * margin


class TestRelu:
    def test_values(self):
        x = np.array([-2.0, -0.0, 0.0, 0.5, 3.0])
        np.testing.assert_array_equal(nn.relu(x), [0.0, 0.0, 0.0, 0.5, 3.0])

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient(self, seed):
        rng = np.random.default_rng(seed)
        x = away_from_zero(rng, (4, 5, 6))
        u = rng.standard_normal(x.shape)
        analytic = {"x": nn.relu_backward(x, u)}
        numeric = finite_difference_gradient(
            lambda p: float(np.sum(nn.relu(p["x"]) * u)), {"x": x})
        assert max_relative_error(analytic["x"], numeric["x"]) <= 1e-6

    def test_subgradient_at_zero_is_zero(self):
        x = np.zeros((2, 2))
        u = np.ones((2, 2))
        np.testing.assert_array_equal(nn.relu_backward(x, u), np.zeros((2, 2)))


class TestGlobalAveragePool:
    def test_value(self):
        x = np.arange(24, dtype=np.float64).reshape(2, 3, 4)
        np.testing.assert_allclose(nn.global_average_pool(x),
                                   x.mean(axis=(1, 2)))

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((3, 4, 5))
        u = rng.standard_normal(3)
        analytic = nn.global_average_pool_backward(x, u)
        numeric = finite_difference_gradient(
            lambda p: float(np.sum(nn.global_average_pool(p["x"]) * u)), {"x": x})
        assert max_relative_error(analytic, numeric["x"]) <= 1e-6


class TestFullyConnected:
    def test_value(self):
        w = np.array([[1.0, 2.0], [3.0, 4.0]])
        x = np.array([1.0, -1.0])
        b = np.array([0.5, -0.5])
        np.testing.assert_allclose(nn.fully_connected(x, w, b), [-0.5, -1.5])

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradients(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(7)
        w = rng.standard_normal((4, 7))
        b = rng.standard_normal(4)
        u = rng.standard_normal(4)
        g = nn.fully_connected_backward(x, w, u)
        numeric = finite_difference_gradient(
            lambda p: float(np.sum(nn.fully_connected(p["x"], p["w"], p["b"]) * u)),
            {"x": x, "w": w, "b": b})
        assert max_relative_error(g.input, numeric["x"]) <= 1e-6
        assert max_relative_error(g.weight, numeric["w"]) <= 1e-6
        assert max_relative_error(g.bias, numeric["b"]) <= 1e-6

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            nn.fully_connected(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros(2))
        with pytest.raises(ValueError):
            nn.fully_connected(np.zeros(3), np.zeros((2, 4)), np.zeros(2))


class TestGfm:
    def test_identity_coefficients(self, rng):
        x = rng.standard_normal((5, 3, 4))
        out = nn.gfm(x, np.ones(5), np.zeros(5))
        np.testing.assert_array_equal(out, x)

    def test_scale_and_shift(self):
        x = np.ones((2, 2, 2))
        out = nn.gfm(x, np.array([2.0, -1.0]), np.array([0.5, 0.0]))
        np.testing.assert_allclose(out[0], 2.5)
        np.testing.assert_allclose(out[1], -1.0)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradients(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((6, 3, 5))
        gamma = rng.standard_normal(6)
        beta = rng.standard_normal(6)
        u = rng.standard_normal(x.shape)
        g = nn.gfm_backward(x, gamma, u)
        numeric = finite_difference_gradient(
            lambda p: float(np.sum(nn.gfm(p["x"], p["gamma"], p["beta"]) * u)),
            {"x": x, "gamma": gamma, "beta": beta})
        assert max_relative_error(g.input, numeric["x"]) <= 1e-6
        assert max_relative_error(g.gamma, numeric["gamma"]) <= 1e-6
        assert max_relative_error(g.beta, numeric["beta"]) <= 1e-6


class TestConv2d:
    @pytest.mark.parametrize("seed", SEEDS)
    @pytest.mark.parametrize("spec", [(1, 1, 0), (3, 1, 1), (7, 2, 3), (3, 2, 1)])
    def test_gradients(self, seed, spec):
        k, stride, padding = spec
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((3, 9, 8))
        w = rng.standard_normal((4, 3, k, k)) * 0.4
        b = rng.standard_normal(4) * 0.1
        u = rng.standard_normal(nn.conv2d_forward(x, w, b, stride, padding).shape)
        g = nn.conv2d_backward(x, w, stride, padding, u)
        numeric = finite_difference_gradient(
            lambda p: float(np.sum(nn.conv2d_forward(p["x"], p["w"], p["b"],
                                                     stride, padding) * u)),
            {"x": x, "w": w, "b": b})
        assert max_relative_error(g.input, numeric["x"]) <= 1e-6
        assert max_relative_error(g.weight, numeric["w"]) <= 1e-6
        assert max_relative_error(g.bias, numeric["b"]) <= 1e-6

    def test_rejects_bad_arguments(self):
        x = np.zeros((3, 8, 8))
        w = np.zeros((4, 3, 3, 3))
        b = np.zeros(4)
        with pytest.raises(ValueError):
            nn.conv2d_forward(x, np.zeros((4, 2, 3, 3)), b)  # channel mismatch
        with pytest.raises(ValueError):
            nn.conv2d_forward(x, np.zeros((4, 3, 2, 3)), b)  # non-square kernel
        with pytest.raises(ValueError):
            nn.conv2d_forward(x, w, b, stride=0)
        with pytest.raises(ValueError):
            nn.conv2d_forward(x, w, b, padding=-1)
        with pytest.raises(ValueError):
            nn.conv2d_forward(np.zeros((3, 2, 2)), np.zeros((4, 3, 5, 5)), b)

    def test_preserves_dtype(self):
        x = np.zeros((3, 8, 8), dtype=np.float32)
        w = np.zeros((4, 3, 1, 1), dtype=np.float32)
        b = np.zeros(4, dtype=np.float32)
        assert nn.conv2d_forward(x, w, b).dtype == np.float32


class TestAdam:
    def test_descends_a_quadratic(self):
        from csrnet.adam import AdamState, adam_step
        params = {"w": np.array([5.0, -3.0])}
        state = AdamState(step_size=0.1)
        for _ in range(400):
            grads = {"w": 2.0 * params["w"]}
            adam_step(params, grads, state)
        assert np.abs(params["w"]).max() < 1e-3

    def test_step_size_override(self):
        # the per-call rate wins over the state's default
        from csrnet.adam import AdamState, adam_step
        params = {"w": np.array([1.0])}
        state = AdamState(step_size=1.0)
        adam_step(params, {"w": np.array([1.0])}, state, step_size=0.25)
        assert params["w"][0] == pytest.approx(0.75, rel=1e-4)

    def test_first_step_magnitude(self):
        # bias correction makes the first step approximately the step size
        from csrnet.adam import AdamState, adam_step
        params = {"w": np.array([0.0])}
        state = AdamState(step_size=0.01)
        adam_step(params, {"w": np.array([123.0])}, state)
        assert params["w"][0] == pytest.approx(-0.01, rel=1e-4)
